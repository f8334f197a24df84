//! Binary-symplectic stabilizer codes and their effective logical channels
//! under i.i.d. Pauli noise.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pauli::PauliChannel;

/// A Pauli operator on up to 64 qubits, phases dropped. Qubit `i` carries X
/// iff bit `i` of `x` is set, Z iff bit `i` of `z` is set, Y iff both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub n: usize,
    pub x: u64,
    pub z: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LogicalClass {
    I,
    X,
    Y,
    Z,
}

impl LogicalClass {
    pub fn index(self) -> usize {
        match self {
            LogicalClass::I => 0,
            LogicalClass::X => 1,
            LogicalClass::Y => 2,
            LogicalClass::Z => 3,
        }
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n, x: 0, z: 0 }
    }

    /// Single-qubit Pauli `kind` (0 = I, 1 = X, 2 = Y, 3 = Z) on `qubit`.
    pub fn single(n: usize, qubit: usize, kind: usize) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, kind);
        s
    }

    pub fn set(&mut self, qubit: usize, kind: usize) {
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        if kind == 1 || kind == 2 {
            self.x |= bit;
        }
        if kind == 2 || kind == 3 {
            self.z |= bit;
        }
    }

    pub fn kind(&self, qubit: usize) -> usize {
        let x = (self.x >> qubit) & 1;
        let z = (self.z >> qubit) & 1;
        match (x, z) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Product up to phase.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    /// 1 iff the two operators anticommute.
    pub fn symplectic(&self, other: &Self) -> u8 {
        (((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1) as u8
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > 64 {
            return Err(Error::InvalidInput("at most 64 qubits".into()));
        }
        let mut out = Self::identity(n);
        for (q, ch) in s.chars().enumerate() {
            let kind = match ch {
                'I' => 0,
                'X' => 1,
                'Y' => 2,
                'Z' => 3,
                other => return Err(Error::InvalidInput(format!("bad Pauli letter `{other}`"))),
            };
            out.set(q, kind);
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", ['I', 'X', 'Y', 'Z'][self.kind(q)])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerCode {
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    /// Correction for each syndrome, indexed by the syndrome bits read as an
    /// integer (bit `i` = generator `i`).
    pub syndrome_table: Vec<PauliString>,
}

impl StabilizerCode {
    /// Validates commutation relations and builds a minimal-weight syndrome
    /// table (ties broken lexicographically on `(x, z)`).
    pub fn new(generators: Vec<PauliString>, logical_x: PauliString, logical_z: PauliString) -> Result<Self> {
        let n = logical_x.n;
        if generators.iter().any(|g| g.n != n) || logical_z.n != n {
            return Err(Error::DimensionMismatch("operators act on different qubit counts".into()));
        }
        let r = generators.len();
        if r >= n || r > 16 {
            return Err(Error::InvalidInput(format!("{r} generators on {n} qubits")));
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if a.symplectic(b) != 0 {
                    return Err(Error::InvalidInput(format!("generators {a} and {b} anticommute")));
                }
            }
            if a.symplectic(&logical_x) != 0 || a.symplectic(&logical_z) != 0 {
                return Err(Error::InvalidInput(format!("logical operator anticommutes with {a}")));
            }
        }
        if logical_x.symplectic(&logical_z) != 1 {
            return Err(Error::InvalidInput("logical X and Z must anticommute".into()));
        }
        let mut code = Self { n, k: n - r, generators, logical_x, logical_z, syndrome_table: Vec::new() };
        code.syndrome_table = code.build_syndrome_table()?;
        Ok(code)
    }

    fn build_syndrome_table(&self) -> Result<Vec<PauliString>> {
        let slots = 1usize << self.generators.len();
        let mut table: Vec<Option<PauliString>> = vec![None; slots];
        let mut filled = 0;
        'weights: for w in 0..=self.n {
            let mut candidates: Vec<PauliString> = all_strings_of_weight(self.n, w);
            candidates.sort_by_key(|p| (p.x, p.z));
            for e in candidates {
                let s = self.syndrome_index(&e);
                if table[s].is_none() {
                    table[s] = Some(e);
                    filled += 1;
                    if filled == slots {
                        break 'weights;
                    }
                }
            }
        }
        table
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput("syndrome table incomplete".into()))
    }

    pub fn syndrome_index(&self, e: &PauliString) -> usize {
        self.generators.iter().enumerate().fold(0, |acc, (i, g)| acc | ((e.symplectic(g) as usize) << i))
    }

    /// Syndrome bits, one per generator.
    pub fn syndrome(&self, e: &PauliString) -> Result<Vec<u8>> {
        if e.n != self.n {
            return Err(Error::DimensionMismatch(format!("error acts on {} qubits, code on {}", e.n, self.n)));
        }
        Ok(self.generators.iter().map(|g| e.symplectic(g)).collect())
    }

    pub fn correction(&self, syndrome: &[u8]) -> PauliString {
        let idx = syndrome.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as usize) << i));
        self.syndrome_table[idx]
    }

    pub fn logical_class(&self, r: &PauliString) -> Result<LogicalClass> {
        if r.n != self.n {
            return Err(Error::DimensionMismatch("operator size differs from code".into()));
        }
        if self.syndrome_index(r) != 0 {
            return Err(Error::NotInNormalizer);
        }
        Ok(self.class_unchecked(r))
    }

    fn class_unchecked(&self, r: &PauliString) -> LogicalClass {
        match (r.symplectic(&self.logical_z), r.symplectic(&self.logical_x)) {
            (0, 0) => LogicalClass::I,
            (1, 0) => LogicalClass::X,
            (0, _) => LogicalClass::Z,
            _ => LogicalClass::Y,
        }
    }

    /// Logical class left after decoding physical error `e`.
    pub fn decode_class(&self, e: &PauliString) -> LogicalClass {
        let correction = self.syndrome_table[self.syndrome_index(e)];
        self.class_unchecked(&correction.mul(e))
    }

    /// Logical class of every one of the `4ⁿ` error strings, indexed in base 4
    /// with qubit 0 as the least significant digit.
    pub fn class_table(&self) -> Vec<LogicalClass> {
        (0..4usize.pow(self.n as u32)).map(|idx| self.decode_class(&string_from_index(self.n, idx))).collect()
    }

    /// Exact effective logical channel under i.i.d. noise `p`.
    pub fn logical_channel(&self, p: &PauliChannel) -> LogicalChannelResult {
        self.logical_channel_with(p, Execution::default())
    }

    pub fn logical_channel_with(&self, p: &PauliChannel, exec: Execution) -> LogicalChannelResult {
        let table = self.class_table();
        logical_from_table(&table, self.n, p, exec)
    }

    /// `q⁽ˡ⁾ = L(q⁽ˡ⁻¹⁾)`, `q⁽⁰⁾ = p`.
    pub fn concatenated_logical_channel(&self, p: &PauliChannel, level: u32) -> Result<LogicalChannelResult> {
        if level == 0 {
            return Err(Error::InvalidInput("concatenation level must be at least 1".into()));
        }
        let table = self.class_table();
        let exec = Execution::default();
        let mut current = logical_from_table(&table, self.n, p, exec);
        for _ in 1..level {
            current = logical_from_table(&table, self.n, &current.q, exec);
        }
        Ok(current)
    }
}

fn logical_from_table(table: &[LogicalClass], n: usize, p: &PauliChannel, exec: Execution) -> LogicalChannelResult {
    let probs = p.probabilities();
    let masses = exec.pairwise_sum(table.len(), &|idx| {
        let mut weight = 1.0;
        let mut rest = idx;
        for _ in 0..n {
            weight *= probs[rest & 3];
            rest >>= 2;
        }
        let mut out = [0.0; 4];
        out[table[idx].index()] = weight;
        out
    });
    // Masses already form a distribution up to rounding of Πp.
    let total: f64 = masses.iter().sum();
    let q = PauliChannel::new(masses.map(|m| m / total)).expect("normalized logical masses form a Pauli channel");
    LogicalChannelResult { q, masses }
}

/// Base-4 digits: 0 = I, 1 = X, 2 = Y, 3 = Z, qubit 0 least significant.
pub fn string_from_index(n: usize, mut idx: usize) -> PauliString {
    let mut s = PauliString::identity(n);
    for q in 0..n {
        s.set(q, idx & 3);
        idx >>= 2;
    }
    s
}

fn all_strings_of_weight(n: usize, w: usize) -> Vec<PauliString> {
    if n > 12 {
        // Only reachable for large custom codes; enumerate supports instead.
        return supports_of_weight(n, w).into_iter().flat_map(|support| expand_support(n, &support)).collect();
    }
    (0..4usize.pow(n as u32)).map(|idx| string_from_index(n, idx)).filter(|s| s.weight() as usize == w).collect()
}

fn supports_of_weight(n: usize, w: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for q in start..n {
            cur.push(q);
            rec(q + 1, n, w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, w, &mut Vec::new(), &mut out);
    out
}

fn expand_support(n: usize, support: &[usize]) -> Vec<PauliString> {
    let mut out = vec![PauliString::identity(n)];
    for &q in support {
        out = out
            .into_iter()
            .flat_map(|s| {
                (1..4).map(move |k| {
                    let mut t = s;
                    t.set(q, k);
                    t
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalChannelResult {
    /// Logical Pauli channel.
    pub q: PauliChannel,
    /// Raw probability mass per logical class `[I, X, Y, Z]` before
    /// normalization.
    pub masses: [f64; 4],
}

/// The perfect `[[5,1,3]]` code: cyclic shifts of `XZZXI`, `X̄ = XXXXX`,
/// `Z̄ = ZZZZZ`.
pub fn five_qubit_code() -> StabilizerCode {
    let parse = |s: &str| s.parse::<PauliString>().expect("static Pauli string");
    let generators = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].map(parse).to_vec();
    StabilizerCode::new(generators, parse("XXXXX"), parse("ZZZZZ")).expect("five-qubit code is valid")
}

/// Syndrome table lookup keyed by syndrome bits, for reporting.
pub fn syndrome_map(code: &StabilizerCode) -> HashMap<Vec<u8>, PauliString> {
    code.syndrome_table
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let bits = (0..code.generators.len()).map(|i| ((idx >> i) & 1) as u8).collect();
            (bits, *c)
        })
        .collect()
}
