//! Independent oracles shared by the integration and acceptance tests.
//!
//! The five-qubit code is rebuilt here from its generator strings with its own
//! bit representation and decoder so that none of the library's stabilizer
//! logic is reused.
#![allow(dead_code)]

use gnscap::channel::{ChannelDense, Tolerances};
use gnscap::linalg::{kron, pauli_matrices, CMatrix};
use gnscap::pauli::PauliChannel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const GENERATORS: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];
pub const LOGICAL_X: &str = "XXXXX";
pub const LOGICAL_Z: &str = "ZZZZZ";

/// Per-qubit `(x, z)` bit pairs.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Bits {
    pub x: u32,
    pub z: u32,
}

impl Bits {
    pub fn parse(s: &str) -> Self {
        let mut b = Bits { x: 0, z: 0 };
        for (q, ch) in s.chars().enumerate() {
            b.set(q, ch);
        }
        b
    }

    fn set(&mut self, q: usize, ch: char) {
        let (x, z) = match ch {
            'I' => (0, 0),
            'X' => (1, 0),
            'Y' => (1, 1),
            'Z' => (0, 1),
            _ => panic!("bad Pauli letter {ch}"),
        };
        self.x |= x << q;
        self.z |= z << q;
    }

    /// Single-qubit letter index in `[I, X, Y, Z]` order.
    pub fn letter(&self, q: usize) -> usize {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        let mut b = Bits { x: 0, z: 0 };
        for (q, &l) in letters.iter().enumerate() {
            b.set(q, ['I', 'X', 'Y', 'Z'][l]);
        }
        b
    }

    pub fn times(self, o: Self) -> Self {
        Bits { x: self.x ^ o.x, z: self.z ^ o.z }
    }

    pub fn anticommutes(self, o: Self) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 1
    }

    pub fn weight(self) -> u32 {
        (self.x | self.z).count_ones()
    }
}

pub struct Decoder {
    gens: Vec<Bits>,
    corrections: [Bits; 16],
    lx: Bits,
    lz: Bits,
}

impl Decoder {
    pub fn five_qubit() -> Self {
        let gens: Vec<Bits> = GENERATORS.iter().map(|s| Bits::parse(s)).collect();
        let mut corrections = [None; 16];
        let mut candidates = vec![Bits { x: 0, z: 0 }];
        for q in 0..5 {
            for l in 1..4 {
                let mut letters = [0; 5];
                letters[q] = l;
                candidates.push(Bits::from_letters(&letters));
            }
        }
        let mut out = Self {
            gens,
            corrections: [Bits { x: 0, z: 0 }; 16],
            lx: Bits::parse(LOGICAL_X),
            lz: Bits::parse(LOGICAL_Z),
        };
        for e in candidates {
            let s = out.syndrome(e);
            assert!(corrections[s].is_none(), "weight-1 syndromes collide");
            corrections[s] = Some(e);
        }
        for (s, c) in corrections.iter().enumerate() {
            out.corrections[s] = c.expect("every syndrome has a weight ≤ 1 representative");
        }
        out
    }

    pub fn syndrome(&self, e: Bits) -> usize {
        self.gens.iter().enumerate().map(|(g, &s)| (e.anticommutes(s) as usize) << g).sum()
    }

    pub fn correction(&self, syndrome: usize) -> Bits {
        self.corrections[syndrome]
    }

    /// Logical letter `[I, X, Y, Z]` of the residual after correction.
    pub fn decode(&self, e: Bits) -> usize {
        let r = e.times(self.correction(self.syndrome(e)));
        match (r.anticommutes(self.lz), r.anticommutes(self.lx)) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        }
    }
}

fn sample_letter(rng: &mut ChaCha8Rng, cdf: &[f64; 3]) -> usize {
    let u: f64 = rng.random();
    cdf.iter().position(|&c| u < c).unwrap_or(3)
}

fn cdf(p: &[f64; 4]) -> [f64; 3] {
    [p[0], p[0] + p[1], p[0] + p[1] + p[2]]
}

/// Counts of logical outcomes `[I, X, Y, Z]` over `shots` independent
/// five-qubit error draws. Chunks carry their own seeded streams, so the counts
/// are reproducible regardless of scheduling.
pub fn monte_carlo_level1(p: &PauliChannel, shots: u64, seed: u64) -> [u64; 4] {
    let dec = Decoder::five_qubit();
    let cdf = cdf(&p.probabilities());
    monte_carlo(shots, seed, |rng| {
        let letters: Vec<usize> = (0..5).map(|_| sample_letter(rng, &cdf)).collect();
        dec.decode(Bits::from_letters(&letters))
    })
}

/// Two-level concatenation simulated on 25 physical qubits: each inner block
/// is decoded to a logical letter, which then acts as a physical error on the
/// outer code.
pub fn monte_carlo_level2(p: &PauliChannel, shots: u64, seed: u64) -> [u64; 4] {
    let dec = Decoder::five_qubit();
    let cdf = cdf(&p.probabilities());
    monte_carlo(shots, seed, |rng| {
        let outer: Vec<usize> = (0..5)
            .map(|_| {
                let inner: Vec<usize> = (0..5).map(|_| sample_letter(rng, &cdf)).collect();
                dec.decode(Bits::from_letters(&inner))
            })
            .collect();
        dec.decode(Bits::from_letters(&outer))
    })
}

fn monte_carlo<F>(shots: u64, seed: u64, shot: F) -> [u64; 4]
where
    F: Fn(&mut ChaCha8Rng) -> usize + Sync,
{
    const CHUNK: u64 = 1 << 16;
    let chunks = shots.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(shots - c * CHUNK);
            let mut counts = [0u64; 4];
            for _ in 0..n {
                counts[shot(&mut rng)] += 1;
            }
            counts
        })
        .reduce(|| [0; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
}

/// Maximum over the four masses of `|q_i − count_i/N|` in units of the
/// binomial standard error `sqrt(q_i (1 − q_i) / N)`.
pub fn max_standard_errors(q: &[f64; 4], counts: &[u64; 4]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    q.iter()
        .zip(counts)
        .map(|(&qi, &ci)| {
            let se = (qi * (1.0 - qi) / n).sqrt();
            let diff = (qi - ci as f64 / n).abs();
            if se == 0.0 {
                if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                diff / se
            }
        })
        .fold(0.0, f64::max)
}

fn pauli_string_matrix(b: Bits) -> CMatrix {
    let paulis = pauli_matrices();
    (1..5).fold(paulis[b.letter(0)].clone(), |acc, q| kron(&acc, &paulis[b.letter(q)]))
}

/// Logical channel of the five-qubit code computed densely: encode with the
/// code-space isometry, apply `T_p^{⊗5}` as a 32-dimensional channel, measure
/// the syndrome, correct, and decode. Returns the logical Pauli eigenvalues
/// converted to probabilities.
pub fn dense_logical_channel(p: &PauliChannel) -> [f64; 4] {
    let dim = 32;
    let id = CMatrix::identity(dim, dim);
    let gens: Vec<CMatrix> = GENERATORS.iter().map(|s| pauli_string_matrix(Bits::parse(s))).collect();
    let half = Complex64::new(0.5, 0.0);
    let code_proj = gens.iter().fold(id.clone(), |acc, g| acc * (&id + g) * half);
    let mut zero = code_proj.column(0).into_owned();
    let norm = zero.norm();
    assert!(norm > 1e-6, "|00000> has no overlap with the code space");
    zero /= Complex64::new(norm, 0.0);
    let one = pauli_string_matrix(Bits::parse(LOGICAL_X)) * &zero;
    let iso = CMatrix::from_columns(&[zero, one]);

    let dec = Decoder::five_qubit();
    let decode_kraus: Vec<CMatrix> = (0..16)
        .map(|s| {
            let proj = gens.iter().enumerate().fold(id.clone(), |acc, (g, m)| {
                let sign = if (s >> g) & 1 == 1 { -1.0 } else { 1.0 };
                acc * (&id + m * Complex64::new(sign, 0.0)) * half
            });
            iso.adjoint() * pauli_string_matrix(dec.correction(s)) * proj
        })
        .collect();

    let single = p.to_dense();
    let mut noise = single.clone();
    for _ in 1..5 {
        noise = ChannelDense::tensor(&noise, &single).unwrap();
    }

    let logical = |rho: &CMatrix| -> CMatrix {
        let noisy = noise.apply(&(&iso * rho * iso.adjoint())).unwrap();
        decode_kraus.iter().fold(CMatrix::zeros(2, 2), |acc, k| acc + k * &noisy * k.adjoint())
    };
    let paulis = pauli_matrices();
    let eta: Vec<f64> = (1..4).map(|a| (&paulis[a] * logical(&paulis[a])).trace().re / 2.0).collect();
    let (x, y, z) = (eta[0], eta[1], eta[2]);
    [(1.0 + x + y + z) / 4.0, (1.0 + x - y - z) / 4.0, (1.0 - x + y - z) / 4.0, (1.0 - x - y + z) / 4.0]
}

/// Pauli probabilities of a qubit channel read off from `tr(σ_a Φ(σ_a)) / 2`.
pub fn pauli_from_dense(c: &ChannelDense) -> [f64; 4] {
    let paulis = pauli_matrices();
    let eta: Vec<f64> = (1..4).map(|a| (&paulis[a] * c.apply(&paulis[a]).unwrap()).trace().re / 2.0).collect();
    let (x, y, z) = (eta[0], eta[1], eta[2]);
    [(1.0 + x + y + z) / 4.0, (1.0 + x - y - z) / 4.0, (1.0 - x + y - z) / 4.0, (1.0 - x - y + z) / 4.0]
}

/// Random Pauli vector with error rates uniform in `[0, max_rate)`.
pub fn random_pauli(rng: &mut ChaCha8Rng, max_rate: f64) -> PauliChannel {
    let px = rng.random::<f64>() * max_rate;
    let py = rng.random::<f64>() * max_rate;
    let pz = rng.random::<f64>() * max_rate;
    PauliChannel::from_error_rates(px, py, pz).unwrap()
}

/// Random point of the probability simplex (normalized exponentials).
pub fn random_simplex_pauli(rng: &mut ChaCha8Rng) -> PauliChannel {
    let w: Vec<f64> = (0..4).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    PauliChannel::new([w[0] / s, w[1] / s, w[2] / s, w[3] / s]).unwrap()
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}
