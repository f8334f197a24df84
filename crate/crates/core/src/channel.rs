//! Dense finite-dimensional quantum channels.
//!
//! A [`ChannelDense`] keeps its Kraus operators together with the
//! superoperator matrix in the column-stacking convention of
//! [`crate::linalg`]: `vec(Φ(ρ)) = S · vec(ρ)` with `S = Σ conj(K) ⊗ K`.
//! Only the superoperator is canonical; Kraus sets are never minimized except
//! where noted.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_eigen, hermitian_part, identity, kron, max_abs, max_abs_diff, trace, unvec, vec_of, CMatrix, ONE,
};

/// Default cap on the Hilbert-space dimension (superoperators are `dim⁴`).
pub const DEFAULT_DIM_CAP: usize = 64;

/// Missing fields take their default values when deserialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub cptp: f64,
    pub peripheral: f64,
    pub eq: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { herm: 1e-10, trace: 1e-10, psd: 1e-9, cptp: 1e-9, peripheral: 1e-8, eq: 1e-10 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.herm, self.trace, self.psd, self.cptp, self.peripheral, self.eq];
        if all.iter().all(|t| (0.0..=1e-2).contains(t)) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("tolerances must lie in [0, 1e-2]: {self:?}")))
        }
    }
}

/// A validated quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "state must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm_dev = max_abs_diff(&matrix, &matrix.adjoint());
        if herm_dev > tol.herm {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm_dev:.3e})")));
        }
        let tr = trace(&matrix);
        if (tr - ONE).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = linalg::min_hermitian_eigenvalue(&matrix);
        if min_eig < -tol.psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix: hermitian_part(&matrix) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: identity(dim).scale(1.0 / dim as f64) }
    }

    /// Diagonal state with the given probabilities (assumed normalized).
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let m = CMatrix::from_fn(probs.len(), probs.len(), |i, j| if i == j { c(probs[i], 0.0) } else { linalg::ZERO });
        Self::new(m, &Tolerances::default())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct ChannelDense {
    dim: usize,
    kraus: Vec<CMatrix>,
    superop: CMatrix,
}

fn superop_from_kraus(dim: usize, kraus: &[CMatrix]) -> CMatrix {
    let mut s = CMatrix::zeros(dim * dim, dim * dim);
    for k in kraus {
        s += kron(&k.map(|z| z.conj()), k);
    }
    s
}

/// Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, read off the superoperator.
pub fn choi_from_superop(superop: &CMatrix, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim * dim, dim * dim, |row, col| {
        let (i, r) = (row / dim, row % dim);
        let (j, s) = (col / dim, col % dim);
        superop[(r + s * dim, i + j * dim)]
    })
}

/// Kraus operators from the eigen-decomposition of the Choi matrix; at most
/// `dim²` operators, dropping eigenvalues at or below `floor`.
fn kraus_from_superop(superop: &CMatrix, dim: usize, floor: f64) -> Vec<CMatrix> {
    let (values, vectors) = hermitian_eigen(&choi_from_superop(superop, dim));
    values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v > floor)
        .map(|(k, &v)| {
            let col = vectors.column(k).into_owned() * c(v.sqrt(), 0.0);
            unvec(&col, dim)
        })
        .collect()
}

impl ChannelDense {
    /// Builds and validates a channel from Kraus operators.
    pub fn from_kraus(kraus: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        Self::from_kraus_capped(kraus, tol, DEFAULT_DIM_CAP)
    }

    pub fn from_kraus_capped(kraus: Vec<CMatrix>, tol: &Tolerances, cap: usize) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::DimensionMismatch("empty Kraus list".into()))?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::DimensionMismatch("zero-dimensional Kraus operator".into()));
        }
        if dim > cap {
            return Err(Error::ResourceLimit { dim, cap });
        }
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operators must all be {dim}x{dim}, found {}x{}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if !linalg::is_finite(k) {
                return Err(Error::InvalidInput("non-finite Kraus entry".into()));
            }
        }
        let superop = superop_from_kraus(dim, &kraus);
        let channel = Self { dim, kraus, superop };
        channel.validate(tol)?;
        Ok(channel)
    }

    /// Checks trace preservation and complete positivity.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let deviation = self.trace_preservation_error();
        if deviation > tol.cptp {
            return Err(Error::NotTracePreserving { deviation });
        }
        let min_eigenvalue = linalg::min_hermitian_eigenvalue(&self.choi());
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotCompletelyPositive { min_eigenvalue });
        }
        Ok(())
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn trace_preservation_error(&self) -> f64 {
        let sum = self.kraus.iter().fold(CMatrix::zeros(self.dim, self.dim), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(self.dim))
    }

    pub fn identity(dim: usize) -> Self {
        let kraus = vec![identity(dim)];
        Self { dim, superop: identity(dim * dim), kraus }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn superop(&self) -> &CMatrix {
        &self.superop
    }

    pub fn choi(&self) -> CMatrix {
        choi_from_superop(&self.superop, self.dim)
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, channel acts on dimension {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        Ok(unvec(&(&self.superop * vec_of(rho)), self.dim))
    }

    /// `a ∘ b`, i.e. `b` acts first.
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose channels on dimensions {} and {}",
                a.dim, b.dim
            )));
        }
        let dim = a.dim;
        let superop = &a.superop * &b.superop;
        let kraus = if a.kraus.len() * b.kraus.len() <= dim * dim {
            a.kraus.iter().flat_map(|ka| b.kraus.iter().map(move |kb| ka * kb)).collect()
        } else {
            kraus_from_superop(&superop, dim, 0.0)
        };
        Ok(Self { dim, kraus, superop })
    }

    /// `t`-fold composition by repeated squaring of the superoperator.
    pub fn iterate(&self, t: u64) -> Self {
        let dim = self.dim;
        match t {
            0 => return Self::identity(dim),
            1 => return self.clone(),
            _ => {}
        }
        let superop = matrix_power(&self.superop, t);
        let kraus = kraus_from_superop(&superop, dim, 0.0);
        Self { dim, kraus, superop }
    }

    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        Self::tensor_capped(a, b, DEFAULT_DIM_CAP)
    }

    /// Tensor product on `C^{da} ⊗ C^{db}` (first factor `a`).
    pub fn tensor_capped(a: &Self, b: &Self, cap: usize) -> Result<Self> {
        let (da, db) = (a.dim, b.dim);
        let dim = da * db;
        if dim > cap {
            return Err(Error::ResourceLimit { dim, cap });
        }
        let kraus: Vec<CMatrix> = a.kraus.iter().flat_map(|ka| b.kraus.iter().map(move |kb| kron(ka, kb))).collect();
        // vec index of (row, col) = row + col·dim with row = ia·db + ib.
        let split = |idx: usize| {
            let (row, col) = (idx % dim, idx / dim);
            let (ia, ib) = (row / db, row % db);
            let (ja, jb) = (col / db, col % db);
            (ia + ja * da, ib + jb * db)
        };
        let d2 = dim * dim;
        let superop = CMatrix::from_fn(d2, d2, |u, v| {
            let (ua, ub) = split(u);
            let (va, vb) = split(v);
            a.superop[(ua, va)] * b.superop[(ub, vb)]
        });
        Ok(Self { dim, kraus, superop })
    }

    /// Hilbert–Schmidt adjoint `Φ*(X) = Σ K† X K`. The result is unital and
    /// completely positive but in general not trace preserving, so it is not
    /// validated.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, kraus: self.kraus.iter().map(|k| k.adjoint()).collect(), superop: self.superop.adjoint() }
    }

    /// Checks `tr(X Φ*(Y) σ) = tr(Φ*(X) Y σ)` on all pairs of matrix units.
    pub fn check_gns_symmetric(&self, sigma: &DensityMatrix, tol: &Tolerances) -> Result<GnsReport> {
        let d = self.dim;
        if sigma.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "reference state has dimension {}, channel {}",
                sigma.dim(),
                d
            )));
        }
        let min_eigenvalue = sigma.min_eigenvalue();
        if min_eigenvalue <= tol.psd {
            return Err(Error::SigmaNotFullRank { min_eigenvalue });
        }
        let s = sigma.matrix();
        let adj = self.superop.adjoint();
        // Φ*(E_kl) is column k + l·d of the adjoint superoperator.
        let images: Vec<CMatrix> = (0..d * d).map(|idx| unvec(&adj.column(idx).into_owned(), d)).collect();
        let right: Vec<CMatrix> = images.iter().map(|m| m * s).collect();
        let left: Vec<CMatrix> = images.iter().map(|m| s * m).collect();
        // tr(E_ij Φ*(E_kl) σ) = (Φ*(E_kl)σ)[j,i];  tr(Φ*(E_ij) E_kl σ) = (σΦ*(E_ij))[l,k].
        let mut deviation: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let ij = i + j * d;
                for k in 0..d {
                    for l in 0..d {
                        let kl = k + l * d;
                        let diff = right[kl][(j, i)] - left[ij][(l, k)];
                        deviation = deviation.max(diff.norm());
                    }
                }
            }
        }
        let invariance_deviation = max_abs_diff(&self.apply(s)?, s);
        Ok(GnsReport { symmetric: deviation <= tol.eq, deviation, invariance_deviation })
    }

    /// A fixed point of the channel. Degenerate fixed spaces resolve to the
    /// orthogonal projection of the maximally mixed state onto the fixed
    /// space, renormalized.
    pub fn find_invariant_state(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        let d = self.dim;
        let shifted = &self.superop - identity(d * d);
        let fixed = linalg::null_space(&shifted, tol.peripheral);
        if fixed.ncols() == 0 {
            return Err(Error::NumericalFailure("superoperator has no eigenvalue 1 within tolerance".into()));
        }
        let mixed = vec_of(&identity(d).scale(1.0 / d as f64));
        let projected = &fixed * (fixed.adjoint() * &mixed);
        let mut candidate = hermitian_part(&unvec(&projected, d));
        if trace(&candidate).re <= tol.trace {
            // The projection can miss the trace direction; fall back to the
            // fixed-space basis vector with the largest trace.
            let best = (0..fixed.ncols())
                .map(|k| unvec(&fixed.column(k).into_owned(), d))
                .max_by(|a, b| trace(a).norm().total_cmp(&trace(b).norm()))
                .expect("nonempty fixed space");
            let phase = trace(&best).conj() / trace(&best).norm();
            candidate = hermitian_part(&(best * phase));
        }
        // Clip tiny negative eigenvalues and renormalize.
        let clipped = linalg::hermitian_fn(&candidate, |x| x.max(0.0));
        let tr = trace(&clipped).re;
        if tr <= tol.trace {
            return Err(Error::NumericalFailure("fixed point has vanishing trace".into()));
        }
        let state = clipped.scale(1.0 / tr);
        let residual = max_abs_diff(&self.apply(&state)?, &state);
        if residual > tol.eq.max(10.0 * tol.peripheral) {
            return Err(Error::NumericalFailure(format!("fixed point residual {residual:.3e} too large")));
        }
        DensityMatrix::new(state, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnsReport {
    pub symmetric: bool,
    /// Max deviation of the GNS identity over matrix-unit pairs.
    pub deviation: f64,
    /// `‖Φ(σ) − σ‖_max`.
    pub invariance_deviation: f64,
}

pub fn matrix_power(m: &CMatrix, mut t: u64) -> CMatrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while t > 0 {
        if t & 1 == 1 {
            result = &result * &base;
        }
        t >>= 1;
        if t > 0 {
            base = &base * &base;
        }
    }
    result
}

// Wire format: {"dim": d, "kraus": [[[ [re, im], ... ], ... ], ...]}.

#[derive(Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl ChannelFile {
    pub fn from_channel(channel: &ChannelDense) -> Self {
        Self { dim: channel.dim(), kraus: channel.kraus().iter().map(matrix_to_rows).collect() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel file serializes")
    }

    pub fn into_channel(self, tol: &Tolerances) -> Result<ChannelDense> {
        let kraus = self.kraus.iter().map(|rows| matrix_from_rows(rows)).collect::<Result<Vec<_>>>()?;
        if kraus.iter().any(|k| k.nrows() != self.dim || k.ncols() != self.dim) {
            return Err(Error::DimensionMismatch(format!("declared dim {} does not match Kraus shapes", self.dim)));
        }
        ChannelDense::from_kraus(kraus, tol)
    }
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn into_state(self, tol: &Tolerances) -> Result<DensityMatrix> {
        DensityMatrix::new(matrix_from_rows(&self.matrix)?, tol)
    }
}

pub fn amplitude_damping(gamma: f64) -> Result<ChannelDense> {
    let k0 = CMatrix::from_row_slice(2, 2, &[ONE, linalg::ZERO, linalg::ZERO, c((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = CMatrix::from_row_slice(2, 2, &[linalg::ZERO, c(gamma.sqrt(), 0.0), linalg::ZERO, linalg::ZERO]);
    ChannelDense::from_kraus(vec![k0, k1], &Tolerances::default())
}

/// `ρ ↦ tr(ρ)·ω`.
pub fn replacer(omega: &DensityMatrix) -> Result<ChannelDense> {
    let d = omega.dim();
    let (values, vectors) = hermitian_eigen(omega.matrix());
    let mut kraus = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        let col = vectors.column(k).into_owned() * c(v.sqrt(), 0.0);
        for j in 0..d {
            let mut op = CMatrix::zeros(d, d);
            op.set_column(j, &col);
            kraus.push(op);
        }
    }
    ChannelDense::from_kraus(kraus, &Tolerances::default())
}

/// Largest entry magnitude of a superoperator difference.
pub fn superop_distance(a: &ChannelDense, b: &ChannelDense) -> f64 {
    max_abs_diff(a.superop(), b.superop())
}

pub fn superop_norm(a: &ChannelDense) -> f64 {
    max_abs(a.superop())
}
