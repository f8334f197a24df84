//! Peripheral spectrum of GNS-symmetric channels.
//!
//! If `Φ` is GNS-symmetric with respect to a faithful state `σ`, its
//! Heisenberg-picture superoperator `A = S†` is self-adjoint for
//! `⟨X, Y⟩_σ = tr(X† Y σ)`, whose Gram matrix in the column-stacking basis is
//! `G = σᵀ ⊗ I`. Hence `G^{1/2} A G^{-1/2}` is Hermitian and can be handed to
//! a Hermitian eigensolver: real spectrum, orthonormal eigenvectors, and a
//! well-conditioned spectral projector even when the Hilbert–Schmidt
//! eigenbasis of `S` is far from orthogonal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{matrix_to_rows, ChannelDense, DensityMatrix, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, hermitian_eigen, hermitian_fn, hermitian_part, identity, kron, max_abs_diff, partial_trace_first,
    partial_trace_second, trace, unvec, vec_of, CMatrix,
};

pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// Relative singular-value cutoff when computing ranks of operator spans.
const RANK_TOL: f64 = 1e-7;

/// Peripheral projection `P` of a channel, as a Schrödinger-picture
/// superoperator, together with the spectrum it was cut from.
#[derive(Debug, Clone)]
pub struct PeripheralProjection {
    pub superop: CMatrix,
    /// Eigenvalues of the (GNS-Hermitian) superoperator, ascending.
    pub eigenvalues: Vec<f64>,
    /// Number of eigenvalues with modulus at least `1 − tol_peripheral`.
    pub rank: usize,
}

/// `(σᵀ)^{1/2} ⊗ I` and its inverse.
pub(crate) fn gns_metric_roots(sigma: &DensityMatrix) -> (CMatrix, CMatrix) {
    let d = sigma.dim();
    let st = sigma.matrix().transpose();
    let root = hermitian_fn(&st, f64::sqrt);
    let inv_root = hermitian_fn(&st, |x| 1.0 / x.sqrt());
    (kron(&root, &identity(d)), kron(&inv_root, &identity(d)))
}

/// Hermitian representative `G^{1/2} A G^{-1/2}` of a Heisenberg-picture
/// superoperator `A`.
pub(crate) fn gns_hermitian(heisenberg: &CMatrix, sigma: &DensityMatrix) -> CMatrix {
    let (root, inv_root) = gns_metric_roots(sigma);
    hermitian_part(&(&root * heisenberg * &inv_root))
}

fn ensure_gns(c: &ChannelDense, sigma: &DensityMatrix, tol: &Tolerances) -> Result<()> {
    let report = c.check_gns_symmetric(sigma, tol)?;
    if report.symmetric {
        Ok(())
    } else {
        Err(Error::NotGnsSymmetric { deviation: report.deviation })
    }
}

/// Spectral projector of `Φ` onto eigenvalues of modulus `≥ 1 − tol_peripheral`.
pub fn peripheral_projection(
    c: &ChannelDense,
    sigma: &DensityMatrix,
    tol: &Tolerances,
) -> Result<PeripheralProjection> {
    ensure_gns(c, sigma, tol)?;
    let hermitian = gns_hermitian(&c.superop().adjoint(), sigma);
    let (eigenvalues, vectors) = hermitian_eigen(&hermitian);

    let threshold = 1.0 - tol.peripheral;
    let guard = 1.0 - 10.0 * tol.peripheral;
    if let Some(&bad) = eigenvalues.iter().find(|&&v| v.abs() > guard && v.abs() < threshold) {
        return Err(Error::IllConditionedSpectrum { modulus: bad.abs() });
    }
    let keep: Vec<usize> = (0..eigenvalues.len()).filter(|&k| eigenvalues[k].abs() >= threshold).collect();
    if keep.is_empty() {
        return Err(Error::NumericalFailure("no peripheral eigenvalue found".into()));
    }
    let n = hermitian.nrows();
    let mut basis = CMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        basis.set_column(dst, &vectors.column(src));
    }
    let (root, inv_root) = gns_metric_roots(sigma);
    let heisenberg_projector = &inv_root * (&basis * basis.adjoint()) * &root;
    Ok(PeripheralProjection { superop: heisenberg_projector.adjoint(), eigenvalues, rank: keep.len() })
}

/// `‖S^{2t} − P‖_max`.
pub fn verify_limit(c: &ChannelDense, projection: &CMatrix, t_check: u64) -> Result<f64> {
    if t_check == 0 {
        return Err(Error::InvalidInput("t_check must be at least 1".into()));
    }
    let power = crate::channel::matrix_power(c.superop(), 2 * t_check);
    Ok(max_abs_diff(&power, projection))
}

/// One summand `M_d ⊗ ω` of the peripheral space.
#[derive(Debug, Clone)]
pub struct PeripheralBlock {
    pub d: usize,
    pub m: usize,
    pub omega: DensityMatrix,
    /// Columns embed `C^d ⊗ C^m` into the Hilbert space (first factor major).
    pub isometry: CMatrix,
}

#[derive(Debug, Clone)]
pub struct PeripheralStructure {
    pub blocks: Vec<PeripheralBlock>,
    pub projector_superop: CMatrix,
    pub h0_dim: usize,
}

/// Block sizes `d_k`; all capacity formulas depend on the structure only
/// through these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDims(pub Vec<usize>);

impl BlockDims {
    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl PeripheralStructure {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> BlockDims {
        BlockDims(self.blocks.iter().map(|b| b.d).collect())
    }

    pub fn dim(&self) -> usize {
        self.projector_superop.nrows().isqrt()
    }

    /// `P(X)` rebuilt from the blocks: `⊕_k W_k (tr_2(W_k† X W_k) ⊗ ω_k) W_k†`.
    pub fn reconstruct(&self, x: &CMatrix) -> CMatrix {
        let dim = x.nrows();
        let mut out = CMatrix::zeros(dim, dim);
        for b in &self.blocks {
            let compressed = b.isometry.adjoint() * x * &b.isometry;
            let reduced = partial_trace_second(&compressed, b.d, b.m);
            out += &b.isometry * kron(&reduced, b.omega.matrix()) * b.isometry.adjoint();
        }
        out
    }

    pub fn report(&self) -> StructureReport {
        StructureReport {
            k: self.k(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockReport { d: b.d, m: b.m, omega: matrix_to_rows(b.omega.matrix()) })
                .collect(),
            h0_dim: self.h0_dim,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub d: usize,
    pub m: usize,
    pub omega: Vec<Vec<[f64; 2]>>,
}

/// JSON shape `{"K": …, "blocks": [{"d", "m", "omega"}], "h0_dim": …}`.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    #[serde(rename = "K")]
    pub k: usize,
    pub blocks: Vec<BlockReport>,
    pub h0_dim: usize,
}

fn apply_superop(superop: &CMatrix, x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    unvec(&(superop * vec_of(x)), d)
}

/// Self-adjoint spanning set of the span of `ops`: Hermitian and
/// anti-Hermitian parts (the latter times `-i`).
fn self_adjoint_parts(ops: &[CMatrix]) -> Vec<CMatrix> {
    ops.iter()
        .flat_map(|a| {
            let h = hermitian_part(a);
            let s = (a - a.adjoint()) * c(0.0, -0.5);
            [h, s]
        })
        .collect()
}

fn random_combination(ops: &[CMatrix], rng: &mut ChaCha8Rng) -> CMatrix {
    let (r, cdim) = ops.first().map(|m| m.shape()).unwrap_or((0, 0));
    ops.iter().fold(CMatrix::zeros(r, cdim), |acc, op| acc + op * c(rng.random_range(-1.0..1.0), 0.0))
}

/// Groups ascending eigenvalues into clusters separated by gaps `> gap`.
fn cluster(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > gap {
            groups.push(start..k);
            start = k;
        }
    }
    groups
}

fn columns(m: &CMatrix, range: std::ops::Range<usize>) -> CMatrix {
    m.columns(range.start, range.len()).into_owned()
}

fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let x = &g * g.adjoint();
    let tr = trace(&x).re;
    x.scale(1.0 / tr)
}

/// Recovers `X_Φ = 0 ⊕ ⊕_k M_{d_k} ⊗ ω_k` from the peripheral projection.
///
/// The algebra `Range(P*)` is spanned by `P*(E_ij)`; its center comes from
/// the commutation equations against a basis, and a random self-adjoint
/// central element splits the support into minimal central blocks. Inside a
/// block, a random self-adjoint algebra element yields minimal projections
/// and off-diagonal matrix units fix the tensor factorization.
pub fn extract_structure(
    c_: &ChannelDense,
    projection: &CMatrix,
    sigma: &DensityMatrix,
    tol: &Tolerances,
    seed: u64,
) -> Result<PeripheralStructure> {
    let dim = c_.dim();
    let d2 = dim * dim;
    if projection.shape() != (d2, d2) || sigma.dim() != dim {
        return Err(Error::DimensionMismatch("projection, state and channel disagree".into()));
    }
    let check_tol = 100.0 * tol.eq;
    let idem = max_abs_diff(&(projection * projection), projection);
    let commute = max_abs_diff(&(projection * c_.superop()), &(c_.superop() * projection));
    if idem > check_tol || commute > check_tol {
        return Err(Error::StructureInconsistent(format!(
            "projection not idempotent/commuting (errors {idem:.2e}, {commute:.2e})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Transient block: kernel of the support of P(I/d).
    let image_of_mixed = apply_superop(projection, &identity(dim).scale(1.0 / dim as f64));
    let (supp_vals, supp_vecs) = hermitian_eigen(&image_of_mixed);
    let support_cols: Vec<usize> = (0..dim).filter(|&k| supp_vals[k] > tol.psd).collect();
    let h0_dim = dim - support_cols.len();
    let mut support = CMatrix::zeros(dim, support_cols.len());
    for (dst, &src) in support_cols.iter().enumerate() {
        support.set_column(dst, &supp_vecs.column(src));
    }

    // Algebra A = Range(P*), spanned by P*(E_ij).
    let heisenberg = projection.adjoint();
    let span = linalg::column_span(&heisenberg, RANK_TOL);
    let algebra: Vec<CMatrix> = (0..span.ncols()).map(|k| unvec(&span.column(k).into_owned(), dim)).collect();
    let r = algebra.len();

    // Center: Σ_i c_i [A_i, A_b] = 0 for every basis element A_b.
    let mut constraints = CMatrix::zeros(r * d2, r);
    for (b, ab) in algebra.iter().enumerate() {
        for (i, ai) in algebra.iter().enumerate() {
            let comm = ai * ab - ab * ai;
            constraints.view_mut((b * d2, i), (d2, 1)).copy_from(&vec_of(&comm));
        }
    }
    let center_coeffs = linalg::null_space(&constraints, RANK_TOL.sqrt());
    let center: Vec<CMatrix> = (0..center_coeffs.ncols())
        .map(|k| {
            algebra.iter().enumerate().fold(CMatrix::zeros(dim, dim), |acc, (i, a)| acc + a * center_coeffs[(i, k)])
        })
        .collect();
    if center.is_empty() {
        return Err(Error::StructureInconsistent("empty center".into()));
    }

    let z = random_combination(&self_adjoint_parts(&center), &mut rng);
    let z_support = support.adjoint() * &z * &support;
    let (z_vals, z_vecs) = hermitian_eigen(&z_support);
    let central_blocks = cluster(&z_vals, tol.peripheral);

    let mut blocks = Vec::with_capacity(central_blocks.len());
    for range in central_blocks {
        let q = &support * columns(&z_vecs, range);
        blocks.push(factorize_block(&q, &algebra, projection, sigma, tol, &mut rng)?);
    }

    let accounted: usize = blocks.iter().map(|b| b.d * b.m).sum::<usize>() + h0_dim;
    if accounted != dim {
        return Err(Error::StructureInconsistent(format!("block dimensions account for {accounted} of {dim}")));
    }
    let structure = PeripheralStructure { blocks, projector_superop: projection.clone(), h0_dim };

    for _ in 0..20 {
        let x = random_psd(dim, &mut rng);
        let err = max_abs_diff(&structure.reconstruct(&x), &apply_superop(projection, &x));
        if err > check_tol {
            return Err(Error::StructureInconsistent(format!(
                "reconstruction error {err:.3e} exceeds {check_tol:.1e}"
            )));
        }
    }
    Ok(structure)
}

/// Splits one central block (orthonormal columns `q`) as `C^d ⊗ C^m`.
fn factorize_block(
    q: &CMatrix,
    algebra: &[CMatrix],
    projection: &CMatrix,
    sigma: &DensityMatrix,
    tol: &Tolerances,
    rng: &mut ChaCha8Rng,
) -> Result<PeripheralBlock> {
    let n = q.ncols();
    let restricted: Vec<CMatrix> = algebra.iter().map(|a| q.adjoint() * a * q).collect();
    let mut stacked = CMatrix::zeros(n * n, restricted.len());
    for (i, b) in restricted.iter().enumerate() {
        stacked.set_column(i, &vec_of(b));
    }
    let alg_dim = linalg::column_span(&stacked, RANK_TOL).ncols();
    let d = (alg_dim as f64).sqrt().round() as usize;
    if d == 0 || d * d != alg_dim || !n.is_multiple_of(d) {
        return Err(Error::StructureInconsistent(format!(
            "block of dimension {n} carries a {alg_dim}-dimensional algebra"
        )));
    }
    let m = n / d;

    // Minimal projections from a generic self-adjoint element.
    let a = random_combination(&self_adjoint_parts(&restricted), rng);
    let (vals, vecs) = hermitian_eigen(&a);
    let groups = cluster(&vals, tol.peripheral);
    if groups.len() != d || groups.iter().any(|g| g.len() != m) {
        return Err(Error::StructureInconsistent(format!(
            "expected {d} minimal projections of rank {m}, found sizes {:?}",
            groups.iter().map(|g| g.len()).collect::<Vec<_>>()
        )));
    }
    let ranges: Vec<CMatrix> = groups.into_iter().map(|g| columns(&vecs, g)).collect();

    // Matrix units e_{i1} ∝ e_ii a' e_11; columns (i, j) ↦ e_{i1} f_j.
    let generic = random_combination(&restricted, rng);
    let f1 = &ranges[0];
    let mut local = CMatrix::zeros(n, d * m);
    for (i, fi) in ranges.iter().enumerate() {
        let block = if i == 0 {
            CMatrix::identity(m, m)
        } else {
            let x = fi.adjoint() * &generic * f1;
            let scale = (trace(&(x.adjoint() * &x)).re / m as f64).sqrt();
            if scale < RANK_TOL.sqrt() {
                return Err(Error::StructureInconsistent("degenerate matrix unit".into()));
            }
            x.scale(1.0 / scale)
        };
        local.view_mut((0, i * m), (n, m)).copy_from(&(fi * block));
    }
    let isometry = q * local;

    // ω from probes W(|i⟩⟨j| ⊗ 1/m)W†, averaged over the d×d grid.
    let mut omega = CMatrix::zeros(m, m);
    for i in 0..d {
        for j in 0..d {
            let probe = kron(&linalg::matrix_unit(d, i, j), &identity(m).scale(1.0 / m as f64));
            let image = apply_superop(projection, &(&isometry * probe * isometry.adjoint()));
            let local_image = isometry.adjoint() * image * &isometry;
            omega += local_image.view((i * m, j * m), (m, m));
        }
    }
    let omega = hermitian_part(&omega);
    let omega_trace = trace(&omega).re;
    if omega_trace <= 0.0 {
        return Err(Error::StructureInconsistent("probe average has no trace".into()));
    }
    let omega = omega.scale(1.0 / omega_trace);

    // Cross-check against the reference state restricted to the block.
    let restricted_sigma = partial_trace_first(&(isometry.adjoint() * sigma.matrix() * &isometry), d, m);
    let sigma_trace = trace(&restricted_sigma).re;
    let from_sigma = restricted_sigma.scale(1.0 / sigma_trace);
    let mismatch = max_abs_diff(&from_sigma, &omega);
    if mismatch > 100.0 * tol.eq.max(tol.psd) {
        return Err(Error::StructureInconsistent(format!("ω from probes and from σ differ by {mismatch:.3e}")));
    }
    let omega =
        DensityMatrix::new(omega, tol).map_err(|e| Error::StructureInconsistent(format!("ω is not a state: {e}")))?;
    if omega.min_eigenvalue() <= tol.psd {
        return Err(Error::StructureInconsistent("ω is not full rank".into()));
    }
    Ok(PeripheralBlock { d, m, omega, isometry })
}

/// Channel `ρ ↦ tr_2(ρ) ⊗ ω` on `C^a ⊗ C^b`.
pub fn conditional_expectation_channel(a: usize, omega: &DensityMatrix) -> Result<ChannelDense> {
    let b = omega.dim();
    let (vals, vecs) = hermitian_eigen(omega.matrix());
    let mut kraus = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        let col = vecs.column(k).into_owned() * c(v.sqrt(), 0.0);
        for j in 0..b {
            let mut op = CMatrix::zeros(b, b);
            op.set_column(j, &col);
            kraus.push(kron(&identity(a), &op));
        }
    }
    ChannelDense::from_kraus(kraus, &Tolerances::default())
}

/// Channel on `C^1 ⊕ C^{b}` mapping `ρ ↦ ⟨0|ρ|0⟩ |0⟩⟨0| ⊕ tr(Π ρ) ω`.
pub fn two_block_replacer(omega: &DensityMatrix) -> Result<ChannelDense> {
    let b = omega.dim();
    let dim = 1 + b;
    let (vals, vecs) = hermitian_eigen(omega.matrix());
    let mut kraus = vec![linalg::matrix_unit(dim, 0, 0)];
    for (k, &v) in vals.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        for j in 0..b {
            let mut op = CMatrix::zeros(dim, dim);
            for r in 0..b {
                op[(1 + r, 1 + j)] = vecs[(r, k)] * c(v.sqrt(), 0.0);
            }
            kraus.push(op);
        }
    }
    ChannelDense::from_kraus(kraus, &Tolerances::default())
}
