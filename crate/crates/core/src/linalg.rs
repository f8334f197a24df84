//! Dense complex matrix helpers.
//!
//! Vectorization is column stacking throughout: `vec(X)[i + j*d] = X[i, j]`,
//! which coincides with nalgebra's column-major storage. Under this
//! convention `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// Matrix unit `|i⟩⟨j|`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// ascending. The input is symmetrized first.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&x| c(f(x), 0.0))));
    &vectors * diag * vectors.adjoint()
}

/// Orthonormal basis (as columns) of the span of the given columns, keeping
/// singular values above `rel_tol` times the largest one.
pub fn column_span(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > rel_tol * top).collect();
    let mut basis = CMatrix::zeros(m.nrows(), keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        basis.set_column(dst, &u.column(src));
    }
    basis
}

/// Orthonormal basis of the null space of `m`: right singular directions with
/// singular value at most `abs_tol`.
pub fn null_space(m: &CMatrix, abs_tol: f64) -> CMatrix {
    let n = m.ncols();
    // Pad to at least square so the SVD returns a complete right basis.
    let padded = if m.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] <= abs_tol).collect();
    let mut basis = CMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        let row = v_t.row(src).adjoint();
        basis.set_column(dst, &row);
    }
    basis
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace over the second factor of a `da·db`-dimensional operator
/// ordered as `C^da ⊗ C^db`.
pub fn partial_trace_second(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum())
}

/// Partial trace over the first factor of `C^da ⊗ C^db`.
pub fn partial_trace_first(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum())
}

pub fn pauli_matrices() -> [CMatrix; 4] {
    [
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)]),
    ]
}
