//! Small dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

/// Replaces `m` by `(m + mᵀ)/2`.
pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// `Tr(M·M)` without forming the product.
pub fn trace_of_square(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += m[(i, j)] * m[(j, i)];
        }
    }
    acc
}

/// Entrywise absolute sum `Σ|M_ij|`.
pub fn abs_sum(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

/// `‖GᵀG − I‖_F`.
pub fn orthonormality_error(g: &DMatrix<f64>) -> f64 {
    let gtg = g.transpose() * g;
    (gtg - DMatrix::identity(g.ncols(), g.ncols())).norm()
}

/// Eigendecomposition of a symmetric matrix with eigenpairs sorted by
/// descending eigenvalue. Equal eigenvalues keep the solver's order.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(m.nrows(), order.len());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Top-`k` eigenvectors of a symmetric matrix, with their eigenvalues.
pub fn top_eigenvectors(m: &DMatrix<f64>, k: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (values, vectors) = sym_eigen_desc(m);
    (values.rows(0, k).into_owned(), vectors.columns(0, k).into_owned())
}

/// Gaussian `p×k` matrix orthonormalized by thin QR.
pub fn random_orthonormal<R: Rng + ?Sized>(p: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    assert!(k <= p && k >= 1);
    let a = DMatrix::from_fn(p, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = a.qr().q();
    q.columns(0, k).into_owned()
}

/// Singular values of `m` in descending order.
pub fn singular_values_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank with relative threshold `rel_tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values_desc(m);
    let Some(&max) = sv.first() else { return 0 };
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}
