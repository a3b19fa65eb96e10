//! Comparison subspace solvers: classical LDA (also the kaLDA initializer),
//! the iterative trace-ratio method, and maximum margin criterion (MMC).

use nalgebra::{DMatrix, DVector};

use crate::error::{KaldaError, Result};
use crate::linalg::{symmetrize, top_eigenvectors};
use crate::manifold::Projection;
use crate::scatter::ScatterSet;

/// Relative ridge added to `St` before inverting it.
pub const ST_RIDGE: f64 = 1e-6;

/// Iteration cap for [`fit_trace_ratio`].
pub const TRACE_RATIO_MAX_ITERS: usize = 200;

/// Leading generalized eigenpairs of `Sb v = λ St_reg v`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigenSolution {
    /// Descending.
    pub eigenvalues: DVector<f64>,
    /// Unit-norm columns; `St_reg`-orthogonal, not orthonormal.
    pub eigenvectors: DMatrix<f64>,
    /// The regularized total scatter the pencil was solved against.
    pub st_reg: DMatrix<f64>,
}

/// `St + ε·I` with `ε = ST_RIDGE · Tr(St)/p`.
pub fn regularized_total_scatter(st: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = st.nrows();
    let tr = st.trace();
    if !(tr > 0.0) {
        return Err(KaldaError::DegenerateProblem("total scatter has zero trace".into()));
    }
    let eps = ST_RIDGE * tr / p as f64;
    Ok(st + DMatrix::identity(p, p) * eps)
}

fn check_dim(scatter: &ScatterSet, k: usize) -> Result<()> {
    if k == 0 || k > scatter.p() {
        return Err(KaldaError::InvalidArgument(format!(
            "subspace dimension {k} must lie in 1..={}",
            scatter.p()
        )));
    }
    Ok(())
}

/// Classical LDA: top-`k` eigenvectors of `St_reg⁻¹ Sb`, solved as the
/// symmetric-definite pencil `(Sb, St_reg)` through a Cholesky factor.
pub fn fit_classical_lda(scatter: &ScatterSet, k: usize) -> Result<GeneralizedEigenSolution> {
    check_dim(scatter, k)?;
    if scatter.sb.amax() == 0.0 {
        return Err(KaldaError::DegenerateProblem("between-class scatter is zero".into()));
    }
    let st_reg = regularized_total_scatter(&scatter.st)?;
    let chol = st_reg
        .clone()
        .cholesky()
        .ok_or_else(|| KaldaError::DegenerateProblem("regularized total scatter is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ Sb L⁻ᵀ
    let left = l
        .solve_lower_triangular(&scatter.sb)
        .expect("cholesky factor is nonsingular");
    let mut c = l
        .solve_lower_triangular(&left.transpose())
        .expect("cholesky factor is nonsingular");
    symmetrize(&mut c);
    let (eigenvalues, w) = top_eigenvectors(&c, k);
    let mut v = l.tr_solve_lower_triangular(&w).expect("cholesky factor is nonsingular");
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    Ok(GeneralizedEigenSolution {
        eigenvalues,
        eigenvectors: v,
        st_reg,
    })
}

/// Result of [`fit_trace_ratio`].
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRatioFit {
    pub projection: Projection,
    pub lambda: f64,
    /// `λ_0 = 0, λ_1, …`; non-decreasing.
    pub lambdas: Vec<f64>,
    pub converged: bool,
}

/// Iterative trace-ratio solver for `max Tr(GᵀSbG)/Tr(GᵀStG)`, `GᵀG = I`.
pub fn fit_trace_ratio(scatter: &ScatterSet, k: usize, tol: f64) -> Result<TraceRatioFit> {
    check_dim(scatter, k)?;
    let mut lambda = 0.0;
    let mut lambdas = vec![lambda];
    let mut best = None;
    let mut converged = false;
    for _ in 0..TRACE_RATIO_MAX_ITERS {
        let mut m = &scatter.sb - &scatter.st * lambda;
        symmetrize(&mut m);
        let (_, g) = top_eigenvectors(&m, k);
        let num = (g.transpose() * &scatter.sb * &g).trace();
        let den = (g.transpose() * &scatter.st * &g).trace();
        if !(den > 0.0) {
            return Err(KaldaError::DegenerateProblem(
                "total scatter vanishes on the trace-ratio subspace".into(),
            ));
        }
        let next = num / den;
        // Exact updates never lower λ; a drop is rounding at the fixed point,
        // so the previous subspace is kept.
        if next < lambda && best.is_some() {
            converged = true;
            break;
        }
        lambdas.push(next);
        best = Some(g);
        let delta = (next - lambda).abs();
        lambda = next;
        if delta < tol {
            converged = true;
            break;
        }
    }
    let g = best.expect("at least one iteration runs");
    Ok(TraceRatioFit {
        projection: Projection::new(g)?,
        lambda,
        lambdas,
        converged,
    })
}

/// Orthonormal eigenvector projection with its eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenProjection {
    pub projection: Projection,
    pub eigenvalues: DVector<f64>,
}

/// MMC: top-`k` eigenvectors of `Sb − Sw`. Needs `Sw`, so single-label only.
pub fn fit_mmc(scatter: &ScatterSet, k: usize) -> Result<EigenProjection> {
    check_dim(scatter, k)?;
    let sw = scatter
        .sw
        .as_ref()
        .ok_or_else(|| KaldaError::Unsupported("MMC requires a within-class scatter (single-label data)".into()))?;
    let mut m = &scatter.sb - sw;
    symmetrize(&mut m);
    let (eigenvalues, g) = top_eigenvectors(&m, k);
    Ok(EigenProjection {
        projection: Projection::new(g)?,
        eigenvalues,
    })
}
