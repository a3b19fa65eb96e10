//! Kernel alignment, the data/label kernels, and the kaLDA objective `J1`.
//!
//! Throughout, `Tr(M)²` denotes `Tr(M·M)`, the trace of the matrix square.

use nalgebra::DMatrix;

use crate::dataset::{build_indicators, DataMatrix, IndicatorSet, LabelAssignment, LabelMode};
use crate::error::{KaldaError, Result};
use crate::linalg::trace_of_square;
use crate::scatter::{scatter_multi_def, scatter_single_def, ScatterSet};

/// Below this, `Tr((GᵀStG)²)` is treated as zero.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-300;

/// Symmetric, nonzero `n×n` kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix(DMatrix<f64>);

impl KernelMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(KaldaError::dims(format!(
                "kernel must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let norm = m.norm();
        if norm == 0.0 {
            return Err(KaldaError::DegenerateProblem("zero kernel".into()));
        }
        let asym = (&m - m.transpose()).norm();
        if asym > 1e-10 * norm {
            return Err(KaldaError::InvalidArgument(format!(
                "kernel is not symmetric (relative asymmetry {:e})",
                asym / norm
            )));
        }
        Ok(Self(m))
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// `Tr(K1·K2) / (√Tr(K1·K1) · √Tr(K2·K2))`.
///
/// Lies in `[0, 1]` for positive semi-definite inputs and equals 1 iff the
/// kernels are proportional. Indefinite symmetric inputs are accepted but the
/// range guarantee does not apply.
pub fn kernel_alignment(k1: &KernelMatrix, k2: &KernelMatrix) -> Result<f64> {
    if k1.n() != k2.n() {
        return Err(KaldaError::dims(format!("kernel sizes {} and {}", k1.n(), k2.n())));
    }
    let (a, b) = (k1.as_matrix(), k2.as_matrix());
    // Tr(AB) = Σ A_ij B_ji = ⟨A, B⟩_F for symmetric B
    let cross = a.dot(&b.transpose());
    Ok(cross / (a.dot(a).sqrt() * b.dot(b).sqrt()))
}

/// `K1 = XᵀX`, `K2 = YYᵀ`.
pub fn build_kernels_single(x: &DataMatrix, indicators: &IndicatorSet) -> Result<(KernelMatrix, KernelMatrix)> {
    let IndicatorSet::Single { y } = indicators else {
        return Err(KaldaError::Unsupported(
            "single-label kernels need a single-label indicator".into(),
        ));
    };
    if y.nrows() != x.n() {
        return Err(KaldaError::dims(format!(
            "{} samples in data, {} in indicator",
            x.n(),
            y.nrows()
        )));
    }
    let xm = x.as_matrix();
    Ok((
        KernelMatrix::new(xm.transpose() * xm)?,
        KernelMatrix::new(y * y.transpose())?,
    ))
}

/// `K1 = Ω^{1/2} XᵀX Ω^{1/2}`, `K2 = Ω^{-1/2} ỸỸᵀ Ω^{-1/2}`.
pub fn build_kernels_multi(x: &DataMatrix, indicators: &IndicatorSet) -> Result<(KernelMatrix, KernelMatrix)> {
    let n = indicators.n();
    if n != x.n() {
        return Err(KaldaError::dims(format!(
            "{} samples in data, {} in indicator",
            x.n(),
            n
        )));
    }
    let omega = indicators.weights();
    let root: Vec<f64> = omega.iter().map(|w| w.sqrt()).collect();
    let xm = x.as_matrix();
    let gram = xm.transpose() * xm;
    let y = indicators.normalized();
    let label = y * y.transpose();
    let k1 = DMatrix::from_fn(n, n, |i, j| root[i] * gram[(i, j)] * root[j]);
    let k2 = DMatrix::from_fn(n, n, |i, j| label[(i, j)] / (root[i] * root[j]));
    Ok((KernelMatrix::new(k1)?, KernelMatrix::new(k2)?))
}

/// The data-independent factor `c` relating alignment to the scatter ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentConstant(pub f64);

impl AlignmentConstant {
    /// Closed form from the indicator structure, without forming an `n×n`
    /// matrix: `1/√K` in single mode, `1/‖ỸᵀΩ⁻¹Ỹ‖_F` in multi mode.
    pub fn from_indicators(indicators: &IndicatorSet) -> Self {
        match indicators {
            IndicatorSet::Single { y } => AlignmentConstant(1.0 / (y.ncols() as f64).sqrt()),
            IndicatorSet::Multi { y_tilde, omega, .. } => {
                let mut scaled = y_tilde.clone();
                for (mut row, &w) in scaled.row_iter_mut().zip(omega.iter()) {
                    row /= w;
                }
                let m = y_tilde.transpose() * scaled;
                AlignmentConstant(1.0 / m.norm())
            }
        }
    }

    /// `1/√Tr(K2·K2)` from a materialized label kernel.
    pub fn from_label_kernel(k2: &KernelMatrix) -> Self {
        AlignmentConstant(1.0 / trace_of_square(k2.as_matrix()).sqrt())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `J1(G) = Tr(GᵀSbG) / √Tr((GᵀStG)²)`.
///
/// `G` is usually orthonormal; the value is invariant to rescaling `G`, so
/// this accepts any `p×k` matrix.
pub fn objective_j1(g: &DMatrix<f64>, scatter: &ScatterSet) -> Result<f64> {
    if g.nrows() != scatter.p() {
        return Err(KaldaError::dims(format!(
            "projection has {} rows, scatter is {}x{}",
            g.nrows(),
            scatter.p(),
            scatter.p()
        )));
    }
    let numerator = (g.transpose() * &scatter.sb * g).trace();
    let d = g.transpose() * &scatter.st * g;
    let denom_sq = trace_of_square(&d);
    if !(denom_sq >= DEGENERATE_DENOMINATOR) {
        return Err(KaldaError::DegenerateSubspace(denom_sq));
    }
    Ok(numerator / denom_sq.sqrt())
}

/// Both sides of the subspace alignment identity for centered data:
/// `lhs = A(K̃1, K2)` from kernels of `GᵀX`, `rhs = c·J1(G)` from
/// definitional scatter matrices.
pub fn subspace_alignment_identity_check(
    x: &DataMatrix,
    labels: &LabelAssignment,
    g: &DMatrix<f64>,
) -> Result<(f64, f64)> {
    let indicators = build_indicators(labels);
    let projected = x.project(g)?;
    let (k1, k2) = match labels.mode() {
        LabelMode::Single => build_kernels_single(&projected, &indicators)?,
        LabelMode::Multi => build_kernels_multi(&projected, &indicators)?,
    };
    let lhs = kernel_alignment(&k1, &k2)?;
    let scatter = match labels.mode() {
        LabelMode::Single => scatter_single_def(x, labels)?,
        LabelMode::Multi => scatter_multi_def(x, labels)?,
    };
    let c = AlignmentConstant::from_label_kernel(&k2).value();
    Ok((lhs, c * objective_j1(g, &scatter)?))
}
