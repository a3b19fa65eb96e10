//! Between-class, within-class and total scatter matrices.
//!
//! Two construction routes exist for each label regime: the definitional
//! sums over class means and samples, and the factored indicator forms
//! `Sb = X Y Yᵀ Xᵀ`, `St = X Ω Xᵀ`. The factored route is what the solvers
//! use; the definitional route exists as an independent cross-check.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{build_indicators, DataMatrix, IndicatorSet, LabelAssignment, LabelMode};
use crate::error::{KaldaError, Result};
use crate::linalg::symmetrize;

/// Symmetric `p×p` scatter matrices. `sw` is absent for multi-label data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSet {
    pub sb: DMatrix<f64>,
    pub st: DMatrix<f64>,
    pub sw: Option<DMatrix<f64>>,
}

impl ScatterSet {
    /// Builds a scatter set from raw matrices, symmetrizing each.
    pub fn new(sb: DMatrix<f64>, st: DMatrix<f64>, sw: Option<DMatrix<f64>>) -> Result<Self> {
        let p = sb.nrows();
        let square = |m: &DMatrix<f64>| m.nrows() == p && m.ncols() == p;
        if !square(&sb) || !square(&st) || sw.as_ref().is_some_and(|w| !square(w)) {
            return Err(KaldaError::dims("scatter matrices must be square and equally sized"));
        }
        let mut s = Self { sb, st, sw };
        symmetrize(&mut s.sb);
        symmetrize(&mut s.st);
        if let Some(w) = s.sw.as_mut() {
            symmetrize(w);
        }
        Ok(s)
    }

    pub fn p(&self) -> usize {
        self.sb.nrows()
    }
}

fn check_n(x: &DataMatrix, n: usize) -> Result<()> {
    if x.n() != n {
        return Err(KaldaError::dims(format!("{} samples in data, {} in labels", x.n(), n)));
    }
    Ok(())
}

fn add_outer(acc: &mut DMatrix<f64>, weight: f64, v: &DVector<f64>) {
    acc.ger(weight, v, v, 1.0);
}

/// Definitional single-label scatters: class-mean sums for `Sb` and `Sw`,
/// with `St = Sb + Sw`.
pub fn scatter_single_def(x: &DataMatrix, labels: &LabelAssignment) -> Result<ScatterSet> {
    check_n(x, labels.len())?;
    if labels.mode() != LabelMode::Single {
        return Err(KaldaError::Unsupported(
            "single-label scatter needs single-label data".into(),
        ));
    }
    let xm = x.as_matrix();
    let p = x.p();
    let k = labels.num_classes();
    let mean = xm.column_mean();
    let mut class_sums = vec![DVector::zeros(p); k];
    let sizes = labels.class_sizes();
    for (i, col) in xm.column_iter().enumerate() {
        class_sums[labels.class_of(i)] += col;
    }
    let class_means: Vec<DVector<f64>> = class_sums
        .into_iter()
        .zip(&sizes)
        .map(|(s, &nk)| s / nk as f64)
        .collect();

    let mut sb = DMatrix::zeros(p, p);
    for (mk, &nk) in class_means.iter().zip(&sizes) {
        add_outer(&mut sb, nk as f64, &(mk - &mean));
    }
    let mut sw = DMatrix::zeros(p, p);
    for (i, col) in xm.column_iter().enumerate() {
        add_outer(&mut sw, 1.0, &(col - &class_means[labels.class_of(i)]));
    }
    let st = &sb + &sw;
    ScatterSet::new(sb, st, Some(sw))
}

/// Factored single-label scatters: `Sb = XYYᵀXᵀ`, `St = XXᵀ`, `Sw = St − Sb`.
pub fn scatter_single_matrix(x: &DataMatrix, indicators: &IndicatorSet) -> Result<ScatterSet> {
    let IndicatorSet::Single { y } = indicators else {
        return Err(KaldaError::Unsupported(
            "single-label scatter needs a single-label indicator".into(),
        ));
    };
    check_n(x, y.nrows())?;
    let xm = x.as_matrix();
    let xy = xm * y;
    let sb = &xy * xy.transpose();
    let st = xm * xm.transpose();
    let sw = &st - &sb;
    ScatterSet::new(sb, st, Some(sw))
}

/// Definitional multi-label scatters over `Z`-weighted class means and the
/// `ρ`-weighted global mean. Accepts single-label data as the `ρ = 1` case.
pub fn scatter_multi_def(x: &DataMatrix, labels: &LabelAssignment) -> Result<ScatterSet> {
    check_n(x, labels.len())?;
    let xm = x.as_matrix();
    let p = x.p();
    let k = labels.num_classes();
    let sizes = labels.class_sizes();
    let rho = labels.label_counts();
    if rho.contains(&0) {
        return Err(KaldaError::DegenerateProblem("sample with no labels".into()));
    }
    let total: usize = sizes.iter().sum();

    let mut mean = DVector::zeros(p);
    for (col, &r) in xm.column_iter().zip(&rho) {
        mean.axpy(r as f64, &col, 1.0);
    }
    mean /= total as f64;

    let mut class_means = vec![DVector::zeros(p); k];
    for (i, col) in xm.column_iter().enumerate() {
        for &c in &labels.memberships()[i] {
            class_means[c] += col;
        }
    }
    for (mk, &nk) in class_means.iter_mut().zip(&sizes) {
        *mk /= nk as f64;
    }

    let mut sb = DMatrix::zeros(p, p);
    for (mk, &nk) in class_means.iter().zip(&sizes) {
        add_outer(&mut sb, nk as f64, &(mk - &mean));
    }
    let mut st = DMatrix::zeros(p, p);
    for c in 0..k {
        for (i, col) in xm.column_iter().enumerate() {
            if labels.memberships()[i].binary_search(&c).is_ok() {
                add_outer(&mut st, 1.0, &(col - &mean));
            }
        }
    }
    ScatterSet::new(sb, st, None)
}

/// Factored multi-label scatters: `Sb = XỸỸᵀXᵀ`, `St = XΩXᵀ`.
pub fn scatter_multi_matrix(x: &DataMatrix, indicators: &IndicatorSet) -> Result<ScatterSet> {
    check_n(x, indicators.n())?;
    let xm = x.as_matrix();
    let xy = xm * indicators.normalized();
    let sb = &xy * xy.transpose();
    let omega = indicators.weights();
    let mut xw = xm.clone();
    for (mut col, &w) in xw.column_iter_mut().zip(omega.iter()) {
        col *= w;
    }
    let st = &xw * xm.transpose();
    ScatterSet::new(sb, st, None)
}

/// Production path: factored scatters for the labels' mode. `x` must already
/// be centered for that mode.
pub fn compute_scatter(x: &DataMatrix, labels: &LabelAssignment) -> Result<ScatterSet> {
    let ind = build_indicators(labels);
    match labels.mode() {
        LabelMode::Single => scatter_single_matrix(x, &ind),
        LabelMode::Multi => scatter_multi_matrix(x, &ind),
    }
}
