//! Stiefel-manifold gradient ascent on the kaLDA objective.
//!
//! Each iteration computes the Euclidean gradient of `J1`, projects it with
//! `P = ∇ − G∇ᵀG`, takes the step `G ← G + ηP` with
//! `η = τ‖G‖₁/‖P‖₁` (entrywise 1-norms), and retracts with
//! `G(GᵀG)^{-1/2}` whenever orthonormality drifts past the threshold.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alignment::{objective_j1, DEGENERATE_DENOMINATOR};
use crate::baselines::fit_classical_lda;
use crate::dataset::{center, CenteringInfo, DataMatrix, LabelAssignment};
use crate::error::{KaldaError, Result};
use crate::linalg::{
    abs_sum, orthonormality_error, random_orthonormal, sym_eigen_desc, top_eigenvectors, trace_of_square,
};
use crate::scatter::{compute_scatter, ScatterSet};

/// Tolerance on `‖GᵀG − I‖_F` for a matrix to count as a [`Projection`].
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// A step may lower `J1` by at most this much before it is halved.
pub const ASCENT_SLACK: f64 = 1e-9;

/// Halvings tried on one step before the run stops.
pub const MAX_HALVINGS: usize = 20;

/// `p×k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(DMatrix<f64>);

impl Projection {
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        if g.ncols() == 0 || g.ncols() > g.nrows() {
            return Err(KaldaError::InvalidArgument(format!(
                "projection must be p×k with 1 ≤ k ≤ p, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        let err = orthonormality_error(&g);
        if !(err < ORTHONORMAL_TOL) {
            return Err(KaldaError::InvalidArgument(format!(
                "projection columns are not orthonormal (‖GᵀG − I‖_F = {err:e})"
            )));
        }
        Ok(Self(g))
    }

    /// First `k` columns of the identity.
    pub fn identity(p: usize, k: usize) -> Result<Self> {
        Self::new(DMatrix::identity(p, k))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn p(&self) -> usize {
        self.0.nrows()
    }

    pub fn k(&self) -> usize {
        self.0.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptConfig {
    pub tau: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub reortho_threshold: f64,
    /// Seeds the random-orthonormal initialization fallback.
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            tau: 0.005,
            max_iters: 1000,
            rel_tol: 1e-8,
            reortho_threshold: 1e-10,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub const TAU_RANGE: (f64, f64) = (1e-5, 0.1);

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = Self::TAU_RANGE;
        if !(self.tau >= lo && self.tau <= hi) {
            return Err(KaldaError::InvalidArgument(format!(
                "tau {} outside [{lo}, {hi}]",
                self.tau
            )));
        }
        if self.max_iters == 0 {
            return Err(KaldaError::InvalidArgument("max_iters must be positive".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(KaldaError::InvalidArgument(format!(
                "rel_tol {} must be positive",
                self.rel_tol
            )));
        }
        if !(self.reortho_threshold > 0.0) {
            return Err(KaldaError::InvalidArgument(format!(
                "reortho_threshold {} must be positive",
                self.reortho_threshold
            )));
        }
        Ok(())
    }
}

/// Per-iteration record of a run. Index 0 of `objective_values` and
/// `orthonormality` is the initial point; `step_sizes[t]` is the `η` that
/// produced iterate `t + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub objective_values: Vec<f64>,
    pub step_sizes: Vec<f64>,
    pub orthonormality: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Set when the run stopped because step halving was exhausted.
    pub stalled: bool,
}

impl FitTrace {
    pub fn initial_objective(&self) -> f64 {
        self.objective_values[0]
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_values.last().expect("trace holds the initial value")
    }
}

/// Euclidean gradient of `J1`:
/// `2A/√Tr(D²) − 2Tr(B)/Tr(D²)^{3/2} · CD` with `A = SbG`, `B = GᵀA`,
/// `C = StG`, `D = GᵀC`.
pub fn gradient_j1(g: &DMatrix<f64>, scatter: &ScatterSet) -> Result<DMatrix<f64>> {
    if g.nrows() != scatter.p() {
        return Err(KaldaError::dims(format!(
            "projection has {} rows, scatter is {}",
            g.nrows(),
            scatter.p()
        )));
    }
    let a = &scatter.sb * g;
    let b = g.transpose() * &a;
    let c = &scatter.st * g;
    let d = g.transpose() * &c;
    let tr_d2 = trace_of_square(&d);
    if !(tr_d2 >= DEGENERATE_DENOMINATOR) {
        return Err(KaldaError::DegenerateSubspace(tr_d2));
    }
    let root = tr_d2.sqrt();
    Ok(a * (2.0 / root) - c * d * (2.0 * b.trace() / (tr_d2 * root)))
}

/// `grad − G gradᵀ G`.
pub fn stiefel_tangent(g: &DMatrix<f64>, grad: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if g.shape() != grad.shape() {
        return Err(KaldaError::dims(format!(
            "G is {:?}, gradient is {:?}",
            g.shape(),
            grad.shape()
        )));
    }
    Ok(grad - g * grad.transpose() * g)
}

/// `η = τ‖G‖₁/‖P‖₁`. A vanishing `P` is reported as
/// [`KaldaError::StationaryPoint`].
pub fn step_size(g: &DMatrix<f64>, pgrad: &DMatrix<f64>, tau: f64) -> Result<f64> {
    let denom = abs_sum(pgrad);
    if !(denom >= DEGENERATE_DENOMINATOR) {
        return Err(KaldaError::StationaryPoint);
    }
    Ok(tau * abs_sum(g) / denom)
}

/// `G(GᵀG)^{-1/2}` via the symmetric eigendecomposition of `GᵀG`.
pub fn reorthonormalize(g: &DMatrix<f64>) -> Result<Projection> {
    if g.ncols() == 0 || g.ncols() > g.nrows() {
        return Err(KaldaError::InvalidArgument(format!(
            "cannot orthonormalize a {}x{} matrix",
            g.nrows(),
            g.ncols()
        )));
    }
    let gtg = g.transpose() * g;
    let (values, vectors) = sym_eigen_desc(&gtg);
    let largest = values[0];
    let smallest = values[values.len() - 1];
    if !(largest > 0.0) || smallest < 1e-12 * largest {
        let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
        return Err(KaldaError::RankDeficient(ratio));
    }
    let inv_root = DVector::from_iterator(values.len(), values.iter().map(|v| 1.0 / v.sqrt()));
    let w = &vectors * DMatrix::from_diagonal(&inv_root) * vectors.transpose();
    Projection::new(g * w)
}

/// Where the starting point of a fit came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitSource {
    ClassicalLda,
    BetweenScatterEigenvectors,
    Random,
}

/// Orthonormalized classical-LDA solution, falling back to the top
/// eigenvectors of `Sb`, then to a seeded random orthonormal matrix.
pub fn initial_projection(scatter: &ScatterSet, k: usize, seed: u64) -> Result<(Projection, InitSource)> {
    let usable = |g: &Projection| objective_j1(g.matrix(), scatter).is_ok();
    if let Ok(sol) = fit_classical_lda(scatter, k) {
        if let Ok(g) = reorthonormalize(&sol.eigenvectors) {
            if usable(&g) {
                return Ok((g, InitSource::ClassicalLda));
            }
        }
    }
    if k <= scatter.p() {
        let (_, vecs) = top_eigenvectors(&scatter.sb, k);
        if let Ok(g) = Projection::new(vecs) {
            if usable(&g) {
                return Ok((g, InitSource::BetweenScatterEigenvectors));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Projection::new(random_orthonormal(scatter.p(), k, &mut rng))?;
    Ok((g, InitSource::Random))
}

/// Runs the ascent from `init` until the relative change in `J1` drops
/// below `rel_tol`, the tangent gradient vanishes, or `max_iters` is hit.
pub fn optimize(scatter: &ScatterSet, init: Projection, cfg: &OptConfig) -> Result<(Projection, FitTrace)> {
    cfg.validate()?;
    let mut g = init;
    let mut j = objective_j1(g.matrix(), scatter)?;
    let mut trace = FitTrace {
        objective_values: vec![j],
        step_sizes: Vec::new(),
        orthonormality: vec![orthonormality_error(g.matrix())],
        iterations_run: 0,
        converged: false,
        stalled: false,
    };

    for _ in 0..cfg.max_iters {
        let grad = gradient_j1(g.matrix(), scatter)?;
        let tangent = stiefel_tangent(g.matrix(), &grad)?;
        let mut eta = match step_size(g.matrix(), &tangent, cfg.tau) {
            Ok(eta) => eta,
            Err(KaldaError::StationaryPoint) => {
                trace.converged = true;
                break;
            }
            Err(e) => return Err(e),
        };

        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let raw = g.matrix() + &tangent * eta;
            let candidate = if orthonormality_error(&raw) > cfg.reortho_threshold {
                reorthonormalize(&raw)?
            } else {
                Projection::new(raw)?
            };
            let j_new = objective_j1(candidate.matrix(), scatter)?;
            if j_new >= j - ASCENT_SLACK {
                accepted = Some((candidate, j_new));
                break;
            }
            eta *= 0.5;
        }
        let Some((next, j_new)) = accepted else {
            trace.stalled = true;
            break;
        };

        // A step that lowers J1, even within the slack, has overshot the
        // optimum at the current step length. It is recorded as a zero-length
        // step, which ends the run with a zero objective change.
        if j_new < j {
            eta = 0.0;
        } else {
            g = next;
        }
        let rel_change = (j.max(j_new) - j) / j.abs().max(1e-12);
        let converging = rel_change < cfg.rel_tol;
        j = j.max(j_new);
        trace.iterations_run += 1;
        trace.objective_values.push(j);
        trace.step_sizes.push(eta);
        trace.orthonormality.push(orthonormality_error(g.matrix()));
        if converging {
            trace.converged = true;
            break;
        }
    }
    Ok((g, trace))
}

/// A fitted kaLDA model: projection, the centering used on the training
/// data, and the optimization trace.
#[derive(Debug, Clone)]
pub struct KaldaFit {
    pub projection: Projection,
    pub trace: FitTrace,
    pub centering: CenteringInfo,
    pub init: Projection,
    pub init_source: InitSource,
}

/// Centers `x`, builds the scatter matrices for the labels' mode, and
/// maximizes `J1` over `p×k` orthonormal projections.
pub fn fit_kalda(x: &DataMatrix, labels: &LabelAssignment, k: usize, cfg: &OptConfig) -> Result<KaldaFit> {
    cfg.validate()?;
    if k == 0 || k > x.p() {
        return Err(KaldaError::InvalidArgument(format!(
            "subspace dimension {k} must lie in 1..={}",
            x.p()
        )));
    }
    let (centered, centering) = center(x, labels)?;
    let scatter = compute_scatter(&centered, labels)?;
    let (init, init_source) = initial_projection(&scatter, k, cfg.seed)?;
    let (projection, trace) = optimize(&scatter, init.clone(), cfg)?;
    Ok(KaldaFit {
        projection,
        trace,
        centering,
        init,
        init_source,
    })
}
