//! KNN classification in a projected space, accuracy/F1 scoring, and
//! seeded k-fold cross-validation over any subspace method.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{fit_classical_lda, fit_mmc, fit_trace_ratio};
use crate::dataset::{center, DataMatrix, LabelAssignment, LabelMode};
use crate::error::{KaldaError, LabelErrorKind, Result};
use crate::manifold::{initial_projection, optimize, OptConfig};
use crate::scatter::{compute_scatter, ScatterSet};

/// Predicted class ids. In multi mode a set may be empty when no class
/// reaches the vote threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    pub mode: LabelMode,
    pub predictions: Vec<Vec<usize>>,
}

/// Labels the columns of `test` by their `knn` nearest columns of `train`
/// (Euclidean). Single mode takes the majority class, breaking ties by the
/// nearest neighbor among tied classes; multi mode assigns class `c` when
/// more than `knn/2` neighbors carry it. Distance ties resolve by training
/// index.
pub fn knn_predict(
    train: &DataMatrix,
    train_labels: &LabelAssignment,
    test: &DataMatrix,
    knn: usize,
) -> Result<PredictionSet> {
    if train.n() != train_labels.len() {
        return Err(KaldaError::dims(format!(
            "{} training samples, {} training labels",
            train.n(),
            train_labels.len()
        )));
    }
    if train.p() != test.p() {
        return Err(KaldaError::dims(format!(
            "train has dimension {}, test has {}",
            train.p(),
            test.p()
        )));
    }
    if knn == 0 || knn > train.n() {
        return Err(KaldaError::InvalidArgument(format!(
            "knn = {knn} must lie in 1..={}",
            train.n()
        )));
    }
    let tm = train.as_matrix();
    let k = train_labels.num_classes();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(train.n());
    let mut predictions = Vec::with_capacity(test.n());
    for q in test.as_matrix().column_iter() {
        order.clear();
        order.extend(tm.column_iter().enumerate().map(|(i, c)| ((c - q).norm_squared(), i)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let neighbors = &order[..knn];

        let mut votes = vec![0usize; k];
        for &(_, i) in neighbors {
            for &c in &train_labels.memberships()[i] {
                votes[c] += 1;
            }
        }
        let predicted = match train_labels.mode() {
            LabelMode::Single => {
                let best = *votes.iter().max().expect("K ≥ 1");
                let winner = neighbors
                    .iter()
                    .map(|&(_, i)| train_labels.class_of(i))
                    .find(|&c| votes[c] == best)
                    .expect("winning class occurs among neighbors");
                vec![winner]
            }
            LabelMode::Multi => (0..k).filter(|&c| 2 * votes[c] > knn).collect(),
        };
        predictions.push(predicted);
    }
    Ok(PredictionSet {
        mode: train_labels.mode(),
        predictions,
    })
}

/// Accuracy (plain in single mode, class-averaged binary accuracy in multi
/// mode) and macro/micro F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Confusion {
    tp: usize,
    fp: usize,
    fn_: usize,
    tn: usize,
}

impl Confusion {
    // 2PR/(P+R) written on counts; 0 whenever precision or recall is 0/0.
    fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if self.tp == 0 || denom == 0 {
            0.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }
}

fn confusions(pred: &[Vec<usize>], truth: &[Vec<usize>], num_classes: usize) -> Vec<Confusion> {
    let mut out = vec![Confusion::default(); num_classes];
    for (p, t) in pred.iter().zip(truth) {
        for (c, conf) in out.iter_mut().enumerate() {
            match (p.contains(&c), t.contains(&c)) {
                (true, true) => conf.tp += 1,
                (true, false) => conf.fp += 1,
                (false, true) => conf.fn_ += 1,
                (false, false) => conf.tn += 1,
            }
        }
    }
    out
}

fn f1_averages(conf: &[Confusion]) -> (f64, f64) {
    let macro_f1 = conf.iter().map(Confusion::f1).sum::<f64>() / conf.len() as f64;
    let pooled = conf.iter().fold(Confusion::default(), |acc, c| Confusion {
        tp: acc.tp + c.tp,
        fp: acc.fp + c.fp,
        fn_: acc.fn_ + c.fn_,
        tn: acc.tn + c.tn,
    });
    (macro_f1, pooled.f1())
}

fn score_sets(mode: LabelMode, pred: &[Vec<usize>], truth: &[Vec<usize>], num_classes: usize) -> Scores {
    let conf = confusions(pred, truth, num_classes);
    let (macro_f1, micro_f1) = f1_averages(&conf);
    let n = truth.len() as f64;
    let accuracy = match mode {
        LabelMode::Single => pred.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / n,
        LabelMode::Multi => conf.iter().map(|c| (c.tp + c.tn) as f64 / n).sum::<f64>() / num_classes as f64,
    };
    Scores {
        accuracy,
        macro_f1,
        micro_f1,
    }
}

fn check_scoring(pred: &PredictionSet, truth: &LabelAssignment, mode: LabelMode) -> Result<()> {
    if pred.mode != mode || truth.mode() != mode {
        return Err(KaldaError::Unsupported(format!(
            "{mode}-label scoring got {} predictions and {} truth",
            pred.mode,
            truth.mode()
        )));
    }
    if pred.predictions.len() != truth.len() {
        return Err(KaldaError::dims(format!(
            "{} predictions for {} samples",
            pred.predictions.len(),
            truth.len()
        )));
    }
    Ok(())
}

pub fn score_single(pred: &PredictionSet, truth: &LabelAssignment) -> Result<Scores> {
    check_scoring(pred, truth, LabelMode::Single)?;
    Ok(score_sets(
        LabelMode::Single,
        &pred.predictions,
        truth.memberships(),
        truth.num_classes(),
    ))
}

/// Multi-label scores; `accuracy` is the per-class binary accuracy averaged
/// over classes. An empty prediction set counts as negative for every class.
pub fn score_multi(pred: &PredictionSet, truth: &LabelAssignment) -> Result<Scores> {
    check_scoring(pred, truth, LabelMode::Multi)?;
    Ok(score_sets(
        LabelMode::Multi,
        &pred.predictions,
        truth.memberships(),
        truth.num_classes(),
    ))
}

/// Anything that maps training scatter matrices to a `p×k` projection.
pub trait SubspaceMethod {
    fn name(&self) -> String;

    fn projection(&self, scatter: &ScatterSet, k: usize) -> Result<DMatrix<f64>>;
}

/// The built-in subspace methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Kalda(OptConfig),
    Lda,
    TraceRatio { tol: f64 },
    Mmc,
}

impl Method {
    pub const TRACE_RATIO_TOL: f64 = 1e-10;

    pub fn id(&self) -> &'static str {
        match self {
            Method::Kalda(_) => "kalda",
            Method::Lda => "lda",
            Method::TraceRatio { .. } => "tr",
            Method::Mmc => "mmc",
        }
    }
}

impl FromStr for Method {
    type Err = KaldaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kalda" => Ok(Method::Kalda(OptConfig::default())),
            "lda" => Ok(Method::Lda),
            "tr" => Ok(Method::TraceRatio {
                tol: Self::TRACE_RATIO_TOL,
            }),
            "mmc" => Ok(Method::Mmc),
            other => Err(KaldaError::InvalidArgument(format!(
                "unknown method {other:?} (expected kalda, lda, tr or mmc)"
            ))),
        }
    }
}

impl SubspaceMethod for Method {
    fn name(&self) -> String {
        self.id().to_string()
    }

    fn projection(&self, scatter: &ScatterSet, k: usize) -> Result<DMatrix<f64>> {
        match self {
            Method::Kalda(cfg) => {
                let (init, _) = initial_projection(scatter, k, cfg.seed)?;
                Ok(optimize(scatter, init, cfg)?.0.into_matrix())
            }
            Method::Lda => Ok(fit_classical_lda(scatter, k)?.eigenvectors),
            Method::TraceRatio { tol } => Ok(fit_trace_ratio(scatter, k, *tol)?.projection.into_matrix()),
            Method::Mmc => Ok(fit_mmc(scatter, k)?.projection.into_matrix()),
        }
    }
}

/// Per-fold and aggregate cross-validation results.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub folds: Vec<Scores>,
    pub mean: Scores,
    /// Sample standard deviation across folds.
    pub std_dev: Scores,
    /// Fold index of each sample.
    pub fold_of: Vec<usize>,
}

fn aggregate(folds: &[Scores]) -> (Scores, Scores) {
    let n = folds.len() as f64;
    let stat = |f: fn(&Scores) -> f64| {
        let mean = folds.iter().map(f).sum::<f64>() / n;
        let var = folds.iter().map(|s| (f(s) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, var.sqrt())
    };
    let (a, sa) = stat(|s| s.accuracy);
    let (ma, sma) = stat(|s| s.macro_f1);
    let (mi, smi) = stat(|s| s.micro_f1);
    (
        Scores {
            accuracy: a,
            macro_f1: ma,
            micro_f1: mi,
        },
        Scores {
            accuracy: sa,
            macro_f1: sma,
            micro_f1: smi,
        },
    )
}

/// Seeded fold assignment: a uniform shuffle cut into `folds` contiguous
/// chunks whose sizes differ by at most one.
pub fn assign_folds(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for f in 0..folds {
        for &i in &idx[f * n / folds..(f + 1) * n / folds] {
            fold_of[i] = f;
        }
    }
    fold_of
}

/// k-fold cross-validation: per fold, center on the training split, build
/// scatters, fit `method`, project both splits with the training centering,
/// classify with KNN and score.
pub fn cross_validate(
    x: &DataMatrix,
    labels: &LabelAssignment,
    method: &dyn SubspaceMethod,
    k: usize,
    folds: usize,
    knn: usize,
    seed: u64,
) -> Result<EvalReport> {
    let n = x.n();
    if n != labels.len() {
        return Err(KaldaError::dims(format!(
            "{n} samples in data, {} in labels",
            labels.len()
        )));
    }
    if folds < 2 || folds > n {
        return Err(KaldaError::InvalidArgument(format!(
            "folds = {folds} must lie in 2..={n}"
        )));
    }
    if k == 0 || k > x.p() {
        return Err(KaldaError::InvalidArgument(format!(
            "subspace dimension {k} must lie in 1..={}",
            x.p()
        )));
    }
    let fold_of = assign_folds(n, folds, seed);
    let mut scores = Vec::with_capacity(folds);
    for f in 0..folds {
        let train_idx: Vec<usize> = (0..n).filter(|&i| fold_of[i] != f).collect();
        let test_idx: Vec<usize> = (0..n).filter(|&i| fold_of[i] == f).collect();
        let train_labels = labels.subset(&train_idx).map_err(|e| match e {
            KaldaError::Label {
                kind: LabelErrorKind::EmptyClass(class),
                ..
            } => KaldaError::Fold { fold: f, class },
            other => other,
        })?;
        let (train, centering) = center(&x.select_samples(&train_idx)?, &train_labels)?;
        let test = centering.apply(&x.select_samples(&test_idx)?)?;
        let scatter = compute_scatter(&train, &train_labels)?;
        let g = method.projection(&scatter, k)?;
        let pred = knn_predict(&train.project(&g)?, &train_labels, &test.project(&g)?, knn)?;
        let truth: Vec<Vec<usize>> = test_idx.iter().map(|&i| labels.memberships()[i].clone()).collect();
        scores.push(score_sets(
            labels.mode(),
            &pred.predictions,
            &truth,
            labels.num_classes(),
        ));
    }
    let (mean, std_dev) = aggregate(&scores);
    Ok(EvalReport {
        method: method.name(),
        folds: scores,
        mean,
        std_dev,
        fold_of,
    })
}
