//! Feature/label loading, centering, and class-indicator construction.
//!
//! Data are stored feature-major: a `p×n` matrix with one column per sample.
//! Feature files are numeric CSV with one row per sample and are transposed
//! on load.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{DataErrorKind, KaldaError, LabelErrorKind, Result};

/// Dense `p×n` data matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a `p×n` matrix. Rejects empty shapes and non-finite entries.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(KaldaError::dims(format!(
                "data matrix must be non-empty, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % values.nrows(), pos / values.nrows());
            return Err(KaldaError::data(DataErrorKind::NonFinite, col + 1, Some(row + 1)));
        }
        Ok(Self { values })
    }

    /// Builds from per-sample rows (the on-disk orientation).
    pub fn from_samples(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(KaldaError::data(DataErrorKind::Ragged, i + 1, None));
        }
        Self::new(DMatrix::from_fn(p, n, |f, s| rows[s][f]))
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }

    /// Columns `idx` in the given order.
    pub fn select_samples(&self, idx: &[usize]) -> Result<Self> {
        Self::new(self.values.select_columns(idx))
    }

    /// `Gᵀ X` for a `p×k` matrix `G`.
    pub fn project(&self, g: &DMatrix<f64>) -> Result<Self> {
        if g.nrows() != self.p() {
            return Err(KaldaError::dims(format!(
                "projection has {} rows, data has {} features",
                g.nrows(),
                self.p()
            )));
        }
        Self::new(g.transpose() * &self.values)
    }
}

/// Reads a numeric CSV (samples as rows) into a `p×n` [`DataMatrix`].
pub fn load_features(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| KaldaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_features(&text)
}

/// Parses feature CSV text. Cells must match Rust's float grammar exactly
/// (no surrounding whitespace) and be finite.
pub fn parse_features(text: &str) -> Result<DataMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let lines: Vec<&str> = text.split('\n').collect();
    let last = lines.len() - 1;
    for (i, raw) in lines.iter().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            if i == last {
                break;
            }
            return Err(KaldaError::data(DataErrorKind::Empty, line_no, None));
        }
        let mut row = Vec::with_capacity(rows.first().map_or(4, Vec::len));
        for (j, cell) in line.split(',').enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| KaldaError::data(DataErrorKind::NonNumeric, line_no, Some(j + 1)))?;
            if !v.is_finite() {
                return Err(KaldaError::data(DataErrorKind::NonFinite, line_no, Some(j + 1)));
            }
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(KaldaError::data(DataErrorKind::Ragged, line_no, None));
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(KaldaError::data(DataErrorKind::TooFewSamples, rows.len().max(1), None));
    }
    DataMatrix::from_samples(&rows)
}

/// Single-label (exactly one class per sample) or multi-label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelMode {
    Single,
    Multi,
}

impl std::fmt::Display for LabelMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LabelMode::Single => "single",
            LabelMode::Multi => "multi",
        })
    }
}

impl std::str::FromStr for LabelMode {
    type Err = KaldaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(LabelMode::Single),
            "multi" => Ok(LabelMode::Multi),
            other => Err(KaldaError::InvalidArgument(format!("unknown label mode {other:?}"))),
        }
    }
}

/// Per-sample class memberships over `K` dense 0-based class ids.
///
/// Every sample has at least one class, and every class has at least one
/// sample. Membership sets are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAssignment {
    mode: LabelMode,
    memberships: Vec<Vec<usize>>,
    num_classes: usize,
}

impl LabelAssignment {
    /// Validates memberships; the mode is single iff every sample has one id.
    pub fn new(memberships: Vec<Vec<usize>>, num_classes: usize) -> Result<Self> {
        let mut memberships = memberships;
        if memberships.is_empty() {
            return Err(KaldaError::label(LabelErrorKind::NoSamples, None));
        }
        let mut counts = vec![0usize; num_classes];
        for (i, set) in memberships.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(KaldaError::label(LabelErrorKind::EmptyLabels, Some(i + 1)));
            }
            set.sort_unstable();
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(KaldaError::label(LabelErrorKind::DuplicateId(w[0]), Some(i + 1)));
            }
            for &id in set.iter() {
                if id >= num_classes {
                    return Err(KaldaError::label(
                        LabelErrorKind::IdOutOfRange {
                            id,
                            classes: num_classes,
                        },
                        Some(i + 1),
                    ));
                }
                counts[id] += 1;
            }
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(KaldaError::label(LabelErrorKind::EmptyClass(k), None));
        }
        let mode = if memberships.iter().all(|s| s.len() == 1) {
            LabelMode::Single
        } else {
            LabelMode::Multi
        };
        Ok(Self {
            mode,
            memberships,
            num_classes,
        })
    }

    /// One class id per sample; `K = max id + 1`.
    pub fn from_single(ids: &[usize]) -> Result<Self> {
        let k = ids.iter().max().map_or(0, |m| m + 1);
        Self::new(ids.iter().map(|&c| vec![c]).collect(), k)
    }

    pub fn mode(&self) -> LabelMode {
        self.mode
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.memberships.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memberships.is_empty()
    }

    pub fn memberships(&self) -> &[Vec<usize>] {
        &self.memberships
    }

    /// The single class of sample `i`; meaningful in single mode.
    pub fn class_of(&self, i: usize) -> usize {
        self.memberships[i][0]
    }

    /// `ρ_i`, the number of classes sample `i` belongs to.
    pub fn label_counts(&self) -> Vec<usize> {
        self.memberships.iter().map(Vec::len).collect()
    }

    /// Members per class (`n_k`, or `ñ_k` in multi mode).
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for set in &self.memberships {
            for &k in set {
                counts[k] += 1;
            }
        }
        counts
    }

    /// Same memberships, treated as multi-label.
    pub fn as_multi(&self) -> Self {
        Self {
            mode: LabelMode::Multi,
            ..self.clone()
        }
    }

    /// Reinterprets the labels in `mode`. Single mode requires one id per sample.
    pub fn with_mode(&self, mode: LabelMode) -> Result<Self> {
        match mode {
            LabelMode::Multi => Ok(self.as_multi()),
            LabelMode::Single => {
                if let Some(i) = self.memberships.iter().position(|s| s.len() != 1) {
                    return Err(KaldaError::Unsupported(format!(
                        "single-label mode requested but sample {} has {} labels",
                        i + 1,
                        self.memberships[i].len()
                    )));
                }
                Ok(Self {
                    mode: LabelMode::Single,
                    ..self.clone()
                })
            }
        }
    }

    /// Samples `idx`, keeping `K` and the mode. Fails if a class loses all members.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let sets = idx.iter().map(|&i| self.memberships[i].clone()).collect();
        let mut sub = Self::new(sets, self.num_classes)?;
        sub.mode = self.mode;
        Ok(sub)
    }
}

/// Reads a label file: one line per sample, space-separated class ids.
pub fn load_labels(path: impl AsRef<Path>, num_classes: Option<usize>) -> Result<LabelAssignment> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| KaldaError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_labels(&text, num_classes)
}

pub fn parse_labels(text: &str, num_classes: Option<usize>) -> Result<LabelAssignment> {
    let lines: Vec<&str> = text.split('\n').collect();
    let last = lines.len() - 1;
    let mut sets = Vec::new();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() && i == last {
            break;
        }
        let mut set = Vec::new();
        for tok in line.split_ascii_whitespace() {
            if !tok.bytes().all(|b| b.is_ascii_digit()) {
                return Err(KaldaError::label(LabelErrorKind::BadId(tok.to_string()), Some(i + 1)));
            }
            let id: usize = tok
                .parse()
                .map_err(|_| KaldaError::label(LabelErrorKind::BadId(tok.to_string()), Some(i + 1)))?;
            set.push(id);
        }
        if set.is_empty() {
            return Err(KaldaError::label(LabelErrorKind::EmptyLabels, Some(i + 1)));
        }
        sets.push(set);
    }
    let k = match num_classes {
        Some(k) => k,
        None => sets.iter().flatten().max().map_or(0, |m| m + 1),
    };
    LabelAssignment::new(sets, k)
}

/// The mean subtracted by [`center`], kept so test data can be centered
/// with training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringInfo {
    pub mean: DVector<f64>,
    pub mode: LabelMode,
}

impl CenteringInfo {
    /// Subtracts the stored mean from every column of `x`.
    pub fn apply(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.p() != self.mean.len() {
            return Err(KaldaError::dims(format!(
                "data has {} features, centering mean has {}",
                x.p(),
                self.mean.len()
            )));
        }
        let mut m = x.as_matrix().clone();
        for mut col in m.column_iter_mut() {
            col -= &self.mean;
        }
        DataMatrix::new(m)
    }
}

/// Subtracts the ordinary mean (single mode) or the `ρ`-weighted mean
/// `Σρ_i x_i / Σρ_i` (multi mode).
pub fn center(x: &DataMatrix, labels: &LabelAssignment) -> Result<(DataMatrix, CenteringInfo)> {
    if x.n() != labels.len() {
        return Err(KaldaError::dims(format!(
            "{} samples in data, {} in labels",
            x.n(),
            labels.len()
        )));
    }
    let xm = x.as_matrix();
    let mean = match labels.mode() {
        LabelMode::Single => xm.column_mean(),
        LabelMode::Multi => {
            let rho = labels.label_counts();
            let total: usize = rho.iter().sum();
            let mut acc = DVector::zeros(x.p());
            for (col, &r) in xm.column_iter().zip(&rho) {
                acc.axpy(r as f64, &col, 1.0);
            }
            acc / total as f64
        }
    };
    let info = CenteringInfo {
        mean,
        mode: labels.mode(),
    };
    Ok((info.apply(x)?, info))
}

/// Normalized class indicators.
#[derive(Debug, Clone, PartialEq)]
pub enum IndicatorSet {
    /// `Y_ik = 1/√n_k` if sample `i` is in class `k`.
    Single { y: DMatrix<f64> },
    /// Binary `Z`, normalized `Ỹ_ik = 1/√ñ_k`, and `Ω = diag(ρ)`.
    Multi {
        z: DMatrix<f64>,
        y_tilde: DMatrix<f64>,
        omega: DVector<f64>,
    },
}

impl IndicatorSet {
    pub fn n(&self) -> usize {
        match self {
            IndicatorSet::Single { y } => y.nrows(),
            IndicatorSet::Multi { z, .. } => z.nrows(),
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            IndicatorSet::Single { y } => y.ncols(),
            IndicatorSet::Multi { z, .. } => z.ncols(),
        }
    }

    /// The normalized indicator (`Y` or `Ỹ`).
    pub fn normalized(&self) -> &DMatrix<f64> {
        match self {
            IndicatorSet::Single { y } => y,
            IndicatorSet::Multi { y_tilde, .. } => y_tilde,
        }
    }

    /// Diagonal of `Ω`; all ones in single mode.
    pub fn weights(&self) -> DVector<f64> {
        match self {
            IndicatorSet::Single { y } => DVector::from_element(y.nrows(), 1.0),
            IndicatorSet::Multi { omega, .. } => omega.clone(),
        }
    }
}

pub fn build_indicators(labels: &LabelAssignment) -> IndicatorSet {
    let n = labels.len();
    let k = labels.num_classes();
    let sizes = labels.class_sizes();
    let mut z = DMatrix::zeros(n, k);
    for (i, set) in labels.memberships().iter().enumerate() {
        for &c in set {
            z[(i, c)] = 1.0;
        }
    }
    let mut y = z.clone();
    for (c, &size) in sizes.iter().enumerate() {
        let scale = 1.0 / (size as f64).sqrt();
        y.column_mut(c).scale_mut(scale);
    }
    match labels.mode() {
        LabelMode::Single => IndicatorSet::Single { y },
        LabelMode::Multi => {
            let omega = DVector::from_iterator(n, labels.label_counts().into_iter().map(|r| r as f64));
            IndicatorSet::Multi { z, y_tilde: y, omega }
        }
    }
}
