use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = KaldaError> = std::result::Result<T, E>;

/// What went wrong while parsing a feature file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataErrorKind {
    Ragged,
    NonNumeric,
    NonFinite,
    TooFewSamples,
    Empty,
}

impl std::fmt::Display for DataErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DataErrorKind::Ragged => "ragged row",
            DataErrorKind::NonNumeric => "non-numeric cell",
            DataErrorKind::NonFinite => "non-finite value",
            DataErrorKind::TooFewSamples => "fewer than 2 samples",
            DataErrorKind::Empty => "empty row",
        };
        f.write_str(s)
    }
}

/// What went wrong while parsing or validating labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelErrorKind {
    EmptyLabels,
    BadId(String),
    DuplicateId(usize),
    IdOutOfRange { id: usize, classes: usize },
    EmptyClass(usize),
    NoSamples,
}

impl std::fmt::Display for LabelErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelErrorKind::EmptyLabels => f.write_str("empty labels"),
            LabelErrorKind::BadId(tok) => write!(f, "invalid class id {tok:?}"),
            LabelErrorKind::DuplicateId(id) => write!(f, "duplicate class id {id}"),
            LabelErrorKind::IdOutOfRange { id, classes } => {
                write!(f, "class id {id} out of range for {classes} classes")
            }
            LabelErrorKind::EmptyClass(k) => write!(f, "class {k} has no members"),
            LabelErrorKind::NoSamples => f.write_str("no samples"),
        }
    }
}

#[derive(Debug, Error)]
pub enum KaldaError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("data error ({kind}) at line {line}{}", col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Data {
        kind: DataErrorKind,
        line: usize,
        col: Option<usize>,
    },

    #[error("label error ({kind}){}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Label { kind: LabelErrorKind, line: Option<usize> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate subspace: Tr((GᵀStG)²) = {0:e}")]
    DegenerateSubspace(f64),

    #[error("stationary point: tangent gradient vanished")]
    StationaryPoint,

    #[error("rank-deficient matrix (eigenvalue ratio {0:e})")]
    RankDeficient(f64),

    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("fold {fold} training split has no samples of class {class}")]
    Fold { fold: usize, class: usize },

    #[error("model file error at line {line}: {msg}")]
    Model { line: usize, msg: String },
}

impl KaldaError {
    pub(crate) fn data(kind: DataErrorKind, line: usize, col: Option<usize>) -> Self {
        KaldaError::Data { kind, line, col }
    }

    pub(crate) fn label(kind: LabelErrorKind, line: Option<usize>) -> Self {
        KaldaError::Label { kind, line }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        KaldaError::DimensionMismatch(msg.into())
    }
}
