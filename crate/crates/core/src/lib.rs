//! Kernel-alignment linear discriminant analysis (kaLDA).
//!
//! The crate builds single- and multi-label scatter matrices, evaluates the
//! kernel-alignment objective
//!
//! ```text
//! J1(G) = Tr(Gᵀ Sb G) / sqrt(Tr((Gᵀ St G)²)),   Gᵀ G = I
//! ```
//!
//! and maximizes it with a Stiefel-manifold gradient method. Classical LDA,
//! trace-ratio and MMC baselines plus a KNN cross-validation harness are
//! provided for comparison.

// Negated comparisons below deliberately treat NaN as failing the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alignment;
pub mod baselines;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod manifold;
pub mod model;
pub mod scatter;
pub mod synthetic;

pub use alignment::{kernel_alignment, objective_j1, AlignmentConstant, KernelMatrix};
pub use baselines::{fit_classical_lda, fit_mmc, fit_trace_ratio, GeneralizedEigenSolution};
pub use dataset::{
    build_indicators, center, load_features, load_labels, CenteringInfo, DataMatrix, IndicatorSet, LabelAssignment,
    LabelMode,
};
pub use error::{KaldaError, Result};
pub use eval::{cross_validate, knn_predict, EvalReport, Method, PredictionSet, Scores};
pub use manifold::{fit_kalda, FitTrace, KaldaFit, OptConfig, Projection};
pub use model::Model;
pub use scatter::{compute_scatter, ScatterSet};
