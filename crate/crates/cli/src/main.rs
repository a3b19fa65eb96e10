//! `kalda`: fit, apply and evaluate kernel-alignment LDA projections.
//!
//! Exit codes: 0 success, 2 usage or input-contract error, 3 data-dependent
//! numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kalda_core::KaldaError;

#[derive(Parser, Debug)]
#[command(name = "kalda", version, about = "Kernel-alignment LDA dimensionality reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a projection and write a model file.
    Fit(FitArgs),
    /// Center and project features with a fitted model.
    Transform(TransformArgs),
    /// k-fold cross-validation with KNN in the projected space.
    Crossval(CrossvalArgs),
    /// Per-iteration objective trace of a kaLDA fit.
    Trace(TraceArgs),
    /// Mean cross-validated accuracy over a range of subspace dimensions.
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Single,
    Multi,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Feature CSV, one row per sample.
    #[arg(long)]
    pub features: PathBuf,
    /// Label file, one line of space-separated class ids per sample.
    #[arg(long)]
    pub labels: PathBuf,
    /// Label regime; auto picks multi when any sample has more than one id.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Args, Debug, Clone)]
pub struct OptArgs {
    #[arg(long, default_value_t = 0.005)]
    pub tau: f64,
    #[arg(long = "max-iters", default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long = "rel-tol", default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output model file.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value = "kalda")]
    pub method: String,
    /// Subspace dimension; defaults to K − 1.
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub opt: OptArgs,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated methods: kalda, lda, tr, mmc.
    #[arg(long, default_value = "kalda")]
    pub method: String,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 3)]
    pub knn: usize,
    #[command(flatten)]
    pub opt: OptArgs,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub opt: OptArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "kalda,tr")]
    pub method: String,
    /// MIN:MAX:STEP, inclusive.
    #[arg(long = "dim-range")]
    pub dim_range: String,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 3)]
    pub knn: usize,
    #[command(flatten)]
    pub opt: OptArgs,
}

fn exit_code(err: &KaldaError) -> u8 {
    match err {
        KaldaError::Fold { .. }
        | KaldaError::DegenerateSubspace(_)
        | KaldaError::DegenerateProblem(_)
        | KaldaError::RankDeficient(_)
        | KaldaError::StationaryPoint => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => commands::fit(&args),
        Command::Transform(args) => commands::transform(&args),
        Command::Crossval(args) => commands::crossval(&args),
        Command::Trace(args) => commands::trace(&args),
        Command::Sweep(args) => commands::sweep(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("kalda: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
