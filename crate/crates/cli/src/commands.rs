use std::fs;
use std::io::Write;
use std::path::PathBuf;

use kalda_core::baselines::{fit_classical_lda, fit_mmc, fit_trace_ratio};
use kalda_core::eval::{cross_validate, Method};
use kalda_core::manifold::{fit_kalda, OptConfig};
use kalda_core::model::{format_float, Model};
use kalda_core::{
    center, compute_scatter, load_features, load_labels, DataMatrix, KaldaError, LabelAssignment, LabelMode, Result,
};

use crate::{CrossvalArgs, FitArgs, InputArgs, ModeArg, OptArgs, SweepArgs, TraceArgs, TransformArgs};

fn load_inputs(input: &InputArgs) -> Result<(DataMatrix, LabelAssignment)> {
    let x = load_features(&input.features)?;
    let labels = load_labels(&input.labels, None)?;
    if labels.len() != x.n() {
        return Err(KaldaError::DimensionMismatch(format!(
            "{} has {} samples but {} has {}",
            input.features.display(),
            x.n(),
            input.labels.display(),
            labels.len()
        )));
    }
    let labels = match input.mode {
        ModeArg::Auto => labels,
        ModeArg::Single => labels.with_mode(LabelMode::Single)?,
        ModeArg::Multi => labels.with_mode(LabelMode::Multi)?,
    };
    Ok((x, labels))
}

fn opt_config(opt: &OptArgs) -> Result<OptConfig> {
    let cfg = OptConfig {
        tau: opt.tau,
        max_iters: opt.max_iters,
        rel_tol: opt.rel_tol,
        seed: opt.seed,
        ..OptConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_dim(dim: Option<usize>, x: &DataMatrix, labels: &LabelAssignment) -> Result<usize> {
    let k = match dim {
        Some(k) => k,
        None => labels.num_classes().saturating_sub(1),
    };
    if k == 0 || k > x.p() {
        return Err(KaldaError::InvalidArgument(format!(
            "subspace dimension {k} must lie in 1..={} (feature count)",
            x.p()
        )));
    }
    Ok(k)
}

fn parse_methods(list: &str, cfg: OptConfig) -> Result<Vec<Method>> {
    list.split(',')
        .map(|name| {
            name.trim().parse::<Method>().map(|m| match m {
                Method::Kalda(_) => Method::Kalda(cfg),
                other => other,
            })
        })
        .collect()
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| KaldaError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| KaldaError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let (x, labels) = load_inputs(&args.input)?;
    let k = resolve_dim(args.dim, &x, &labels)?;
    let cfg = opt_config(&args.opt)?;
    let method: Method = args.method.parse()?;
    let mut metadata = vec![("samples".to_string(), x.n().to_string())];

    let (mean, projection) = match method {
        Method::Kalda(_) => {
            let fit = fit_kalda(&x, &labels, k, &cfg)?;
            let t = &fit.trace;
            metadata.extend([
                ("tau".into(), format_float(cfg.tau)),
                ("rel_tol".into(), format_float(cfg.rel_tol)),
                ("seed".into(), cfg.seed.to_string()),
                ("init".into(), format!("{:?}", fit.init_source)),
                ("iterations".into(), t.iterations_run.to_string()),
                ("converged".into(), t.converged.to_string()),
                ("objective_initial".into(), format_float(t.initial_objective())),
                ("objective_final".into(), format_float(t.final_objective())),
            ]);
            (fit.centering.mean, fit.projection.into_matrix())
        }
        other => {
            let (centered, info) = center(&x, &labels)?;
            let scatter = compute_scatter(&centered, &labels)?;
            let g = match other {
                Method::Lda => fit_classical_lda(&scatter, k)?.eigenvectors,
                Method::TraceRatio { tol } => {
                    let tr = fit_trace_ratio(&scatter, k, tol)?;
                    metadata.push(("lambda".into(), format_float(tr.lambda)));
                    metadata.push(("converged".into(), tr.converged.to_string()));
                    tr.projection.into_matrix()
                }
                Method::Mmc => fit_mmc(&scatter, k)?.projection.into_matrix(),
                Method::Kalda(_) => unreachable!(),
            };
            (info.mean, g)
        }
    };
    let model = Model {
        method: method.id().to_string(),
        mode: labels.mode(),
        num_classes: labels.num_classes(),
        mean,
        projection,
        metadata,
    };
    model.save(&args.model)
}

pub fn transform(args: &TransformArgs) -> Result<()> {
    let model = Model::load(&args.model)?;
    let x = load_features(&args.features)?;
    let projected = model.transform(&x)?;
    let m = projected.as_matrix();
    let mut out = (0..model.k()).map(|j| format!("dim_{j}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for sample in m.column_iter() {
        out.push_str(&sample.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    write_output(args.out.as_ref(), &out)
}

pub fn crossval(args: &CrossvalArgs) -> Result<()> {
    let (x, labels) = load_inputs(&args.input)?;
    let k = resolve_dim(args.dim, &x, &labels)?;
    let methods = parse_methods(&args.method, opt_config(&args.opt)?)?;
    let mut out = String::from("method,fold,accuracy,macro_f1,micro_f1\n");
    for method in &methods {
        let r = cross_validate(&x, &labels, method, k, args.folds, args.knn, args.opt.seed)?;
        for (f, s) in r.folds.iter().enumerate() {
            out.push_str(&format!(
                "{},{f},{},{},{}\n",
                r.method, s.accuracy, s.macro_f1, s.micro_f1
            ));
        }
        let (m, sd) = (r.mean, r.std_dev);
        out.push_str(&format!(
            "{},mean,{},{},{}\n",
            r.method, m.accuracy, m.macro_f1, m.micro_f1
        ));
        out.push_str(&format!(
            "{},std,{},{},{}\n",
            r.method, sd.accuracy, sd.macro_f1, sd.micro_f1
        ));
    }
    write_output(args.out.as_ref(), &out)
}

pub fn trace(args: &TraceArgs) -> Result<()> {
    let (x, labels) = load_inputs(&args.input)?;
    let k = resolve_dim(args.dim, &x, &labels)?;
    let fit = fit_kalda(&x, &labels, k, &opt_config(&args.opt)?)?;
    let t = &fit.trace;
    let mut out = String::from("iteration,j1,eta\n");
    for (i, j) in t.objective_values.iter().enumerate() {
        // iteration 0 is the initial point and has no step
        let eta = if i == 0 {
            String::new()
        } else {
            t.step_sizes[i - 1].to_string()
        };
        out.push_str(&format!("{i},{j},{eta}\n"));
    }
    write_output(args.out.as_ref(), &out)
}

/// Parses `MIN:MAX:STEP` into the inclusive list of dimensions.
pub fn parse_dim_range(range: &str) -> Result<Vec<usize>> {
    let bad = || {
        KaldaError::InvalidArgument(format!(
            "--dim-range {range:?} must be MIN:MAX:STEP with 1 ≤ MIN ≤ MAX, STEP ≥ 1"
        ))
    };
    let parts: Vec<usize> = range
        .split(':')
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else { return Err(bad()) };
    if lo == 0 || hi < lo || step == 0 {
        return Err(bad());
    }
    Ok((lo..=hi).step_by(step).collect())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let dims = parse_dim_range(&args.dim_range)?;
    let (x, labels) = load_inputs(&args.input)?;
    if let Some(&max) = dims.last() {
        if max > x.p() {
            return Err(KaldaError::InvalidArgument(format!(
                "--dim-range reaches {max} but data has {} features",
                x.p()
            )));
        }
    }
    let methods = parse_methods(&args.method, opt_config(&args.opt)?)?;
    let mut out = String::from("method,k,mean_accuracy\n");
    for method in &methods {
        for &k in &dims {
            let r = cross_validate(&x, &labels, method, k, args.folds, args.knn, args.opt.seed)?;
            out.push_str(&format!("{},{k},{}\n", r.method, r.mean.accuracy));
        }
    }
    write_output(args.out.as_ref(), &out)
}
