//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.
//!
//! Reference values (kernels, alignment, definitional scatters, J1, finite
//! differences, metric counts) are recomputed here from raw memberships,
//! independently of the library code paths under test.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kalda_core::alignment::{
    build_kernels_multi, build_kernels_single, kernel_alignment, objective_j1, AlignmentConstant,
};
use kalda_core::baselines::{fit_classical_lda, fit_trace_ratio};
use kalda_core::dataset::build_indicators;
use kalda_core::eval::{cross_validate, score_single, Method, PredictionSet};
use kalda_core::linalg::random_orthonormal;
use kalda_core::manifold::{fit_kalda, gradient_j1, reorthonormalize, InitSource, OptConfig};
use kalda_core::synthetic::{gaussian_classes, random_multi_instance, random_single_instance, standard_instance};
use kalda_core::{center, compute_scatter, DataMatrix, LabelAssignment, LabelMode, ScatterSet};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < budget, || {
        format!("runtime {:.2}s exceeds {:.0}s", t.as_secs_f64(), budget.as_secs_f64())
    })
}

// ---------------------------------------------------------------- oracles

/// Sum of entrywise products, `Tr(AB)` for symmetric `A`, `B`.
fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn oracle_alignment(k1: &DMatrix<f64>, k2: &DMatrix<f64>) -> f64 {
    frob_inner(k1, k2) / (frob_inner(k1, k1).sqrt() * frob_inner(k2, k2).sqrt())
}

fn class_sizes(sets: &[Vec<usize>], k: usize) -> Vec<f64> {
    let mut n = vec![0.0; k];
    for s in sets {
        for &c in s {
            n[c] += 1.0;
        }
    }
    n
}

/// Data kernel `√(ρiρj)·xiᵀxj` and label kernel `Σ_{c∈Si∩Sj} 1/n_c / √(ρiρj)`.
/// With one label per sample these are `XᵀX` and `YYᵀ`.
fn oracle_kernels(x: &DMatrix<f64>, sets: &[Vec<usize>], k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = x.ncols();
    let sizes = class_sizes(sets, k);
    let rho: Vec<f64> = sets.iter().map(|s| s.len() as f64).collect();
    let k1 = DMatrix::from_fn(n, n, |i, j| (rho[i] * rho[j]).sqrt() * x.column(i).dot(&x.column(j)));
    let k2 = DMatrix::from_fn(n, n, |i, j| {
        let shared: f64 = sets[i]
            .iter()
            .filter(|c| sets[j].contains(c))
            .map(|&c| 1.0 / sizes[c])
            .sum();
        shared / (rho[i] * rho[j]).sqrt()
    });
    (k1, k2)
}

/// Definitional scatters: `Sb = Σ_c n_c (m_c − m)(m_c − m)ᵀ` and
/// `St = Σ_c Σ_{i∈c} (x_i − m)(x_i − m)ᵀ`, with `m` the membership-weighted mean.
fn oracle_scatter(x: &DMatrix<f64>, sets: &[Vec<usize>], k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let p = x.nrows();
    let sizes = class_sizes(sets, k);
    let total: f64 = sizes.iter().sum();
    let mut mean = DVector::zeros(p);
    let mut class_means = vec![DVector::zeros(p); k];
    for (i, s) in sets.iter().enumerate() {
        for &c in s {
            mean += x.column(i);
            class_means[c] += x.column(i);
        }
    }
    mean /= total;
    let mut sb = DMatrix::zeros(p, p);
    for c in 0..k {
        let d = &class_means[c] / sizes[c] - &mean;
        sb += sizes[c] * &d * d.transpose();
    }
    let mut st = DMatrix::zeros(p, p);
    for (i, s) in sets.iter().enumerate() {
        let d = x.column(i) - &mean;
        st += s.len() as f64 * &d * d.transpose();
    }
    (sb, st)
}

fn oracle_j1(g: &DMatrix<f64>, sb: &DMatrix<f64>, st: &DMatrix<f64>) -> f64 {
    let d = g.transpose() * st * g;
    (g.transpose() * sb * g).trace() / frob_inner(&d, &d).sqrt()
}

fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(a.norm()).max(f64::MIN_POSITIVE)
}

fn centered_single(rng: &mut ChaCha8Rng, max_p: usize, max_n: usize, max_k: usize) -> (DataMatrix, LabelAssignment) {
    let p = rng.random_range(2..=max_p);
    let k = rng.random_range(2..=max_k);
    let n = rng.random_range((k + 2).max(6)..=max_n);
    let (x, l) = random_single_instance(rng, p, n, k);
    (center(&x, &l).unwrap().0, l)
}

fn centered_multi(rng: &mut ChaCha8Rng, max_p: usize, max_n: usize, max_k: usize) -> (DataMatrix, LabelAssignment) {
    let p = rng.random_range(2..=max_p);
    let k = rng.random_range(3..=max_k);
    let n = rng.random_range((k + 2).max(6)..=max_n);
    let (x, l) = random_multi_instance(rng, p, n, k, 3);
    (center(&x, &l).unwrap().0, l)
}

fn single_suite() -> Vec<(DataMatrix, LabelAssignment)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..100).map(|_| centered_single(&mut rng, 15, 60, 5)).collect()
}

fn multi_suite() -> Vec<(DataMatrix, LabelAssignment)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..100).map(|_| centered_multi(&mut rng, 15, 60, 5)).collect()
}

/// Instances for full fit runs: both modes, random `k`.
fn fit_suite() -> Vec<(DataMatrix, LabelAssignment, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    (0..30)
        .map(|i| {
            let (x, l) = if i % 2 == 0 {
                centered_single(&mut rng, 10, 50, 5)
            } else {
                centered_multi(&mut rng, 10, 50, 5)
            };
            let k = rng.random_range(1..=x.p().min(3));
            (x, l, k)
        })
        .collect()
}

// ---------------------------------------------------------------- criteria

fn full_space_check(x: &DataMatrix, l: &LabelAssignment) -> Result<f64, String> {
    let ind = build_indicators(l);
    let (k1, k2) = match l.mode() {
        LabelMode::Single => build_kernels_single(x, &ind),
        LabelMode::Multi => build_kernels_multi(x, &ind),
    }
    .map_err(|e| e.to_string())?;
    let a = kernel_alignment(&k1, &k2).map_err(|e| e.to_string())?;
    let (o1, o2) = oracle_kernels(x.as_matrix(), l.memberships(), l.num_classes());
    let a_oracle = oracle_alignment(&o1, &o2);
    let c_oracle = 1.0 / frob_inner(&o2, &o2).sqrt();
    let c = AlignmentConstant::from_indicators(&ind).value();
    let (sb, st) = oracle_scatter(x.as_matrix(), l.memberships(), l.num_classes());
    let rhs = c * sb.trace() / frob_inner(&st, &st).sqrt();
    let err = (a - rhs).abs().max((a - a_oracle).abs()).max((c - c_oracle).abs());
    ensure(err < 1e-10, || format!("identity gap {err:e}"))?;
    Ok(err)
}

fn subspace_check(x: &DataMatrix, l: &LabelAssignment, g: &DMatrix<f64>) -> Result<f64, String> {
    let projected = x.project(g).map_err(|e| e.to_string())?;
    let ind = build_indicators(l);
    let (k1, k2) = match l.mode() {
        LabelMode::Single => build_kernels_single(&projected, &ind),
        LabelMode::Multi => build_kernels_multi(&projected, &ind),
    }
    .map_err(|e| e.to_string())?;
    let lhs = kernel_alignment(&k1, &k2).map_err(|e| e.to_string())?;
    let (sb, st) = oracle_scatter(x.as_matrix(), l.memberships(), l.num_classes());
    let c = AlignmentConstant::from_indicators(&ind).value();
    let rhs =
        c * objective_j1(g, &ScatterSet::new(sb.clone(), st.clone(), None).unwrap()).map_err(|e| e.to_string())?;
    let rhs_oracle = c * oracle_j1(g, &sb, &st);
    let err = (lhs - rhs).abs().max((lhs - rhs_oracle).abs());
    ensure(err < 1e-10, || format!("subspace identity gap {err:e}"))?;
    Ok(err)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (i, (x, l)) in single_suite().iter().enumerate() {
        worst = worst.max(full_space_check(x, l).map_err(|e| format!("instance {i}: {e}"))?);
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("100 instances, max gap {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for (i, (x, l)) in single_suite().iter().enumerate() {
        let k = rng.random_range(1..=(l.num_classes() - 1).min(x.p()));
        let g = random_orthonormal(x.p(), k, &mut rng);
        worst = worst.max(subspace_check(x, l, &g).map_err(|e| format!("instance {i}: {e}"))?);
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("100 instances, max gap {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut rho_seen = [false; 3];
    for (i, (x, l)) in multi_suite().iter().enumerate() {
        for s in l.memberships() {
            rho_seen[s.len() - 1] = true;
        }
        worst = worst.max(full_space_check(x, l).map_err(|e| format!("instance {i}: {e}"))?);
        let k = rng.random_range(1..=(l.num_classes() - 1).min(x.p()));
        let g = random_orthonormal(x.p(), k, &mut rng);
        worst = worst.max(subspace_check(x, l, &g).map_err(|e| format!("instance {i}: {e}"))?);
    }
    ensure(rho_seen.iter().all(|&b| b), || {
        "suite does not cover rho in {1,2,3}".into()
    })?;

    // ρ_i = 1 everywhere: the weighted construction must reproduce the unweighted one
    let mut reduction: f64 = 0.0;
    for (x, l) in single_suite().iter().take(50) {
        let m = l.as_multi();
        let (a1, a2) = build_kernels_single(x, &build_indicators(l)).unwrap();
        let (b1, b2) = build_kernels_multi(x, &build_indicators(&m)).unwrap();
        let sa = compute_scatter(x, l).unwrap();
        let sm = compute_scatter(x, &m).unwrap();
        let g = random_orthonormal(x.p(), 1, &mut rng);
        let gaps = [
            (kernel_alignment(&a1, &a2).unwrap() - kernel_alignment(&b1, &b2).unwrap()).abs(),
            (AlignmentConstant::from_indicators(&build_indicators(l)).value()
                - AlignmentConstant::from_indicators(&build_indicators(&m)).value())
            .abs(),
            (objective_j1(&g, &sa).unwrap() - objective_j1(&g, &sm).unwrap()).abs(),
            (&sa.sb - &sm.sb).amax() / sa.sb.amax(),
            (&sa.st - &sm.st).amax() / sa.st.amax(),
        ];
        for gap in gaps {
            reduction = reduction.max(gap);
        }
    }
    ensure(reduction < 1e-12, || format!("rho = 1 reduction gap {reduction:e}"))?;
    Ok(format!(
        "100 instances, max gap {worst:.1e}; rho = 1 reduction {reduction:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for (x, l) in single_suite().iter().chain(multi_suite().iter()) {
        let s = compute_scatter(x, l).map_err(|e| e.to_string())?;
        let (sb, st) = oracle_scatter(x.as_matrix(), l.memberships(), l.num_classes());
        worst = worst.max(rel_frobenius(&s.sb, &sb)).max(rel_frobenius(&s.st, &st));
    }
    ensure(worst < 1e-10, || format!("relative Frobenius error {worst:e}"))?;
    Ok(format!("200 instances, max relative error {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    const H: f64 = 1e-6;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for mode in [LabelMode::Single, LabelMode::Multi] {
        for i in 0..50 {
            let (x, l) = match mode {
                LabelMode::Single => centered_single(&mut rng, 10, 40, 5),
                LabelMode::Multi => centered_multi(&mut rng, 10, 40, 5),
            };
            let (sb, st) = oracle_scatter(x.as_matrix(), l.memberships(), l.num_classes());
            let k = rng.random_range(1..=x.p().min(3));
            let g = random_orthonormal(x.p(), k, &mut rng);
            let fd = DMatrix::from_fn(x.p(), k, |a, b| {
                let mut plus = g.clone();
                let mut minus = g.clone();
                plus[(a, b)] += H;
                minus[(a, b)] -= H;
                (oracle_j1(&plus, &sb, &st) - oracle_j1(&minus, &sb, &st)) / (2.0 * H)
            });
            let s = compute_scatter(&x, &l).map_err(|e| e.to_string())?;
            let analytic = gradient_j1(&g, &s).map_err(|e| e.to_string())?;
            let err = (&analytic - &fd).norm() / fd.norm();
            ensure(err < 1e-5, || format!("{mode} instance {i}: relative error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!("50 instances per mode, max relative error {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    let mut fits = Vec::new();
    for (x, l, k) in fit_suite() {
        fits.push(fit_kalda(&x, &l, k, &OptConfig::default()).map_err(|e| e.to_string())?);
    }
    for seed in 0..5 {
        let (x, l) = standard_instance(seed);
        fits.push(
            fit_kalda(
                &x,
                &l,
                2,
                &OptConfig {
                    tau: 0.001,
                    ..OptConfig::default()
                },
            )
            .map_err(|e| e.to_string())?,
        );
    }
    for fit in &fits {
        runs += 1;
        let t = &fit.trace;
        ensure(t.orthonormality.len() == t.iterations_run + 1, || {
            "orthonormality not recorded per iteration".into()
        })?;
        let g = fit.projection.matrix();
        let final_err = (g.transpose() * g - DMatrix::identity(g.ncols(), g.ncols())).norm();
        for e in t.orthonormality.iter().chain([&final_err]) {
            worst = worst.max(*e);
        }
    }
    ensure(worst < 1e-8, || format!("orthonormality error {worst:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut reortho: f64 = 0.0;
    for _ in 0..50 {
        let p = rng.random_range(2..=20);
        let k = rng.random_range(1..=p);
        let g = random_orthonormal(p, k, &mut rng) + DMatrix::from_fn(p, k, |_, _| rng.random_range(-0.1..0.1));
        let q = reorthonormalize(&g).map_err(|e| e.to_string())?.into_matrix();
        reortho = reortho.max((q.transpose() * &q - DMatrix::identity(k, k)).norm());
    }
    ensure(reortho < 1e-12, || format!("reorthonormalize error {reortho:e}"))?;
    Ok(format!(
        "{runs} fits, max error {worst:.1e}; reorthonormalize {reortho:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let (x, l) = standard_instance(0);
    ensure(x.p() == 20 && x.n() == 90 && l.num_classes() == 3, || {
        "unexpected instance shape".into()
    })?;
    let cfg = OptConfig {
        tau: 0.001,
        rel_tol: 1e-8,
        max_iters: 500,
        ..OptConfig::default()
    };
    let start = Instant::now();
    let fit = fit_kalda(&x, &l, 2, &cfg).map_err(|e| e.to_string())?;
    within_budget(start, Duration::from_secs(2))?;
    let t = &fit.trace;
    ensure(t.converged && t.iterations_run <= 500, || {
        format!("not converged after {} iterations", t.iterations_run)
    })?;
    let worst_drop = t.objective_values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    ensure(worst_drop <= 1e-9, || format!("objective decreased by {worst_drop:e}"))?;
    Ok(format!(
        "converged in {} iterations, J1 {:.6} -> {:.6}",
        t.iterations_run,
        t.initial_objective(),
        t.final_objective()
    ))
}

fn criterion_8() -> Outcome {
    let mut count = 0;
    for (i, (x, l, k)) in fit_suite().into_iter().enumerate() {
        let fit = fit_kalda(&x, &l, k, &OptConfig::default()).map_err(|e| e.to_string())?;
        let (a, b) = (fit.trace.initial_objective(), fit.trace.final_objective());
        ensure(b >= a, || format!("instance {i}: final {b} below init {a}"))?;
        count += 1;
    }

    let (x, l) = standard_instance(0);
    let fit = fit_kalda(&x, &l, 2, &OptConfig::default()).map_err(|e| e.to_string())?;
    ensure(fit.init_source == InitSource::ClassicalLda, || {
        format!("init came from {:?}", fit.init_source)
    })?;
    // independent orthonormalization of the raw LDA directions
    let (xc, _) = center(&x, &l).unwrap();
    let s = compute_scatter(&xc, &l).unwrap();
    let lda = fit_classical_lda(&s, 2).map_err(|e| e.to_string())?.eigenvectors;
    let q = lda.qr().q();
    let (sb, st) = oracle_scatter(xc.as_matrix(), l.memberships(), 3);
    let init = oracle_j1(&q, &sb, &st);
    let fin = oracle_j1(fit.projection.matrix(), &sb, &st);
    ensure((init - fit.trace.initial_objective()).abs() < 1e-10, || {
        "init differs from orthonormalized LDA".into()
    })?;
    ensure(fin - init > 1e-6, || format!("margin {:e}", fin - init))?;
    Ok(format!(
        "{count} random fits non-decreasing; Gaussian margin {:.2e}",
        fin - init
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let (x, l) = centered_single(&mut rng, 12, 50, 5);
        let s = compute_scatter(&x, &l).map_err(|e| e.to_string())?;
        let k = rng.random_range(1..=(l.num_classes() - 1).min(x.p()));
        let fit = fit_trace_ratio(&s, k, 1e-10).map_err(|e| e.to_string())?;
        ensure(fit.lambdas.windows(2).all(|w| w[1] >= w[0]), || {
            format!("instance {i}: lambda decreased: {:?}", fit.lambdas)
        })?;
    }

    let s = ScatterSet::new(
        DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 0.0])),
        DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])),
        None,
    )
    .unwrap();
    let fit = fit_trace_ratio(&s, 1, 1e-12).map_err(|e| e.to_string())?;
    let g = fit.projection.matrix();
    // brute-force maximizer of the ratio over the half circle
    let (best, _) = (0..31416)
        .map(|i| {
            let t = i as f64 * 1e-4;
            let (c, sn) = (t.cos(), t.sin());
            (t, 4.0 * c * c / (4.0 * c * c + sn * sn))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let cos_sweep = (g[(0, 0)] * best.cos() + g[(1, 0)] * best.sin()).abs();
    ensure((fit.lambda - 1.0).abs() <= 1e-8, || format!("lambda {}", fit.lambda))?;
    ensure(g[(0, 0)].abs() > 1.0 - 1e-6, || {
        format!("|cos| to e1 {}", g[(0, 0)].abs())
    })?;
    ensure(cos_sweep > 1.0 - 1e-6, || {
        format!("|cos| to sweep maximizer {cos_sweep}")
    })?;
    Ok(format!(
        "50 monotone sequences; closed instance lambda {:.12}",
        fit.lambda
    ))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let (x, l) = gaussian_classes(20, 50, 3, 6.0, 1.0, 0);
    let kalda = cross_validate(&x, &l, &Method::Kalda(OptConfig::default()), 2, 5, 3, 0).map_err(|e| e.to_string())?;
    let lda = cross_validate(&x, &l, &Method::Lda, 2, 5, 3, 0).map_err(|e| e.to_string())?;
    within_budget(start, Duration::from_secs(30))?;
    ensure(kalda.fold_of == lda.fold_of, || "methods saw different folds".into())?;
    let (a, b) = (kalda.mean.accuracy, lda.mean.accuracy);
    ensure(a >= 0.95, || format!("kaLDA accuracy {a}"))?;
    ensure(a >= b - 0.02, || format!("kaLDA {a} vs LDA {b}"))?;
    for (f, (ka, la)) in kalda.folds.iter().zip(&lda.folds).enumerate() {
        ensure(ka.accuracy >= la.accuracy - 0.02, || {
            format!("fold {f}: kaLDA {} vs LDA {}", ka.accuracy, la.accuracy)
        })?;
    }
    Ok(format!("kaLDA {a:.4}, LDA {b:.4}"))
}

fn criterion_11() -> Outcome {
    let truth = LabelAssignment::from_single(&[0, 0, 1, 1]).unwrap();
    let pred = PredictionSet {
        mode: LabelMode::Single,
        predictions: vec![vec![0], vec![1], vec![1], vec![1]],
    };
    let s = score_single(&pred, &truth).map_err(|e| e.to_string())?;
    ensure((s.accuracy - 0.75).abs() <= 1e-12, || {
        format!("accuracy {}", s.accuracy)
    })?;
    ensure((s.macro_f1 - 11.0 / 15.0).abs() <= 1e-12, || {
        format!("macro F1 {}", s.macro_f1)
    })?;
    ensure((s.micro_f1 - 0.75).abs() <= 1e-12, || {
        format!("micro F1 {}", s.micro_f1)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let k = rng.random_range(2..=6);
        let n = rng.random_range(k..=80);
        let mut ids: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        ids[..k].iter_mut().enumerate().for_each(|(c, v)| *v = c);
        let truth = LabelAssignment::from_single(&ids).unwrap();
        let predictions: Vec<Vec<usize>> = (0..n).map(|_| vec![rng.random_range(0..k)]).collect();
        let correct = predictions.iter().zip(&ids).filter(|(p, t)| p[0] == **t).count() as f64 / n as f64;
        let s = score_single(
            &PredictionSet {
                mode: LabelMode::Single,
                predictions,
            },
            &truth,
        )
        .map_err(|e| e.to_string())?;
        ensure(
            (s.micro_f1 - s.accuracy).abs() <= 1e-12 && (s.accuracy - correct).abs() <= 1e-12,
            || {
                format!(
                    "set {i}: micro {} accuracy {} expected {correct}",
                    s.micro_f1, s.accuracy
                )
            },
        )?;
    }
    Ok("hand-worked example exact; 50 random sets".into())
}

fn criterion_12() -> Outcome {
    use common::{kalda, s, write_dataset};
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let (x, l) = standard_instance(3);
    let (f, lab) = write_dataset(dir.path(), &x, &l);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let model = dir.path().join(format!("model{run}.txt"));
        let cv = dir.path().join(format!("cv{run}.csv"));
        let fit = kalda(&[
            "fit",
            "--features",
            s(&f),
            "--labels",
            s(&lab),
            "--model",
            s(&model),
            "--seed",
            "7",
        ]);
        let crossval = kalda(&[
            "crossval",
            "--features",
            s(&f),
            "--labels",
            s(&lab),
            "--method",
            "kalda,lda,tr,mmc",
            "--seed",
            "7",
            "--out",
            s(&cv),
        ]);
        for out in [&fit, &crossval] {
            ensure(out.status.success(), || {
                String::from_utf8_lossy(&out.stderr).into_owned()
            })?;
        }
        outputs.push((std::fs::read(&model).unwrap(), std::fs::read(&cv).unwrap()));
    }
    ensure(outputs[0].0 == outputs[1].0, || "model files differ".into())?;
    ensure(outputs[0].1 == outputs[1].1, || "crossval files differ".into())?;
    Ok(format!(
        "model {} bytes, crossval {} bytes identical",
        outputs[0].0.len(),
        outputs[0].1.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("alignment identity, full space", criterion_1),
        ("alignment identity, subspace", criterion_2),
        ("multi-label identities and rho = 1 reduction", criterion_3),
        ("factored scatters match definitions", criterion_4),
        ("gradient vs finite differences", criterion_5),
        ("orthonormality preserved", criterion_6),
        ("convergence on standard instance", criterion_7),
        ("improvement over init", criterion_8),
        ("trace-ratio monotonicity and closed instance", criterion_9),
        ("cross-validated classification", criterion_10),
        ("metric correctness", criterion_11),
        ("CLI determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
