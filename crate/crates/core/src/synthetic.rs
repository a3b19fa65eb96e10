//! Seeded synthetic instances for tests, benchmarks and the acceptance suite.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{DataMatrix, LabelAssignment};

/// Isotropic Gaussian classes with means `(separation·σ/√2)·e_k`, so every
/// pair of class means is `separation·σ` apart. Samples are class-contiguous.
pub fn gaussian_classes(
    p: usize,
    per_class: usize,
    num_classes: usize,
    separation: f64,
    sigma: f64,
    seed: u64,
) -> (DataMatrix, LabelAssignment) {
    assert!(num_classes <= p, "need p ≥ K to place orthogonal class means");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = per_class * num_classes;
    let offset = separation * sigma / std::f64::consts::SQRT_2;
    let mut x = DMatrix::zeros(p, n);
    let mut ids = Vec::with_capacity(n);
    for j in 0..n {
        let class = j / per_class;
        ids.push(class);
        for i in 0..p {
            let noise: f64 = StandardNormal.sample(&mut rng);
            x[(i, j)] = sigma * noise + if i == class { offset } else { 0.0 };
        }
    }
    let labels = LabelAssignment::from_single(&ids).expect("every class is populated");
    (DataMatrix::new(x).expect("finite"), labels)
}

/// The reference 3-class instance: `p = 20`, 30 samples per class, means
/// 6σ apart.
pub fn standard_instance(seed: u64) -> (DataMatrix, LabelAssignment) {
    gaussian_classes(20, 30, 3, 6.0, 1.0, seed)
}

/// Standard-normal data with uniformly random single labels. The first `K`
/// samples cover every class once.
pub fn random_single_instance<R: Rng + ?Sized>(
    rng: &mut R,
    p: usize,
    n: usize,
    num_classes: usize,
) -> (DataMatrix, LabelAssignment) {
    assert!(n >= num_classes && n >= 2);
    let x = DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut *rng));
    let ids: Vec<usize> = (0..n)
        .map(|i| {
            if i < num_classes {
                i
            } else {
                rng.random_range(0..num_classes)
            }
        })
        .collect();
    (
        DataMatrix::new(x).expect("finite"),
        LabelAssignment::from_single(&ids).expect("classes covered"),
    )
}

/// Standard-normal data where each sample carries `ρ_i ∈ 1..=max_labels`
/// distinct classes. The first `K` samples include class `i` so no class
/// is empty.
pub fn random_multi_instance<R: Rng + ?Sized>(
    rng: &mut R,
    p: usize,
    n: usize,
    num_classes: usize,
    max_labels: usize,
) -> (DataMatrix, LabelAssignment) {
    assert!(n >= num_classes && max_labels >= 1 && max_labels <= num_classes);
    let x = DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut *rng));
    let sets: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let rho = rng.random_range(1..=max_labels);
            let mut set: Vec<usize> = if i < num_classes { vec![i] } else { Vec::new() };
            while set.len() < rho {
                let c = rng.random_range(0..num_classes);
                if !set.contains(&c) {
                    set.push(c);
                }
            }
            set
        })
        .collect();
    (
        DataMatrix::new(x).expect("finite"),
        LabelAssignment::new(sets, num_classes).expect("classes covered"),
    )
}
