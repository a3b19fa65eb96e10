#![allow(dead_code)]

use kalda_core::dataset::{center, DataMatrix, LabelAssignment};
use kalda_core::scatter::{compute_scatter, ScatterSet};
use kalda_core::synthetic::{random_multi_instance, random_single_instance};
use nalgebra::DMatrix;
use rand::Rng;

pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm().max(a.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Random centered single-label instance with p ≤ max_p, n ≤ max_n, K ≤ max_k.
pub fn centered_single<R: Rng>(rng: &mut R, max_p: usize, max_n: usize, max_k: usize) -> (DataMatrix, LabelAssignment) {
    let p = rng.random_range(2..=max_p);
    let k = rng.random_range(2..=max_k);
    let n = rng.random_range((k + 2).max(6)..=max_n);
    let (x, l) = random_single_instance(rng, p, n, k);
    (center(&x, &l).unwrap().0, l)
}

pub fn centered_multi<R: Rng>(rng: &mut R, max_p: usize, max_n: usize, max_k: usize) -> (DataMatrix, LabelAssignment) {
    let p = rng.random_range(2..=max_p);
    let k = rng.random_range(3..=max_k);
    let n = rng.random_range((k + 2).max(6)..=max_n);
    let (x, l) = random_multi_instance(rng, p, n, k, 3);
    (center(&x, &l).unwrap().0, l)
}

pub fn scatter_of(x: &DataMatrix, l: &LabelAssignment) -> ScatterSet {
    compute_scatter(x, l).unwrap()
}
