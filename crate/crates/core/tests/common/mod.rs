//! Grids and tolerances shared by the integration tests, kept in one place
//! so every threshold can be audited.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// specfun
pub const I_REL_TOL: f64 = 1e-13;
pub const K_REL_TOL: f64 = 1e-12;
pub const WRONSKIAN_RANGE: (f64, f64) = (0.05, 30.0);
pub const WRONSKIAN_POINTS: usize = 600;
pub const WRONSKIAN_TOL: f64 = 1e-12;
pub const DERIVATIVE_RANGE: (f64, f64) = (0.1, 10.0);
pub const DERIVATIVE_POINTS: usize = 200;
pub const DERIVATIVE_STEP: f64 = 1e-5;
pub const DERIVATIVE_TOL: f64 = 1e-8;
pub const RATIO_BOUND_RANGE: (f64, f64) = (1e-3, 30.0);
pub const RATIO_BOUND_POINTS: usize = 500;

// dnmap
pub const JAEGER_TRIPLES: usize = 200;
pub const JAEGER_RANGE: (f64, f64) = (0.1, 5.0);
pub const JAEGER_PRODUCT_TOL: f64 = 1e-11;
pub const JAEGER_SIMPLE_TOL: f64 = 1e-12;
pub const FORM_GRID: usize = 20;
pub const FORM_R1: (f64, f64) = (0.05, 0.95);
pub const FORM_SIGMA: (f64, f64) = (0.05, 20.0);
pub const FORM_TOL: f64 = 1e-11;
pub const FORM_WIDE_GRID: usize = 400;
pub const UNIQUENESS_R1: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const UNIQUENESS_SIGMA: (f64, f64) = (0.05, 20.0);
pub const UNIQUENESS_POINTS: usize = 30;
pub const UNIQUENESS_GAP: f64 = 1e-10;
pub const MONOTONE_R: [f64; 3] = [0.3, 0.7, 2.0];
pub const MONOTONE_ETA: (f64, f64) = (0.05, 50.0);
pub const MONOTONE_POINTS: usize = 200;

// fdsolver
pub const FD_SIZES: [usize; 4] = [100, 200, 400, 800];
pub const RATIO_BAND: (f64, f64) = (1.7, 2.3);
pub const TABLE_LAMBDA_TOL: f64 = 5e-4;

// inverse
pub const NOISE_SEEDS: u64 = 100_000;
pub const GRADIENT_POINTS: usize = 50;
pub const GRADIENT_REL_TOL: f64 = 1e-6;

// camouflage
pub const MONOTONE_SAMPLES: usize = 1000;
pub const PERTURBATION: f64 = 1e-3;

/// `n` points from `lo` to `hi` inclusive, evenly spaced.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `n` points from `lo` to `hi` inclusive, evenly spaced in `ln x`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

pub fn uniform_triples(n: usize, (lo, hi): (f64, f64), seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.random_range(lo..hi), rng.random_range(lo..hi), rng.random_range(lo..hi)))
        .collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}
