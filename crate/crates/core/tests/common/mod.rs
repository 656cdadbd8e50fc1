//! Random operators shared by the integration suites.

#![allow(dead_code)]

use nonlocal_periodic::{OperatorSpec, PotentialSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized real potential of order `1..=k_max` with coefficients
/// drawn from `[-1, 1]`.
pub fn random_potential(rng: &mut ChaCha8Rng, k_max: usize) -> PotentialSpec {
    let order = rng.gen_range(1..=k_max);
    let c0 = rng.gen_range(-1.0..1.0);
    let pairs: Vec<(usize, f64, f64)> = (1..=order)
        .map(|k| (k, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PotentialSpec::build(c0, &pairs, true).expect("nonzero potential")
}

/// Operator with `α` uniform in `[-a, a]`, kept away from zero.
pub fn random_operator(rng: &mut ChaCha8Rng, k_max: usize, a: f64) -> OperatorSpec {
    let v = random_potential(rng, k_max);
    let mut alpha: f64 = 0.0;
    while alpha.abs() < 1e-3 {
        alpha = rng.gen_range(-a..a);
    }
    OperatorSpec::new(alpha, v).expect("finite coupling")
}

/// Operator with `α` drawn from a fixed set.
pub fn random_operator_from(rng: &mut ChaCha8Rng, k_max: usize, alphas: &[f64]) -> OperatorSpec {
    let v = random_potential(rng, k_max);
    let alpha = alphas[rng.gen_range(0..alphas.len())];
    OperatorSpec::new(alpha, v).expect("finite coupling")
}

/// Window holding every eigenvalue produced by the secular equation.
pub fn complete_window(op: &OperatorSpec) -> f64 {
    let k = op.potential.order() as f64;
    4.0 * (k + 1.0) * (k + 1.0) + op.alpha.abs() + 4.0
}
