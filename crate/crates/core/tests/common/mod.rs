#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use wlckf::augmented::{AugmentedMatrix, CMat};
use wlckf::linear::WidelyLinearModel;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_cmat<R: Rng>(r: usize, k: usize, rng: &mut R) -> CMat {
    CMat::from_fn(r, k, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Hermitian PSD `L Lᴴ` plus a ridge.
pub fn random_hermitian<R: Rng>(n: usize, ridge: f64, rng: &mut R) -> CMat {
    let l = random_cmat(n, n, rng) * c(0.5, 0.0);
    &l * l.adjoint() + CMat::identity(n, n) * c(ridge, 0.0)
}

/// A model with `A2 = B2 = C2 = 0` and proper noises and initial state.
pub fn random_proper_model<R: Rng>(n: usize, m: usize, rng: &mut R) -> WidelyLinearModel {
    wlckf::linear::random_proper_model(n, m, rng).unwrap()
}

/// Generic improper stats from a random composite covariance `L Lᵀ` and mean.
pub fn random_improper_stats<R: Rng>(n: usize, rng: &mut R) -> wlckf::SecondOrderStats {
    use wlckf::augmented::{RMat, RVec};
    let l = RMat::from_fn(2 * n, 2 * n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mean = RVec::from_fn(2 * n, |_, _| rng.sample::<f64, _>(StandardNormal));
    wlckf::SecondOrderStats::from_composite(&mean, &(&l * l.transpose())).unwrap()
}

/// Improvement-surface grid pinned by the golden CSV fixture.
pub const GOLDEN_RHO_GRID: [f64; 7] = [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.999];
pub const GOLDEN_SWEEP_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/case2_sweep.csv");

pub fn golden_sweep_csv() -> String {
    use wlckf::mse::{case2_sweep, write_csv, CASE2_MAX_ITERS, CASE2_TOL, DEFAULT_RHO_N_PHASE, REFERENCE_PANELS};
    let rows = case2_sweep(
        &GOLDEN_RHO_GRID,
        &GOLDEN_RHO_GRID,
        DEFAULT_RHO_N_PHASE,
        &REFERENCE_PANELS,
        CASE2_MAX_ITERS,
        CASE2_TOL,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

/// Scalar model `a, b, c` with proper noises `N1`, `N2` and initial `(P00, P̃00)`.
pub fn scalar_model(a: Complex64, b: Complex64, cc: Complex64, n1: f64, n2: f64, p00: f64, p00_tilde: Complex64) -> WidelyLinearModel {
    let s = |z: Complex64| AugmentedMatrix::strictly_linear(CMat::from_element(1, 1, z));
    WidelyLinearModel::new(
        s(a),
        s(b),
        s(cc),
        AugmentedMatrix::identity(1).scale(n1),
        AugmentedMatrix::identity(1).scale(n2),
        AugmentedMatrix::new(CMat::from_element(1, 1, c(p00, 0.0)), CMat::from_element(1, 1, p00_tilde)).unwrap(),
    )
    .unwrap()
}
