//! Widely linear state-space models and the three linear filters: the WLCKF,
//! the strictly linear CKF baseline and the dual-channel real KF oracle.

mod filter;
mod model;
mod real_kf;
mod simulate;

pub use filter::{
    ckf_run, strictly_linear_residual, wlckf_predict, wlckf_run, wlckf_step, wlckf_update,
    FilterState, StepReport,
};
pub use model::{model_from_real, RealModel, WidelyLinearModel};
pub use real_kf::{real_kf_run, RealStep};
pub use simulate::{simulate_linear, Trajectory};

use rand::Rng;
use rand_distr::StandardNormal;

use num_complex::Complex64;

use crate::augmented::{max_abs_r, AugmentedMatrix, CMat, RMat, RVec};
use crate::error::Result;

/// Real composite of a complex measurement, `[Re y; Im y]`.
pub fn measurement_to_real(y: &crate::augmented::CVec) -> RVec {
    let m = y.len();
    RVec::from_fn(2 * m, |i, _| if i < m { y[i].re } else { y[i - m].im })
}

/// Draws a random dual-channel real model with `n` complex states, `m` complex
/// measurements and a transition scaled to spectral norm at most `0.95`.
///
/// Noise covariances are random PSD matrices, so the augmented model is
/// generically improper in every component.
pub fn random_real_model<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> RealModel {
    let mut gauss = |r: usize, c: usize| RMat::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut e = gauss(2 * n, 2 * n);
    let norm = e.singular_values().max();
    if norm > 0.0 {
        e *= 0.95 / norm;
    }
    let f = gauss(2 * n, 2 * n);
    let g = gauss(2 * m, 2 * n);
    let lq = gauss(2 * n, 2 * n) * 0.5;
    let lr = gauss(2 * m, 2 * m) * 0.5;
    let lp = gauss(2 * n, 2 * n);
    RealModel {
        e,
        f,
        g,
        q: &lq * lq.transpose(),
        r: &lr * lr.transpose() + RMat::identity(2 * m, 2 * m) * 0.05,
        pi0: &lp * lp.transpose(),
        mean0: RVec::zeros(2 * n),
    }
}

/// Draws a model with `A2 = B2 = C2 = 0` and proper noises and initial state,
/// transition scaled to spectral norm `0.9`.
pub fn random_proper_model<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<WidelyLinearModel> {
    let mut cmat = |r: usize, c: usize| {
        CMat::from_fn(r, c, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    };
    let mut a = cmat(n, n);
    let norm = a.singular_values().max();
    if norm > 0.0 {
        a *= Complex64::new(0.9 / norm, 0.0);
    }
    let b = cmat(n, n);
    let c = cmat(m, n);
    let mut hermitian = |k: usize, ridge: f64| {
        let l = cmat(k, k) * Complex64::new(0.5, 0.0);
        &l * l.adjoint() + CMat::identity(k, k) * Complex64::new(ridge, 0.0)
    };
    let q = hermitian(n, 0.0);
    let r = hermitian(m, 0.05);
    let pi0 = hermitian(n, 0.0);
    WidelyLinearModel::new(
        AugmentedMatrix::strictly_linear(a),
        AugmentedMatrix::strictly_linear(b),
        AugmentedMatrix::strictly_linear(c),
        AugmentedMatrix::strictly_linear(q),
        AugmentedMatrix::strictly_linear(r),
        AugmentedMatrix::strictly_linear(pi0),
    )
}

/// Largest relative deviation between a WLCKF run and the real KF oracle,
/// as `(estimate deviation, covariance deviation)`.
pub fn oracle_deviation(wl: &[StepReport], real: &[RealStep]) -> Result<(f64, f64)> {
    use crate::augmented::{augmented_to_real, augmented_to_real_matrix, TransformMode};
    let mut dev_x: f64 = 0.0;
    let mut dev_p: f64 = 0.0;
    for (w, r) in wl.iter().zip(real) {
        let x = augmented_to_real(&w.posterior.estimate)?;
        let p = augmented_to_real_matrix(&w.posterior.cov, TransformMode::Covariance)?;
        let sx = r.estimate.amax().max(1.0);
        let sp = max_abs_r(&r.cov).max(1.0);
        dev_x = dev_x.max((x - &r.estimate).amax() / sx);
        dev_p = dev_p.max(max_abs_r(&(p - &r.cov)) / sp);
    }
    Ok((dev_x, dev_p))
}
