//! Closed-form MSE analysis of the scalar model
//! `x_t = a x_{t−1} + b w_{t−1}`, `y_t = c x_t + n_t`.
//!
//! With proper noises (`Q̄ = N₁I`, `R̄ = N₂I`) each eigenvalue of the augmented
//! error covariance evolves independently through
//! `g_t(λ) = N₂(|a|²λ + |b|²N₁) / (|c|²(|a|²λ + |b|²N₁) + N₂)`, so the WLCKF
//! MSE is `½(q_t(λ₁⁰) + q_t(λ₂⁰))` while the CKF sees only `q_t(P₀|₀)`.
//! With improper noises there is no eigen decoupling and the 2×2 augmented
//! recursion is iterated directly.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::augmented::{eigenvalues_scalar_augmented, right_divide_selfadjoint, AugmentedMatrix, CMat};
use crate::error::{Error, Result};

/// Coefficients `(a, b, c)` used at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl StepCoefficients {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    pub fn unit() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, one, one)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarModelParams {
    pub coefficients: StepCoefficients,
    /// Optional per-step override; step `t` (1-based) uses entry `t − 1`, and
    /// the last entry repeats once the schedule runs out.
    pub schedule: Option<Vec<StepCoefficients>>,
    pub n1: f64,
    pub n2: f64,
    pub p00: f64,
    pub p00_tilde: Complex64,
}

impl ScalarModelParams {
    /// `a = b = c = 1`, proper initial state.
    pub fn new(n1: f64, n2: f64, p00: f64) -> Self {
        Self {
            coefficients: StepCoefficients::unit(),
            schedule: None,
            n1,
            n2,
            p00,
            p00_tilde: Complex64::new(0.0, 0.0),
        }
    }

    pub fn with_coefficients(mut self, a: Complex64, b: Complex64, c: Complex64) -> Self {
        self.coefficients = StepCoefficients::new(a, b, c);
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<StepCoefficients>) -> Self {
        self.schedule = Some(schedule);
        self
    }

    pub fn with_p00_tilde(mut self, p00_tilde: Complex64) -> Self {
        self.p00_tilde = p00_tilde;
        self
    }

    pub fn at(&self, t: usize) -> StepCoefficients {
        match &self.schedule {
            Some(s) if !s.is_empty() => s[t.saturating_sub(1).min(s.len() - 1)],
            _ => self.coefficients,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n1 >= 0.0 && self.n2 >= 0.0 && self.p00 >= 0.0) {
            return Err(Error::Degenerate(format!(
                "variances must be nonnegative (N1={}, N2={}, P00={})",
                self.n1, self.n2, self.p00
            )));
        }
        eigenvalues_scalar_augmented(self.p00, self.p00_tilde).map(|_| ())
    }

    /// Eigenvalues `(P₀|₀ + |P̃₀|₀|, P₀|₀ − |P̃₀|₀|)` of the initial augmented covariance.
    pub fn initial_eigenvalues(&self) -> Result<(f64, f64)> {
        eigenvalues_scalar_augmented(self.p00, self.p00_tilde)
    }
}

/// One eigenvalue step `g_t(λ)`.
pub fn g(lambda: f64, t: usize, params: &ScalarModelParams) -> f64 {
    let k = params.at(t);
    let prior = k.a.norm_sqr() * lambda + k.b.norm_sqr() * params.n1;
    let c2 = k.c.norm_sqr();
    if c2 == 0.0 {
        // nothing is observed
        return prior;
    }
    let denom = c2 * prior + params.n2;
    if denom == 0.0 {
        return 0.0;
    }
    params.n2 * prior / denom
}

/// `q_t = g_t ∘ … ∘ g_1`.
pub fn q(lambda0: f64, t: usize, params: &ScalarModelParams) -> f64 {
    (1..=t).fold(lambda0, |l, step| g(l, step, params))
}

/// `[q_1(λ₀), …, q_T(λ₀)]`.
pub fn q_trajectory(lambda0: f64, t_max: usize, params: &ScalarModelParams) -> Vec<f64> {
    let mut l = lambda0;
    (1..=t_max)
        .map(|t| {
            l = g(l, t, params);
            l
        })
        .collect()
}

/// WLCKF MSE at step `t`: `½(q_t(λ₁⁰) + q_t(λ₂⁰))`.
pub fn wlmmse_case1(params: &ScalarModelParams, t: usize) -> Result<f64> {
    params.validate()?;
    let (l1, l2) = params.initial_eigenvalues()?;
    Ok(0.5 * (q(l1, t, params) + q(l2, t, params)))
}

/// CKF MSE at step `t`: `q_t(P₀|₀)`.
pub fn lmmse_case1(params: &ScalarModelParams, t: usize) -> Result<f64> {
    params.validate()?;
    Ok(q(params.p00, t, params))
}

/// `θ_t = (q_t(2P₀|₀) + q_t(0)) / (2 q_t(P₀|₀))`, best-case WLCKF over CKF MSE.
pub fn theta_ratio(params: &ScalarModelParams, t: usize) -> Result<f64> {
    params.validate()?;
    let denom = 2.0 * q(params.p00, t, params);
    if denom <= 0.0 {
        return Err(Error::Degenerate("q_t(P00) vanishes; theta is undefined".into()));
    }
    Ok((q(2.0 * params.p00, t, params) + q(0.0, t, params)) / denom)
}

/// `θ_1 … θ_T` in one pass.
pub fn theta_trajectory(params: &ScalarModelParams, t_max: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let hi = q_trajectory(2.0 * params.p00, t_max, params);
    let mid = q_trajectory(params.p00, t_max, params);
    let lo = q_trajectory(0.0, t_max, params);
    hi.iter()
        .zip(&mid)
        .zip(&lo)
        .map(|((h, m), l)| {
            if *m <= 0.0 {
                Err(Error::Degenerate("q_t(P00) vanishes; theta is undefined".into()))
            } else {
                Ok((h + l) / (2.0 * m))
            }
        })
        .collect()
}

/// Grid evaluation of `½(q_t(λ₁) + q_t(λ₂))` along `λ₁ + λ₂ = 2P₀|₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurReport {
    /// `(λ₁, λ₂, ξ)` for every grid point, `λ₁` ascending from 0 to `2P₀|₀`.
    pub values: Vec<(f64, f64, f64)>,
    pub argmin: usize,
    pub argmax: usize,
    /// The minimum sits at an endpoint split `[2P₀|₀, 0]` (or its mirror).
    pub min_at_endpoint: bool,
    /// The maximum sits at the symmetric split `[P₀|₀, P₀|₀]`.
    pub max_at_center: bool,
}

/// Checks on a grid that the extreme eigenvalue split minimizes the WLCKF MSE.
///
/// The trace of `P̄₀|₀` is `2P₀|₀` whatever `P̃₀|₀` is, so the feasible
/// eigenvalue pairs lie on the segment `λ₁ + λ₂ = 2P₀|₀`, `λᵢ ≥ 0`.
pub fn schur_min_check(params: &ScalarModelParams, t: usize, points: usize) -> Result<SchurReport> {
    params.validate()?;
    if points < 3 || points % 2 == 0 {
        return Err(Error::Dimension(format!("grid needs an odd number ≥ 3 of points, got {points}")));
    }
    let total = 2.0 * params.p00;
    let values: Vec<(f64, f64, f64)> = (0..points)
        .map(|k| {
            let l1 = total * k as f64 / (points - 1) as f64;
            let l2 = total - l1;
            (l1, l2, 0.5 * (q(l1, t, params) + q(l2, t, params)))
        })
        .collect();
    let xi = |i: usize| values[i].2;
    let argmin = (0..points).fold(0, |best, i| if xi(i) < xi(best) { i } else { best });
    let argmax = (0..points).fold(0, |best, i| if xi(i) > xi(best) { i } else { best });
    let tol = 1e-14 * xi(argmax).max(1e-300);
    let min = xi(argmin);
    let max = xi(argmax);
    Ok(SchurReport {
        min_at_endpoint: xi(0) <= min + tol && xi(points - 1) <= min + tol,
        max_at_center: xi(points / 2) >= max - tol,
        argmin,
        argmax,
        values,
    })
}

/// Random Case 1 parameters: unit-disc-ish complex coefficients and
/// log-uniform variances over several decades.
pub fn random_case1_params<R: Rng + ?Sized>(rng: &mut R) -> ScalarModelParams {
    let coef = |rng: &mut R| {
        let mag = 10f64.powf(rng.random_range(-1.0..0.5));
        Complex64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU))
    };
    let a = coef(rng);
    let b = coef(rng);
    let c = coef(rng);
    let n1 = 10f64.powf(rng.random_range(-6.0..2.0));
    let n2 = 10f64.powf(rng.random_range(-6.0..2.0));
    let p00 = 10f64.powf(rng.random_range(-3.0..2.0));
    let rho = rng.random_range(0.0..=1.0);
    let tilde = Complex64::from_polar(rho * p00, rng.random_range(0.0..std::f64::consts::TAU));
    ScalarModelParams::new(n1, n2, p00)
        .with_coefficients(a, b, c)
        .with_p00_tilde(tilde)
}

/// Augmented scalar covariance recursion in covariance form, for arbitrary
/// (possibly improper, possibly singular) `Q̄`, `R̄`.
///
/// Returns `P̄_{t|t}` for `t = 1 … T`, starting from `P̄₀|₀`.
pub fn augmented_scalar_recursion(
    p0: &AugmentedMatrix,
    q_bar: &AugmentedMatrix,
    r_bar: &AugmentedMatrix,
    coefficients: impl Fn(usize) -> StepCoefficients,
    t_max: usize,
) -> Result<Vec<AugmentedMatrix>> {
    let scalar = |z: Complex64| AugmentedMatrix::strictly_linear(CMat::from_element(1, 1, z));
    let mut p = p0.clone();
    let mut out = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let k = coefficients(t);
        let (a, b, c) = (scalar(k.a), scalar(k.b), scalar(k.c));
        let pred = a
            .mul(&p)?
            .mul(&a.adjoint())?
            .add(&b.mul(q_bar)?.mul(&b.adjoint())?)?;
        let cross = pred.mul(&c.adjoint())?;
        let s = c.mul(&cross)?.add(r_bar)?;
        let (gain, _) = right_divide_selfadjoint(&cross.full(), &s.full());
        let gain = AugmentedMatrix::from_full(&gain)?;
        p = pred.sub(&gain.mul(&s)?.mul(&gain.adjoint())?)?.symmetrize();
        out.push(p.clone());
    }
    Ok(out)
}

/// Convergence rule for Case 2: `|Δ ½tr P̄| < 1e−12` or 10⁴ iterations.
pub const CASE2_TOL: f64 = 1e-12;
pub const CASE2_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Result {
    /// `MSE_CKF / MSE_WLCKF` at convergence.
    pub ratio: f64,
    pub mse_wl: f64,
    pub mse_sl: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn db_to_power(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn improper_scalar(power: f64, rho: Complex64) -> Result<AugmentedMatrix> {
    AugmentedMatrix::new(
        CMat::from_element(1, 1, Complex64::new(power, 0.0)),
        CMat::from_element(1, 1, rho * power),
    )
}

/// Improvement of the WLCKF over the CKF with improper driving and measurement
/// noise: `P₀|₀ = 1`, `a = b = c = 1`, `Q̄ = N₁[[1, ρ_w], [ρ_w*, 1]]`,
/// `R̄ = N₂[[1, ρ_n], [ρ_n*, 1]]`, both recursions run to convergence.
pub fn case2_improvement(
    rho_w: Complex64,
    rho_n: Complex64,
    n1_db: f64,
    n2_db: f64,
    horizon: usize,
    tol: f64,
) -> Result<Case2Result> {
    if rho_w.norm() > 1.0 || rho_n.norm() > 1.0 {
        return Err(Error::Degenerate(format!(
            "correlation coefficients must lie in the unit disc (|ρ_w|={}, |ρ_n|={})",
            rho_w.norm(),
            rho_n.norm()
        )));
    }
    let n1 = db_to_power(n1_db);
    let n2 = db_to_power(n2_db);
    let q_bar = improper_scalar(n1, rho_w)?;
    let r_bar = improper_scalar(n2, rho_n)?;

    let mut p_wl = AugmentedMatrix::identity(1);
    let mut p_sl = 1.0f64;
    let mut mse_wl = p_wl.trace() / 2.0;
    let mut mse_sl = p_sl;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < horizon {
        iterations += 1;
        p_wl = augmented_scalar_recursion(&p_wl, &q_bar, &r_bar, |_| StepCoefficients::unit(), 1)?
            .pop()
            .expect("one step");
        // strictly linear recursion over Hermitian blocks only
        let pred = p_sl + n1;
        p_sl = pred * n2 / (pred + n2);
        let next_wl = p_wl.trace() / 2.0;
        let next_sl = p_sl;
        let done = (next_wl - mse_wl).abs() < tol && (next_sl - mse_sl).abs() < tol;
        mse_wl = next_wl;
        mse_sl = next_sl;
        if done {
            converged = true;
            break;
        }
    }
    Ok(Case2Result {
        ratio: mse_sl / mse_wl,
        mse_wl,
        mse_sl,
        iterations,
        converged,
    })
}

/// One row of the improvement surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho_w_abs: f64,
    pub rho_n_abs: f64,
    #[serde(rename = "N1_db")]
    pub n1_db: f64,
    #[serde(rename = "N2_db")]
    pub n2_db: f64,
    pub ratio: f64,
    pub converged_iters: usize,
}

/// `(N₁, N₂)` dB pairs of the three reference panels.
pub const REFERENCE_PANELS: [(f64, f64); 3] = [(-20.0, -20.0), (-20.0, -40.0), (-40.0, -20.0)];

/// Default phase of `ρ_n` relative to `ρ_w` in sweeps.
///
/// Only magnitudes are swept, so a phase convention is needed. With aligned
/// phases the real and imaginary channels see `Q` and `R` scaled by the same
/// factor and the ratio collapses to 1 on the diagonal `|ρ_w| = |ρ_n|`;
/// anti-aligned phases give surfaces monotone in both magnitudes.
pub const DEFAULT_RHO_N_PHASE: f64 = std::f64::consts::PI;

/// Improvement surface over `|ρ_w| × |ρ_n|` for each noise-level panel, with
/// `ρ_w = |ρ_w|` and `ρ_n = |ρ_n| e^{j·rho_n_phase}`. Rows come back in grid order.
pub fn case2_sweep(
    rho_w_grid: &[f64],
    rho_n_grid: &[f64],
    rho_n_phase: f64,
    panels: &[(f64, f64)],
    horizon: usize,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    let grid: Vec<(f64, f64, f64, f64)> = panels
        .iter()
        .flat_map(|&(n1, n2)| {
            rho_w_grid
                .iter()
                .flat_map(move |&rw| rho_n_grid.iter().map(move |&rn| (n1, n2, rw, rn)))
        })
        .collect();
    grid.par_iter()
        .map(|&(n1_db, n2_db, rw, rn)| {
            let res = case2_improvement(Complex64::new(rw, 0.0), Complex64::from_polar(rn, rho_n_phase), n1_db, n2_db, horizon, tol)?;
            Ok(SweepRow {
                rho_w_abs: rw,
                rho_n_abs: rn,
                n1_db,
                n2_db,
                ratio: res.ratio,
                converged_iters: if res.converged { res.iterations } else { 0 },
            })
        })
        .collect()
}

/// Writes rows as CSV with a header; floats use the shortest round-trip form.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
