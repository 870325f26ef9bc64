//! Phase demodulation: `θ_t = aθ_{t−1} + b w_{t−1}`, `y_t = e^{iθ_t} + n_t`
//! with improper measurement noise, tracked by the UWLCKF and by a UKF that
//! assumes the noise is proper.
//!
//! The UWLCKF carries `θ` as a complex state with zero imaginary variance, so
//! its composite sigma vector is padded with zero-variance directions. Both
//! trackers should therefore use [`UtParams::gaussian`] (`κ = 3 − L`), which
//! gives them the same effective points on the real directions; with the
//! `κ = 0` default the padded UWLCKF spreads its points wider and loses the
//! comparison during lock acquisition.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::augmented::{CVec, RMat, RVec};
use crate::error::{Error, Result};
use crate::improper::SecondOrderStats;
use crate::rng::substream;
use crate::unscented::{ukf_run, uwlckf_run, ComplexMap, NonlinearModel, RealMap, RealUkfModel, RealUkfState, UtParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseModel {
    pub a: f64,
    pub b: f64,
    pub snr_db: f64,
    /// `|ρ|` of the measurement noise, `R̃ = |ρ| R e^{iφ}`.
    pub rho_abs: f64,
    pub phi: f64,
    /// Variance of `θ₀ ~ N(0, P₀|₀)`.
    pub p00: f64,
}

impl PhaseModel {
    pub fn new(snr_db: f64, rho_abs: f64) -> Self {
        Self {
            a: 0.98,
            b: 0.05,
            snr_db,
            rho_abs,
            phi: 0.0,
            p00: 1.0,
        }
    }

    /// `R = 1/SNR`.
    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn noise_stats(&self) -> SecondOrderStats {
        let r = self.noise_variance();
        SecondOrderStats::scalar(r, Complex64::from_polar(self.rho_abs * r, self.phi))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho_abs) {
            return Err(Error::Degenerate(format!("|rho| = {} outside [0, 1]", self.rho_abs)));
        }
        if !self.snr_db.is_finite() || !(self.p00 >= 0.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::Degenerate("phase model parameters must be finite, P00 ≥ 0".into()));
        }
        Ok(())
    }

    /// The UWLCKF's view: a complex state whose driving noise and prior are
    /// real (maximally improper), plus the true noise statistics.
    pub fn uwlckf_model(&self) -> Result<NonlinearModel> {
        let (a, b) = (self.a, self.b);
        let f: ComplexMap = Arc::new(move |x, w| x * Complex64::new(a, 0.0) + w * Complex64::new(b, 0.0));
        let h: ComplexMap = Arc::new(|x, n| x.map(|z| (Complex64::i() * z).exp()) + n);
        NonlinearModel::new(
            f,
            h,
            SecondOrderStats::scalar(1.0, Complex64::new(1.0, 0.0)),
            self.noise_stats(),
            SecondOrderStats::scalar(self.p00, Complex64::new(self.p00, 0.0)),
        )
    }

    /// The baseline's view: real `θ`, measurement `[Re y; Im y]` with
    /// independent channel variances `R/2`.
    pub fn ukf_model(&self) -> RealUkfModel {
        let (a, b) = (self.a, self.b);
        let f: RealMap = Arc::new(move |x, w| RVec::from_element(1, a * x[0] + b * w[0]));
        let h: RealMap = Arc::new(|x, v| RVec::from_vec(vec![x[0].cos() + v[0], x[0].sin() + v[1]]));
        RealUkfModel {
            f,
            h,
            q: RMat::identity(1, 1),
            r: RMat::identity(2, 2) * (self.noise_variance() / 2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrajectory {
    pub theta: Vec<f64>,
    pub y: Vec<Complex64>,
}

/// Draws `θ₀ … θ_{H−1}` and `y₀ … y_{H−1}`.
///
/// The noise is drawn as `e^{iφ/2}(u + jv)` with independent
/// `u ~ N(0, R(1+|ρ|)/2)`, `v ~ N(0, R(1−|ρ|)/2)`, so the same stream gives
/// common random numbers across `|ρ|` and SNR.
pub fn simulate_phase<R: Rng + ?Sized>(model: &PhaseModel, horizon: usize, rng: &mut R) -> Result<PhaseTrajectory> {
    model.validate()?;
    if horizon == 0 {
        return Err(Error::Dimension("horizon must be at least 1".into()));
    }
    let r = model.noise_variance();
    let su = (r * (1.0 + model.rho_abs) / 2.0).sqrt();
    let sv = (r * (1.0 - model.rho_abs) / 2.0).sqrt();
    let rot = Complex64::from_polar(1.0, model.phi / 2.0);
    let mut theta = Vec::with_capacity(horizon);
    let mut y = Vec::with_capacity(horizon);
    let mut th = model.p00.sqrt() * rng.sample::<f64, _>(StandardNormal);
    for t in 0..horizon {
        if t > 0 {
            th = model.a * th + model.b * rng.sample::<f64, _>(StandardNormal);
        }
        let u: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        let n = rot * Complex64::new(su * u, sv * v);
        theta.push(th);
        y.push(Complex64::from_polar(1.0, th) + n);
    }
    Ok(PhaseTrajectory { theta, y })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracker {
    Uwlckf,
    Ukf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerOutput {
    /// Real part of `θ̂_{t|t}`.
    pub estimates: Vec<f64>,
    /// `P_{t|t}`.
    pub variances: Vec<f64>,
    /// `max_t |Im θ̂_{t|t}|`; always 0 for the real UKF.
    pub max_imag: f64,
}

/// Filters `y` from the prior `θ̂ = 0, P = P₀|₀`; `y₀` updates the prior directly.
pub fn run_tracker(model: &PhaseModel, y: &[Complex64], tracker: Tracker, params: &UtParams) -> Result<TrackerOutput> {
    model.validate()?;
    match tracker {
        Tracker::Uwlckf => {
            let ys: Vec<CVec> = y.iter().map(|&z| CVec::from_element(1, z)).collect();
            let reports = uwlckf_run(&model.uwlckf_model()?, &ys, None, params)?;
            let est: Vec<Complex64> = reports.iter().map(|r| r.posterior.estimate.top()[0]).collect();
            Ok(TrackerOutput {
                estimates: est.iter().map(|z| z.re).collect(),
                variances: reports.iter().map(|r| r.posterior.cov.m1()[(0, 0)].re).collect(),
                max_imag: est.iter().fold(0.0, |m, z| m.max(z.im.abs())),
            })
        }
        Tracker::Ukf => {
            let ys: Vec<RVec> = y.iter().map(|z| RVec::from_vec(vec![z.re, z.im])).collect();
            let prior = RealUkfState {
                estimate: RVec::zeros(1),
                cov: RMat::from_element(1, 1, model.p00),
                t: 0,
            };
            let reports = ukf_run(&model.ukf_model(), &ys, prior, false, params)?;
            Ok(TrackerOutput {
                estimates: reports.iter().map(|r| r.posterior.estimate[0]).collect(),
                variances: reports.iter().map(|r| r.posterior.cov[(0, 0)]).collect(),
                max_imag: 0.0,
            })
        }
    }
}

/// `ξ = ‖θ − θ̂‖² / ‖θ‖²`.
pub fn normalized_error(theta: &[f64], estimate: &[f64]) -> Result<f64> {
    if theta.len() != estimate.len() {
        return Err(Error::Dimension(format!("{} states vs {} estimates", theta.len(), estimate.len())));
    }
    let den: f64 = theta.iter().map(|t| t * t).sum();
    if den == 0.0 {
        return Err(Error::Degenerate("phase trajectory is identically zero".into()));
    }
    let num: f64 = theta.iter().zip(estimate).map(|(t, e)| (t - e) * (t - e)).sum();
    Ok(num / den)
}

/// Fraction of steps with `|θ_t − θ̂_t| ≤ √P_t`.
pub fn envelope_coverage(theta: &[f64], out: &TrackerOutput) -> f64 {
    let hits = theta
        .iter()
        .zip(&out.estimates)
        .zip(&out.variances)
        .filter(|((t, e), p)| (*t - *e).abs() <= p.max(0.0).sqrt())
        .count();
    hits as f64 / theta.len().max(1) as f64
}

/// Both trackers on one simulated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub xi_uwlckf: f64,
    pub xi_ukf: f64,
    pub max_imag: f64,
    pub coverage_uwlckf: f64,
}

/// Run `run` of a Monte Carlo experiment, drawn from `substream(seed, run)`.
pub fn monte_carlo_run(model: &PhaseModel, horizon: usize, seed: u64, run: u64, params: &UtParams) -> Result<RunOutcome> {
    let traj = simulate_phase(model, horizon, &mut substream(seed, run))?;
    let wl = run_tracker(model, &traj.y, Tracker::Uwlckf, params)?;
    let ukf = run_tracker(model, &traj.y, Tracker::Ukf, params)?;
    Ok(RunOutcome {
        xi_uwlckf: normalized_error(&traj.theta, &wl.estimates)?,
        xi_ukf: normalized_error(&traj.theta, &ukf.estimates)?,
        max_imag: wl.max_imag,
        coverage_uwlckf: envelope_coverage(&traj.theta, &wl),
    })
}

/// Monte Carlo comparison at one `(SNR, |ρ|)` point.
///
/// `r = mean ξ_UKF / mean ξ_UWLCKF`; `r_stderr` is its delta-method standard
/// error using the paired per-run values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImprovementEstimate {
    pub snr_db: f64,
    pub rho_abs: f64,
    pub runs: usize,
    pub xi_uwlckf: f64,
    pub xi_ukf: f64,
    pub r: f64,
    pub r_stderr: f64,
    pub seed: u64,
    #[serde(skip)]
    pub xi_uwlckf_stderr: f64,
    #[serde(skip)]
    pub xi_ukf_stderr: f64,
    #[serde(skip)]
    pub max_imag: f64,
    #[serde(skip)]
    pub mean_coverage: f64,
}

pub fn improvement_ratio(model: &PhaseModel, runs: usize, horizon: usize, seed: u64, params: &UtParams) -> Result<ImprovementEstimate> {
    if runs == 0 {
        return Err(Error::Dimension("need at least one Monte Carlo run".into()));
    }
    let outcomes: Vec<RunOutcome> = (0..runs as u64)
        .into_par_iter()
        .map(|run| monte_carlo_run(model, horizon, seed, run, params))
        .collect::<Result<_>>()?;
    let n = runs as f64;
    let mean = |f: fn(&RunOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / n;
    let mw = mean(|o| o.xi_uwlckf);
    let mu = mean(|o| o.xi_ukf);
    let (mut vw, mut vu, mut cuw) = (0.0, 0.0, 0.0);
    if runs > 1 {
        for o in &outcomes {
            vw += (o.xi_uwlckf - mw).powi(2);
            vu += (o.xi_ukf - mu).powi(2);
            cuw += (o.xi_uwlckf - mw) * (o.xi_ukf - mu);
        }
        vw /= n - 1.0;
        vu /= n - 1.0;
        cuw /= n - 1.0;
    }
    let r = mu / mw;
    let var_r = (vu / (mw * mw) + mu * mu * vw / mw.powi(4) - 2.0 * mu * cuw / mw.powi(3)) / n;
    Ok(ImprovementEstimate {
        snr_db: model.snr_db,
        rho_abs: model.rho_abs,
        runs,
        xi_uwlckf: mw,
        xi_ukf: mu,
        r,
        r_stderr: var_r.max(0.0).sqrt(),
        seed,
        xi_uwlckf_stderr: (vw / n).sqrt(),
        xi_ukf_stderr: (vu / n).sqrt(),
        max_imag: outcomes.iter().fold(0.0, |m, o| m.max(o.max_imag)),
        mean_coverage: mean(|o| o.coverage_uwlckf),
    })
}

/// `improvement_ratio` over an SNR × `|ρ|` grid, rows in grid order (SNR outer).
pub fn phase_sweep(
    snrs_db: &[f64],
    rhos: &[f64],
    phi: f64,
    runs: usize,
    horizon: usize,
    seed: u64,
    params: &UtParams,
) -> Result<Vec<ImprovementEstimate>> {
    let mut out = Vec::with_capacity(snrs_db.len() * rhos.len());
    for &snr in snrs_db {
        for &rho in rhos {
            let model = PhaseModel { phi, ..PhaseModel::new(snr, rho) };
            out.push(improvement_ratio(&model, runs, horizon, seed, params)?);
        }
    }
    Ok(out)
}

/// One row of a seeded demonstration trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: usize,
    pub theta: f64,
    pub theta_hat_uwlckf: f64,
    pub sqrt_p_uwlckf: f64,
    pub theta_hat_ukf: f64,
    pub sqrt_p_ukf: f64,
}

pub fn trajectory_table(model: &PhaseModel, horizon: usize, seed: u64, params: &UtParams) -> Result<Vec<TrajectoryRow>> {
    let traj = simulate_phase(model, horizon, &mut substream(seed, 0))?;
    let wl = run_tracker(model, &traj.y, Tracker::Uwlckf, params)?;
    let ukf = run_tracker(model, &traj.y, Tracker::Ukf, params)?;
    Ok((0..horizon)
        .map(|t| TrajectoryRow {
            t,
            theta: traj.theta[t],
            theta_hat_uwlckf: wl.estimates[t],
            sqrt_p_uwlckf: wl.variances[t].max(0.0).sqrt(),
            theta_hat_ukf: ukf.estimates[t],
            sqrt_p_ukf: ukf.variances[t].max(0.0).sqrt(),
        })
        .collect())
}
