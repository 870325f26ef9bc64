use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use wlckf::augmented::max_abs_c;
use wlckf::linear::{
    ckf_run, measurement_to_real, model_from_real, oracle_deviation, random_proper_model, random_real_model,
    real_kf_run, simulate_linear, wlckf_run, StepReport,
};
use wlckf::mse::{
    case2_sweep, lmmse_case1, random_case1_params, theta_trajectory, wlmmse_case1, write_csv, CASE2_MAX_ITERS,
    CASE2_TOL, DEFAULT_RHO_N_PHASE, REFERENCE_PANELS,
};
use wlckf::phase::{phase_sweep, trajectory_table, PhaseModel};
use wlckf::rng::substream;
use wlckf::unscented::UtParams;
use wlckf::{RVec, ScalarModelParams};

use crate::config::{nonempty, positive, rho_grid, Format};
use crate::{CliError, Settings};

const EQUIVALENCE_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-9;
const THETA_TOL: f64 = 1e-12;
const REALNESS_TOL: f64 = 1e-9;

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Config(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize + ?Sized>(value: &T, mut out: Box<dyn Write>) -> Result<(), CliError> {
    let io_err = |e: String| CliError::Config(format!("write failed: {e}"));
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| io_err(e.to_string()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| io_err(e.to_string()))
}

fn emit<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let out = open_out(path)?;
    match format {
        Format::Csv => write_csv(rows, out).map_err(|e| CliError::Config(e.to_string())),
        Format::Json => write_json(rows, out),
    }
}

#[derive(Debug, Serialize)]
struct EquivalenceRow {
    trial: usize,
    max_dev_estimate: f64,
    max_dev_cov: f64,
    /// Only for proper models.
    max_dev_ckf: Option<f64>,
}

fn ckf_deviation(wl: &[StepReport], ckf: &[StepReport]) -> f64 {
    wl.iter().zip(ckf).fold(0.0, |m: f64, (a, b)| {
        let dx = (a.posterior.estimate.full() - b.posterior.estimate.full())
            .iter()
            .fold(0.0, |m: f64, z| m.max(z.norm()));
        m.max(dx).max(max_abs_c(&(a.posterior.cov.full() - b.posterior.cov.full())))
    })
}

pub fn equivalence(s: &Settings) -> Result<(), CliError> {
    let trials = positive("trials", s.cfg.trials.unwrap_or(20))?;
    let n = positive("n", s.cfg.n.unwrap_or(2))?;
    let m = positive("m", s.cfg.m.unwrap_or(2))?;
    let horizon = positive("horizon", s.cfg.horizon.unwrap_or(50))?;
    let proper = s.cfg.proper.unwrap_or(false);

    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut model_rng = substream(s.seed, 2 * trial as u64);
        let model = if proper {
            random_proper_model(n, m, &mut model_rng)?
        } else {
            let r = random_real_model(n, m, &mut model_rng);
            model_from_real(&r.e, &r.f, &r.g, &r.q, &r.r, &r.pi0)?
        };
        let traj = simulate_linear(&model, horizon, &mut substream(s.seed, 2 * trial as u64 + 1))?;
        let wl = wlckf_run(&model, &traj.measurements, None)?;
        let ys: Vec<RVec> = traj.measurements.iter().map(measurement_to_real).collect();
        let real = real_kf_run(&model.to_real()?, &ys, None)?;
        let (dx, dp) = oracle_deviation(&wl, &real)?;
        let dc = if proper {
            Some(ckf_deviation(&wl, &ckf_run(&model, &traj.measurements, None)?))
        } else {
            None
        };
        rows.push(EquivalenceRow { trial, max_dev_estimate: dx, max_dev_cov: dp, max_dev_ckf: dc });
    }
    emit(&rows, s.format, s.out.as_deref())?;

    let worst = rows
        .iter()
        .map(|r| r.max_dev_estimate.max(r.max_dev_cov).max(r.max_dev_ckf.unwrap_or(0.0)))
        .fold(0.0, f64::max);
    eprintln!("equivalence: {trials} trials, max deviation {worst:e}");
    if !(worst <= EQUIVALENCE_TOL) {
        return Err(CliError::Failed(format!("deviation {worst:e} exceeds {EQUIVALENCE_TOL:e}")));
    }
    Ok(())
}

pub fn mse_sweep(s: &Settings) -> Result<(), CliError> {
    let default_grid: Vec<f64> = (0..20).map(|k| k as f64 / 20.0).chain([0.99]).collect();
    let rho_w = s.cfg.rho_w.clone().unwrap_or_else(|| default_grid.clone());
    let rho_n = s.cfg.rho_n.clone().unwrap_or(default_grid);
    rho_grid("rho_w", &rho_w)?;
    rho_grid("rho_n", &rho_n)?;
    let panels: Vec<(f64, f64)> = match &s.cfg.panels_db {
        Some(p) => p.iter().map(|&[a, b]| (a, b)).collect(),
        None => REFERENCE_PANELS.to_vec(),
    };
    if panels.is_empty() {
        return Err(CliError::Config("`panels_db` must not be empty".into()));
    }
    let horizon = positive("horizon", s.cfg.horizon.unwrap_or(CASE2_MAX_ITERS))?;
    let tol = s.cfg.tol.unwrap_or(CASE2_TOL);
    let phase = s.cfg.rho_n_phase.unwrap_or(DEFAULT_RHO_N_PHASE);

    let rows = case2_sweep(&rho_w, &rho_n, phase, &panels, horizon, tol)?;
    emit(&rows, s.format, s.out.as_deref())?;

    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let unconverged = rows.iter().filter(|r| r.converged_iters == 0).count();
    eprintln!("mse-sweep: {} points, ratio in [{min}, {max}], {unconverged} not converged", rows.len());
    if !(min >= 1.0 - RATIO_TOL) {
        return Err(CliError::Failed(format!("improvement ratio {min} below 1")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ThetaRow {
    kind: &'static str,
    draw: usize,
    t: usize,
    n1: f64,
    n2: f64,
    p00: f64,
    p00_tilde_abs: f64,
    theta: f64,
    /// WLCKF over CKF MSE for this draw's actual `P̃₀|₀`.
    xi_ratio: f64,
}

fn theta_rows(kind: &'static str, draw: usize, params: &ScalarModelParams, horizon: usize) -> Result<Vec<ThetaRow>, CliError> {
    let theta = theta_trajectory(params, horizon)?;
    (1..=horizon)
        .map(|t| {
            Ok(ThetaRow {
                kind,
                draw,
                t,
                n1: params.n1,
                n2: params.n2,
                p00: params.p00,
                p00_tilde_abs: params.p00_tilde.norm(),
                theta: theta[t - 1],
                xi_ratio: wlmmse_case1(params, t)? / lmmse_case1(params, t)?,
            })
        })
        .collect()
}

pub fn theta_bound(s: &Settings) -> Result<(), CliError> {
    let draws = positive("draws", s.cfg.draws.unwrap_or(10_000))?;
    let horizon = positive("horizon", s.cfg.horizon.unwrap_or(10))?;

    let mut rows = Vec::new();
    let mut rng = substream(s.seed, 0);
    for draw in 0..draws {
        let params = random_case1_params(&mut rng);
        rows.extend(theta_rows("random", draw, &params, horizon)?);
        if draw < 10 {
            let proper = params.clone().with_p00_tilde(Default::default());
            rows.extend(theta_rows("proper", draw, &proper, horizon)?);
        }
    }
    rows.extend(theta_rows("lower_bound", 0, &ScalarModelParams::new(1e-6, 1e-3, 1.0), horizon)?);
    emit(&rows, s.format, s.out.as_deref())?;

    let (min, max) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.theta), hi.max(r.theta)));
    let lower = rows
        .iter()
        .filter(|r| r.kind == "lower_bound")
        .map(|r| r.theta)
        .fold(f64::INFINITY, f64::min);
    eprintln!("theta-bound: {} rows, theta in [{min}, {max}], N1<<N2<<1 minimum {lower}", rows.len());

    if !(min >= 0.5 - THETA_TOL && max <= 1.0 + THETA_TOL) {
        return Err(CliError::Failed(format!("theta range [{min}, {max}] leaves [1/2, 1]")));
    }
    let tol = |x: f64| 1e-9 * x.abs().max(1.0);
    if let Some(r) = rows.iter().find(|r| r.xi_ratio < r.theta - tol(r.theta) || r.xi_ratio > 1.0 + tol(1.0)) {
        return Err(CliError::Failed(format!(
            "draw {} t {}: MSE ratio {} outside [theta = {}, 1]",
            r.draw, r.t, r.xi_ratio, r.theta
        )));
    }
    if let Some(r) = rows.iter().find(|r| r.kind == "proper" && (r.xi_ratio - 1.0).abs() > 1e-12) {
        return Err(CliError::Failed(format!("proper draw {} t {}: MSE ratio {} != 1", r.draw, r.t, r.xi_ratio)));
    }
    if !(lower < 0.55) {
        return Err(CliError::Failed(format!("N1<<N2<<1 theta never drops below 0.55 (min {lower})")));
    }
    Ok(())
}

pub fn phase_demod(s: &Settings) -> Result<(), CliError> {
    let runs = positive("runs", s.cfg.runs.unwrap_or(200))?;
    let horizon = positive("horizon", s.cfg.horizon.unwrap_or(500))?;
    let snrs = s.cfg.snr_db.clone().unwrap_or_else(|| vec![10.0, 20.0, 30.0]);
    let rhos = s.cfg.rho.clone().unwrap_or_else(|| vec![0.0, 0.3, 0.5, 0.7, 0.8, 0.9]);
    let xi_snrs = s.cfg.xi_snr_db.clone().unwrap_or_else(|| (0..7).map(|k| 5.0 * k as f64).collect());
    let xi_rho = s.cfg.xi_rho.unwrap_or(0.7);
    let traj_snr = s.cfg.trajectory_snr_db.unwrap_or(20.0);
    let traj_rho = s.cfg.trajectory_rho.unwrap_or(0.7);
    let phi = s.cfg.phi.unwrap_or(0.0);
    nonempty("snr_db", &snrs)?;
    nonempty("xi_snr_db", &xi_snrs)?;
    nonempty("trajectory_snr_db", &[traj_snr])?;
    nonempty("phi", &[phi])?;
    rho_grid("rho", &rhos)?;
    rho_grid("xi_rho", &[xi_rho])?;
    rho_grid("trajectory_rho", &[traj_rho])?;
    let params = match s.cfg.kappa {
        Some(k) => UtParams { kappa: wlckf::unscented::Kappa::Fixed(k), ..UtParams::default() },
        None => UtParams::gaussian(),
    };
    // Point sets in this experiment have composite dimension 1 to 6.
    for l in 1..=6 {
        params.validate(l).map_err(|e| CliError::Config(e.to_string()))?;
    }

    let traj_model = PhaseModel { phi, ..PhaseModel::new(traj_snr, traj_rho) };
    let trajectory = trajectory_table(&traj_model, horizon, s.seed, &params)?;
    let xi_vs_snr = phase_sweep(&xi_snrs, &[xi_rho], phi, runs, horizon, s.seed, &params)?;
    let r_vs_rho = phase_sweep(&snrs, &rhos, phi, runs, horizon, s.seed, &params)?;

    match (s.format, s.out.as_deref()) {
        (Format::Json, path) => {
            #[derive(Serialize)]
            struct Tables<'a, A, B> {
                trajectory: &'a [A],
                xi_vs_snr: &'a [B],
                r_vs_rho: &'a [B],
            }
            write_json(&Tables { trajectory: &trajectory, xi_vs_snr: &xi_vs_snr, r_vs_rho: &r_vs_rho }, open_out(path)?)?;
        }
        (Format::Csv, Some(dir)) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
            emit(&trajectory, Format::Csv, Some(&dir.join("trajectory.csv")))?;
            emit(&xi_vs_snr, Format::Csv, Some(&dir.join("xi_vs_snr.csv")))?;
            emit(&r_vs_rho, Format::Csv, Some(&dir.join("r_vs_rho.csv")))?;
        }
        (Format::Csv, None) => {
            emit(&trajectory, Format::Csv, None)?;
            println!();
            emit(&xi_vs_snr, Format::Csv, None)?;
            println!();
            emit(&r_vs_rho, Format::Csv, None)?;
        }
    }

    for e in &r_vs_rho {
        eprintln!("phase-demod: SNR {} dB |rho| {}: r = {:.4} ± {:.4}", e.snr_db, e.rho_abs, e.r, e.r_stderr);
    }
    let imag = xi_vs_snr.iter().chain(&r_vs_rho).map(|e| e.max_imag).fold(0.0, f64::max);
    if !(imag < REALNESS_TOL) {
        return Err(CliError::Failed(format!("UWLCKF phase estimate has imaginary part {imag:e}")));
    }
    Ok(())
}
