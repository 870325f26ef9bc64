//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::{c, golden_sweep_csv, random_improper_stats, random_proper_model, scalar_model, GOLDEN_RHO_GRID, GOLDEN_SWEEP_PATH};
use rand::Rng;
use wlckf::augmented::{max_abs_c, CVec, RVec};
use wlckf::linear::{
    ckf_run, measurement_to_real, model_from_real, oracle_deviation, random_real_model, real_kf_run,
    simulate_linear, wlckf_run, FilterState,
};
use wlckf::mse::{
    case2_sweep, random_case1_params, theta_trajectory, wlmmse_case1, ScalarModelParams, CASE2_MAX_ITERS, CASE2_TOL,
    DEFAULT_RHO_N_PHASE, REFERENCE_PANELS,
};
use wlckf::phase::{improvement_ratio, ImprovementEstimate, PhaseModel};
use wlckf::rng::substream;
use wlckf::unscented::{modified_complex_sigma_points, proper_sigma_points, reconstruct_stats, uwlckf_run, NonlinearModel, UtParams};

const MC_SEED: u64 = 2024;
const MC_RUNS: usize = 200;
const HORIZON: usize = 500;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_wl_model(n: usize, m: usize, seed: u64) -> wlckf::WidelyLinearModel {
    let real = random_real_model(n, m, &mut substream(seed, 0));
    model_from_real(&real.e, &real.f, &real.g, &real.q, &real.r, &real.pi0).unwrap()
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut sizes = substream(1, 99);
    let (mut dx, mut dp): (f64, f64) = (0.0, 0.0);
    for trial in 0..50u64 {
        let n = sizes.random_range(1..=3);
        let m = sizes.random_range(1..=3);
        let model = random_wl_model(n, m, 1000 + trial);
        let traj = simulate_linear(&model, 100, &mut substream(1000 + trial, 1)).unwrap();
        let wl = wlckf_run(&model, &traj.measurements, None).unwrap();
        let ys: Vec<RVec> = traj.measurements.iter().map(measurement_to_real).collect();
        let real = real_kf_run(&model.to_real().unwrap(), &ys, None).unwrap();
        let (x, p) = oracle_deviation(&wl, &real).unwrap();
        dx = dx.max(x);
        dp = dp.max(p);
    }
    let elapsed = start.elapsed();
    outcome(
        dx < 1e-9 && dp < 1e-9 && elapsed < Duration::from_secs(10),
        format!("50 models, max rel. deviation x {dx:.2e}, P {dp:.2e} (< 1e-9), {elapsed:.2?} (< 10 s)"),
    )
}

fn c2_propriety_collapse() -> Outcome {
    let (mut comp, mut diff): (f64, f64) = (0.0, 0.0);
    for seed in 0..10u64 {
        let model = random_proper_model(3, 2, &mut substream(2000 + seed, 0));
        let traj = simulate_linear(&model, 100, &mut substream(2000 + seed, 1)).unwrap();
        let wl = wlckf_run(&model, &traj.measurements, None).unwrap();
        let sl = ckf_run(&model, &traj.measurements, None).unwrap();
        for (w, s) in wl.iter().zip(&sl) {
            comp = comp
                .max(max_abs_c(w.posterior.cov.m2()))
                .max(max_abs_c(w.innovation_cov.m2()))
                .max(max_abs_c(w.gain.m2()));
            diff = diff
                .max((w.posterior.estimate.top() - s.posterior.estimate.top()).camax())
                .max(max_abs_c(&(w.posterior.cov.m1() - s.posterior.cov.m1())));
        }
    }
    outcome(
        comp < 1e-12 && diff < 1e-12,
        format!("10 models x 100 steps, max |P~,S~,K~| {comp:.2e}, |WLCKF - CKF| {diff:.2e} (< 1e-12)"),
    )
}

fn c3_theta_bounds() -> Outcome {
    let mut rng = substream(3, 0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        let p = random_case1_params(&mut rng);
        for th in theta_trajectory(&p, 50).unwrap() {
            lo = lo.min(th);
            hi = hi.max(th);
        }
    }
    let near = theta_trajectory(&ScalarModelParams::new(1e-6, 1e-3, 1.0), 20).unwrap();
    let reached = near.iter().any(|&th| th < 0.55);
    let bounds = lo >= 0.5 - 1e-12 && hi <= 1.0 + 1e-12;
    outcome(
        bounds && reached,
        format!(
            "10^4 draws, t <= 50: theta in [{lo:.6}, {hi:.6}]; N1=1e-6, N2=1e-3: theta_1 {:.4}, theta_10 {:.4}, theta_20 {:.4} (below 0.55 by t=20: {reached})",
            near[0], near[9], near[19]
        ),
    )
}

fn c4_formula_vs_filter() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = substream(4, 0);
    let mut cases = vec![ScalarModelParams::new(0.05, 0.02, 1.0).with_p00_tilde(c(0.6, 0.3))];
    for _ in 0..5 {
        let mut p = random_case1_params(&mut rng);
        p.n2 = p.n2.max(1e-4);
        cases.push(p);
    }
    for p in &cases {
        let k = p.coefficients;
        let model = scalar_model(k.a, k.b, k.c, p.n1, p.n2, p.p00, p.p00_tilde);
        let reports = wlckf_run(&model, &vec![CVec::zeros(1); 200], Some(FilterState::prior(&model))).unwrap();
        for (t, r) in reports.iter().enumerate() {
            let xi = wlmmse_case1(p, t + 1).unwrap();
            worst = worst.max((r.posterior.mse() - xi).abs() / xi.max(1.0));
        }
    }
    outcome(worst < 1e-10, format!("{} scalar models, t <= 200, max |xi_WL - tr(P)/2| {worst:.2e} (< 1e-10)", cases.len()))
}

fn c5_moment_preservation() -> Outcome {
    let mut rng = substream(5, 0);
    let params = UtParams::default();
    let (mut em, mut er, mut ec): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut worst_miss = f64::INFINITY;
    for k in 0..100 {
        let n = 1 + k % 4;
        let stats = random_improper_stats(n, &mut rng);
        let back = reconstruct_stats(&modified_complex_sigma_points(&stats, &params).unwrap()).unwrap();
        let scale = max_abs_c(&stats.hermitian).max(1.0);
        em = em.max((&back.mean - &stats.mean).camax() / scale.sqrt());
        er = er.max(max_abs_c(&(&back.hermitian - &stats.hermitian)) / scale);
        ec = ec.max(max_abs_c(&(&back.complementary - &stats.complementary)) / scale);
        let target = max_abs_c(&stats.complementary);
        let naive = reconstruct_stats(&proper_sigma_points(&stats, &params).unwrap()).unwrap();
        worst_miss = worst_miss.min(max_abs_c(&(&naive.complementary - &stats.complementary)) / target);
    }
    outcome(
        em < 1e-10 && er < 1e-10 && ec < 1e-10 && worst_miss >= 0.9,
        format!("100 stats, n <= 4: round-trip mean {em:.2e}, R {er:.2e}, R~ {ec:.2e} (< 1e-10); proper construction misses >= {:.0}% of |R~| (>= 90%)", 100.0 * worst_miss),
    )
}

fn c6_linear_collapse() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut sizes = substream(6, 99);
    for trial in 0..20u64 {
        let n = sizes.random_range(1..=3);
        let m = sizes.random_range(1..=3);
        let model = random_wl_model(n, m, 6000 + trial);
        let traj = simulate_linear(&model, 50, &mut substream(6000 + trial, 1)).unwrap();
        let wl = wlckf_run(&model, &traj.measurements, None).unwrap();
        let ut = uwlckf_run(&NonlinearModel::from_linear(&model).unwrap(), &traj.measurements, None, &UtParams::default()).unwrap();
        for (a, b) in wl.iter().zip(&ut) {
            let sx = a.posterior.estimate.top().camax().max(1.0);
            let sp = max_abs_c(a.posterior.cov.m1()).max(1.0);
            worst = worst
                .max((a.posterior.estimate.top() - b.posterior.estimate.top()).camax() / sx)
                .max(max_abs_c(&(a.posterior.cov.full() - b.posterior.cov.full())) / sp);
        }
    }
    outcome(worst < 1e-8, format!("20 models x 50 steps, max rel. |UWLCKF - WLCKF| {worst:.2e} (< 1e-8)"))
}

fn c7_realness() -> Outcome {
    let params = UtParams::gaussian();
    let worst = [(10.0, 0.9), (20.0, 0.5)]
        .iter()
        .map(|&(snr, rho)| improvement_ratio(&PhaseModel::new(snr, rho), MC_RUNS, HORIZON, MC_SEED + 7, &params).unwrap().max_imag)
        .fold(0.0, f64::max);
    let default_ut = improvement_ratio(&PhaseModel::new(20.0, 0.9), MC_RUNS, HORIZON, MC_SEED + 7, &UtParams::default()).unwrap().max_imag;
    let worst = worst.max(default_ut);
    outcome(worst < 1e-9, format!("3 configs x 200 runs x 500 steps, max |Im theta_hat| {worst:.2e} (< 1e-9)"))
}

fn c8_improvement(rows: &[ImprovementEstimate], elapsed: Duration) -> Outcome {
    let r09 = rows.last().unwrap();
    let monotone = rows.windows(2).all(|w| w[1].r >= w[0].r - 2.0 * (w[0].r_stderr.powi(2) + w[1].r_stderr.powi(2)).sqrt());
    let listing: Vec<String> = rows.iter().map(|e| format!("{}:{:.3}±{:.3}", e.rho_abs, e.r, e.r_stderr)).collect();
    outcome(
        r09.r >= 1.5 && monotone && elapsed < Duration::from_secs(120),
        format!(
            "SNR 20 dB, 200 runs: r(|rho|) = [{}]; r(0.9) >= 1.5: {}, monotone within 2 SE: {monotone}, {elapsed:.2?} (< 2 min)",
            listing.join(", "),
            r09.r >= 1.5
        ),
    )
}

fn c9_snr_advantage() -> Outcome {
    let params = UtParams::gaussian();
    let mut pass = true;
    let mut parts = Vec::new();
    for snr in [5.0, 10.0, 15.0, 20.0] {
        let here = improvement_ratio(&PhaseModel::new(snr, 0.7), MC_RUNS, HORIZON, MC_SEED, &params).unwrap();
        let up = improvement_ratio(&PhaseModel::new(snr + 2.0, 0.7), MC_RUNS, HORIZON, MC_SEED, &params).unwrap();
        let slack = 2.0 * (here.xi_uwlckf_stderr.powi(2) + up.xi_ukf_stderr.powi(2)).sqrt();
        let ok = here.xi_uwlckf <= up.xi_ukf + slack;
        pass &= ok;
        parts.push(format!("{snr} dB: {:.4} vs {:.4} (+{:.4})", here.xi_uwlckf, up.xi_ukf, slack));
    }
    outcome(pass, format!("|rho|=0.7, xi_UWLCKF(SNR) <= xi_UKF(SNR+2) + 2 SE: {}", parts.join("; ")))
}

fn c10_case2_surfaces() -> Outcome {
    let grid = GOLDEN_RHO_GRID;
    let k = grid.len();
    let rows = case2_sweep(&grid, &grid, DEFAULT_RHO_N_PHASE, &REFERENCE_PANELS, CASE2_MAX_ITERS, CASE2_TOL).unwrap();
    let mut min_ratio = f64::INFINITY;
    let mut origin: f64 = 0.0;
    let mut monotone = true;
    for panel in rows.chunks(k * k) {
        origin = origin.max((panel[0].ratio - 1.0).abs());
        for i in 0..k {
            for j in 0..k {
                let r = panel[i * k + j].ratio;
                min_ratio = min_ratio.min(r);
                if i + 1 < k && panel[(i + 1) * k + j].ratio < r - 1e-9 {
                    monotone = false;
                }
                if j + 1 < k && panel[i * k + j + 1].ratio < r - 1e-9 {
                    monotone = false;
                }
            }
        }
    }
    let golden = std::fs::read_to_string(GOLDEN_SWEEP_PATH).map(|g| g == golden_sweep_csv()).unwrap_or(false);
    outcome(
        min_ratio >= 1.0 - 1e-9 && origin < 1e-12 && monotone && golden,
        format!("3 panels x {k}x{k}: min ratio {min_ratio:.12}, |ratio(0,0) - 1| {origin:.1e}, monotone: {monotone}, golden CSV byte-identical: {golden}"),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let o = f();
        println!("{} criterion {id:>2} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };
    run(1, "oracle equivalence", &c1_oracle_equivalence);
    run(2, "propriety collapse", &c2_propriety_collapse);
    run(3, "theta bounds", &c3_theta_bounds);
    run(4, "formula vs filter", &c4_formula_vs_filter);
    run(5, "sigma-point moments", &c5_moment_preservation);
    run(6, "UT linear collapse", &c6_linear_collapse);
    run(7, "phase estimate realness", &c7_realness);
    run(8, "phase improvement r", &|| {
        let start = Instant::now();
        let params = UtParams::gaussian();
        let rows: Vec<ImprovementEstimate> = [0.0, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .map(|&rho| improvement_ratio(&PhaseModel::new(20.0, rho), MC_RUNS, HORIZON, MC_SEED, &params).unwrap())
            .collect();
        c8_improvement(&rows, start.elapsed())
    });
    run(9, "2 dB SNR advantage", &c9_snr_advantage);
    run(10, "improvement surfaces", &c10_case2_surfaces);

    let failed: Vec<usize> = results.iter().filter(|(_, _, o)| !o.pass).map(|(id, _, _)| *id).collect();
    println!("acceptance: {}/{} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
