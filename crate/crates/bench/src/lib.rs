//! Fixed inputs shared by the benchmarks.

use wlckf::linear::{model_from_real, random_real_model, simulate_linear};
use wlckf::phase::{simulate_phase, PhaseModel, PhaseTrajectory};
use wlckf::rng::substream;
use wlckf::{CVec, WidelyLinearModel};

pub const SEED: u64 = 2024;

/// A random improper linear model of state size `n`, measurement size `m`,
/// with `horizon` simulated measurements.
pub fn linear_fixture(n: usize, m: usize, horizon: usize) -> (WidelyLinearModel, Vec<CVec>) {
    let r = random_real_model(n, m, &mut substream(SEED, 0));
    let model = model_from_real(&r.e, &r.f, &r.g, &r.q, &r.r, &r.pi0).expect("valid random model");
    let traj = simulate_linear(&model, horizon, &mut substream(SEED, 1)).expect("simulation");
    (model, traj.measurements)
}

/// The phase-tracking model at 20 dB, `|ρ| = 0.7`, with `horizon` measurements.
pub fn phase_fixture(horizon: usize) -> (PhaseModel, PhaseTrajectory) {
    let model = PhaseModel::new(20.0, 0.7);
    let traj = simulate_phase(&model, horizon, &mut substream(SEED, 0)).expect("simulation");
    (model, traj)
}
