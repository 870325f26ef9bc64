mod common;

use common::{c, golden_sweep_csv, scalar_model, GOLDEN_RHO_GRID, GOLDEN_SWEEP_PATH};
use proptest::prelude::*;
use wlckf::augmented::{max_abs_c, AugmentedMatrix, CMat, CVec};
use wlckf::linear::{wlckf_run, FilterState};
use wlckf::mse::{
    augmented_scalar_recursion, case2_improvement, case2_sweep, lmmse_case1, theta_trajectory, wlmmse_case1,
    ScalarModelParams, StepCoefficients, CASE2_MAX_ITERS, CASE2_TOL, DEFAULT_RHO_N_PHASE, REFERENCE_PANELS,
};

#[test]
fn closed_form_matches_the_running_filter() {
    let (a, b, cc) = (c(0.9, 0.2), c(0.7, -0.1), c(1.1, 0.5));
    for tilde in [c(0.0, 0.0), c(0.4, 0.3), c(0.0, -1.0)] {
        let model = scalar_model(a, b, cc, 0.05, 0.02, 1.0, tilde);
        let params = ScalarModelParams::new(0.05, 0.02, 1.0).with_coefficients(a, b, cc).with_p00_tilde(tilde);
        let ys = vec![CVec::zeros(1); 200];
        let reports = wlckf_run(&model, &ys, Some(FilterState::prior(&model))).unwrap();
        for (k, r) in reports.iter().enumerate() {
            let xi = wlmmse_case1(&params, k + 1).unwrap();
            assert!((r.posterior.mse() - xi).abs() < 1e-10, "t={} {} {}", k + 1, r.posterior.mse(), xi);
        }
    }
}

#[test]
fn information_form_agrees_with_covariance_path() {
    // [(Ā P̄ Āᴴ + B̄ Q̄ B̄ᴴ)⁻¹ + C̄ᴴ R̄⁻¹ C̄]⁻¹ with improper, invertible Q̄ and R̄
    let q = AugmentedMatrix::new(CMat::from_element(1, 1, c(0.3, 0.0)), CMat::from_element(1, 1, c(0.1, 0.15))).unwrap();
    let r = AugmentedMatrix::new(CMat::from_element(1, 1, c(0.2, 0.0)), CMat::from_element(1, 1, c(-0.12, 0.05))).unwrap();
    let p0 = AugmentedMatrix::new(CMat::from_element(1, 1, c(1.0, 0.0)), CMat::from_element(1, 1, c(0.5, 0.2))).unwrap();
    let k = StepCoefficients::new(c(0.8, 0.3), c(1.0, 0.2), c(0.9, -0.4));
    let cov_form = augmented_scalar_recursion(&p0, &q, &r, |_| k, 30).unwrap();

    let s = |z| AugmentedMatrix::strictly_linear(CMat::from_element(1, 1, z));
    let (a, b, cm) = (s(k.a), s(k.b), s(k.c));
    let mut p = p0.full();
    let r_inv = r.full().try_inverse().unwrap();
    for want in &cov_form {
        let pred = a.full() * &p * a.full().adjoint() + b.full() * q.full() * b.full().adjoint();
        p = (pred.try_inverse().unwrap() + cm.full().adjoint() * &r_inv * cm.full()).try_inverse().unwrap();
        assert!(max_abs_c(&(&p - want.full())) < 1e-12);
    }

    let model = wlckf::WidelyLinearModel::new(a, b, cm, q, r, p0).unwrap();
    let reports = wlckf_run(&model, &vec![CVec::zeros(1); 30], Some(FilterState::prior(&model))).unwrap();
    for (rep, want) in reports.iter().zip(&cov_form) {
        assert!(max_abs_c(&(rep.posterior.cov.full() - want.full())) < 1e-12);
    }
}

#[test]
fn proper_initial_state_gives_the_linear_mse() {
    let p = ScalarModelParams::new(0.3, 0.1, 2.0).with_coefficients(c(0.5, 0.5), c(1.0, 0.0), c(0.3, 0.9));
    for t in [1, 2, 10, 100] {
        assert_eq!(wlmmse_case1(&p, t).unwrap(), lmmse_case1(&p, t).unwrap());
    }
}

#[test]
fn theta_window_near_the_lower_bound() {
    let th = theta_trajectory(&ScalarModelParams::new(1e-6, 1e-3, 1.0), 50).unwrap();
    assert!(th[0] < 0.501);
    assert!(th[..10].iter().all(|&x| x < 0.55));
    assert!(th.iter().all(|&x| (0.5..=1.0).contains(&x)));
}

#[test]
fn improvement_surfaces_are_monotone_and_at_least_one() {
    let grid = GOLDEN_RHO_GRID;
    let rows = case2_sweep(&grid, &grid, DEFAULT_RHO_N_PHASE, &REFERENCE_PANELS, CASE2_MAX_ITERS, CASE2_TOL).unwrap();
    let k = grid.len();
    for panel in rows.chunks(k * k) {
        assert!((panel[0].ratio - 1.0).abs() < 1e-12);
        for i in 0..k {
            for j in 0..k {
                let r = panel[i * k + j].ratio;
                assert!(r >= 1.0 - 1e-9);
                assert!(panel[i * k + j].converged_iters > 0);
                if i + 1 < k {
                    assert!(panel[(i + 1) * k + j].ratio >= r - 1e-9);
                }
                if j + 1 < k {
                    assert!(panel[i * k + j + 1].ratio >= r - 1e-9);
                }
            }
        }
    }
}

#[test]
fn zero_impropriety_surface_is_all_ones() {
    let rows = case2_sweep(&[0.0], &[0.0], DEFAULT_RHO_N_PHASE, &REFERENCE_PANELS, CASE2_MAX_ITERS, CASE2_TOL).unwrap();
    assert!(rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-12));
}

#[test]
fn golden_sweep_csv_is_byte_identical() {
    let want = std::fs::read_to_string(GOLDEN_SWEEP_PATH).expect("golden fixture present");
    assert_eq!(golden_sweep_csv(), want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn widely_linear_never_loses(rw in 0.0f64..=1.0, rn in 0.0f64..=1.0, pw in 0.0f64..6.3, pn in 0.0f64..6.3,
                                 n1 in -40.0f64..0.0, n2 in -40.0f64..0.0) {
        let r = case2_improvement(num_complex::Complex64::from_polar(rw, pw), num_complex::Complex64::from_polar(rn, pn),
                                  n1, n2, CASE2_MAX_ITERS, CASE2_TOL).unwrap();
        prop_assert!(r.ratio >= 1.0 - 1e-9, "{r:?}");
    }

    #[test]
    fn wl_mse_is_sandwiched(rho in 0.0f64..=1.0, phase in 0.0f64..6.3, t in 1usize..60) {
        let p = ScalarModelParams::new(0.01, 0.1, 1.0).with_p00_tilde(num_complex::Complex64::from_polar(rho, phase));
        let wl = wlmmse_case1(&p, t).unwrap();
        let best = wlmmse_case1(&p.clone().with_p00_tilde(c(1.0, 0.0)), t).unwrap();
        prop_assert!(wl <= lmmse_case1(&p, t).unwrap() + 1e-15);
        prop_assert!(wl >= best - 1e-15);
    }
}
