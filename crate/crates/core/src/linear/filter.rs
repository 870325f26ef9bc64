use num_complex::Complex64;

use crate::augmented::{
    right_divide_selfadjoint, AugmentedMatrix, AugmentedVector, CMat, CVec,
};
use crate::error::{Error, Result};
use crate::linear::model::WidelyLinearModel;

/// Augmented estimate and error covariance at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub estimate: AugmentedVector,
    pub cov: AugmentedMatrix,
    pub t: usize,
}

impl FilterState {
    /// Prior at `t = 0`: the model's initial mean and `Π̄₀`.
    pub fn prior(model: &WidelyLinearModel) -> Self {
        Self {
            estimate: AugmentedVector::new(model.mean0.clone()),
            cov: model.pi0.clone(),
            t: 0,
        }
    }

    /// Half the trace of the augmented covariance, i.e. `E‖x − x̂‖²`.
    pub fn mse(&self) -> f64 {
        0.5 * self.cov.trace()
    }
}

/// Everything one measurement update produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub predicted: FilterState,
    /// `ȳ_t − C̄ x̂̄_{t|t−1}`
    pub innovation: AugmentedVector,
    pub innovation_cov: AugmentedMatrix,
    pub gain: AugmentedMatrix,
    pub posterior: FilterState,
    /// The innovation covariance was rank deficient and the gain came from a pseudo-inverse.
    pub singular_innovation: bool,
}

fn check_state(state: &FilterState, model: &WidelyLinearModel) -> Result<()> {
    let n = model.state_dim();
    if state.estimate.dim() != n || state.cov.rows() != n || state.cov.cols() != n {
        return Err(Error::Dimension(format!(
            "filter state has dimension {}, model has {n}",
            state.estimate.dim()
        )));
    }
    Ok(())
}

/// `x̂̄_{t|t−1} = Ā x̂̄_{t−1|t−1}`, `P̄_{t|t−1} = Ā P̄ Āᴴ + B̄ Q̄ B̄ᴴ`.
pub fn wlckf_predict(state: &FilterState, model: &WidelyLinearModel) -> Result<FilterState> {
    check_state(state, model)?;
    let estimate = model.a.apply(&state.estimate)?;
    let propagated = model.a.mul(&state.cov)?.mul(&model.a.adjoint())?;
    let driven = model.b.mul(&model.q)?.mul(&model.b.adjoint())?;
    Ok(FilterState {
        estimate,
        cov: propagated.add(&driven)?.symmetrize(),
        t: state.t + 1,
    })
}

/// Measurement update of a predicted state with the complex measurement `y`.
pub fn wlckf_update(predicted: &FilterState, y: &CVec, model: &WidelyLinearModel) -> Result<StepReport> {
    check_state(predicted, model)?;
    model.require_zero_cross_covariance()?;
    if y.len() != model.measurement_dim() {
        return Err(Error::Dimension(format!(
            "measurement has length {}, model expects {}",
            y.len(),
            model.measurement_dim()
        )));
    }
    let c_adj = model.c.adjoint();
    let y_hat = model.c.apply(&predicted.estimate)?;
    let innovation = AugmentedVector::new(y - y_hat.top());
    let innovation_cov = model
        .c
        .mul(&predicted.cov)?
        .mul(&c_adj)?
        .add(&model.r)?
        .symmetrize();

    // normal equation K̄ S̄ = P̄ C̄ᴴ, solved on the full matrices
    let cross = predicted.cov.mul(&c_adj)?;
    let (gain_full, singular_innovation) = right_divide_selfadjoint(&cross.full(), &innovation_cov.full());
    let gain = AugmentedMatrix::from_full(&gain_full)?;

    let correction = gain.apply(&innovation)?;
    let estimate = AugmentedVector::new(predicted.estimate.top() + correction.top());
    let n = model.state_dim();
    let cov = AugmentedMatrix::identity(n)
        .sub(&gain.mul(&model.c)?)?
        .mul(&predicted.cov)?
        .symmetrize();

    Ok(StepReport {
        predicted: predicted.clone(),
        innovation,
        innovation_cov,
        gain,
        posterior: FilterState {
            estimate,
            cov,
            t: predicted.t,
        },
        singular_innovation,
    })
}

/// One predict + update cycle.
pub fn wlckf_step(state: &FilterState, y: &CVec, model: &WidelyLinearModel) -> Result<StepReport> {
    wlckf_update(&wlckf_predict(state, model)?, y, model)
}

/// Runs the WLCKF over a measurement sequence.
///
/// With `init = None` the filter starts from the prior `(mean0, Π̄₀)` at
/// `t = 0` and the first measurement is `y₀`, folded in by an update without
/// a preceding predict. With `init = Some(state)` the state is taken as the
/// posterior `x̂̄_{t|t}` and every measurement is preceded by a predict.
pub fn wlckf_run(
    model: &WidelyLinearModel,
    measurements: &[CVec],
    init: Option<FilterState>,
) -> Result<Vec<StepReport>> {
    model.require_zero_cross_covariance()?;
    let mut reports = Vec::with_capacity(measurements.len());
    let (mut state, mut skip_predict) = match init {
        Some(state) => (state, false),
        None => (FilterState::prior(model), true),
    };
    for y in measurements {
        let report = if skip_predict {
            skip_predict = false;
            wlckf_update(&state, y, model)?
        } else {
            wlckf_step(&state, y, model)?
        };
        state = report.posterior.clone();
        reports.push(report);
    }
    Ok(reports)
}

/// Strictly linear complex KF over the Hermitian blocks only.
///
/// The model must not act on conjugates (`A2 = B2 = C2 = 0`). Complementary
/// noise and initial covariances are ignored, which is exactly what a filter
/// that assumes propriety does. Reports carry block-diagonal augmented forms.
pub fn ckf_run(
    model: &WidelyLinearModel,
    measurements: &[CVec],
    init: Option<FilterState>,
) -> Result<Vec<StepReport>> {
    model.require_zero_cross_covariance()?;
    if !model.is_strictly_linear() {
        return Err(Error::UnsupportedModel(
            "strictly linear filtering needs A2 = B2 = C2 = 0".into(),
        ));
    }
    let a = model.a.m1();
    let b = model.b.m1();
    let c = model.c.m1();
    let q = model.q.m1();
    let r = model.r.m1();
    let n = model.state_dim();
    let half = Complex64::new(0.5, 0.0);

    let (mut x, mut p, mut t, mut skip_predict) = match init {
        Some(s) => (s.estimate.top().clone(), s.cov.m1().clone(), s.t, false),
        None => (model.mean0.clone(), model.pi0.m1().clone(), 0, true),
    };
    let mut reports = Vec::with_capacity(measurements.len());
    for y in measurements {
        if y.len() != model.measurement_dim() {
            return Err(Error::Dimension("measurement length".into()));
        }
        if skip_predict {
            skip_predict = false;
        } else {
            x = a * &x;
            p = a * &p * a.adjoint() + b * q * b.adjoint();
            p = (&p + p.adjoint()) * half;
            t += 1;
        }
        let predicted = FilterState {
            estimate: AugmentedVector::new(x.clone()),
            cov: AugmentedMatrix::strictly_linear(p.clone()),
            t,
        };
        let innovation = y - c * &x;
        let s = c * &p * c.adjoint() + r;
        let s = (&s + s.adjoint()) * half;
        let (k, singular) = right_divide_selfadjoint(&(&p * c.adjoint()), &s);
        x = &x + &k * &innovation;
        p = (CMat::identity(n, n) - &k * c) * &p;
        p = (&p + p.adjoint()) * half;
        reports.push(StepReport {
            predicted,
            innovation: AugmentedVector::new(innovation),
            innovation_cov: AugmentedMatrix::strictly_linear(s),
            gain: AugmentedMatrix::strictly_linear(k),
            posterior: FilterState {
                estimate: AugmentedVector::new(x.clone()),
                cov: AugmentedMatrix::strictly_linear(p.clone()),
                t,
            },
            singular_innovation: singular,
        });
    }
    Ok(reports)
}

/// `E(ê − K n̂) n̂ᵀ` for the strictly linear gain `K = [P̄C̄ᴴ]₁₁ S⁻¹` of an update.
///
/// The widely linear filter collapses to the strictly linear one exactly when
/// this cross moment vanishes. For `C2 = 0` it reads `P̃ C1ᵀ − K S̃`.
pub fn strictly_linear_residual(report: &StepReport, model: &WidelyLinearModel) -> Result<CMat> {
    let cross = report.predicted.cov.mul(&model.c.adjoint())?;
    let (k, _) = right_divide_selfadjoint(cross.m1(), report.innovation_cov.m1());
    Ok(cross.m2() - k * report.innovation_cov.m2())
}
