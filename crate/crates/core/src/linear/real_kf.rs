use crate::augmented::{right_divide_selfadjoint, RMat, RVec};
use crate::error::{Error, Result};
use crate::linear::model::RealModel;

/// Posterior of the textbook real Kalman filter at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStep {
    pub predicted_estimate: RVec,
    pub predicted_cov: RMat,
    pub innovation_cov: RMat,
    pub gain: RMat,
    pub estimate: RVec,
    pub cov: RMat,
    pub t: usize,
    pub singular_innovation: bool,
}

/// Real KF on the composite model; the independent oracle for the WLCKF.
///
/// Start-up semantics match [`crate::linear::wlckf_run`]: without `init`, the
/// first measurement updates the prior `(mean0, Π₀)` directly; with
/// `init = Some((x, P, t))` every measurement follows a predict.
pub fn real_kf_run(
    model: &RealModel,
    measurements: &[RVec],
    init: Option<(RVec, RMat, usize)>,
) -> Result<Vec<RealStep>> {
    model.validate()?;
    let n = model.state_dim();
    let (mut x, mut p, mut t, mut skip_predict) = match init {
        Some((x, p, t)) => (x, p, t, false),
        None => (model.mean0.clone(), model.pi0.clone(), 0, true),
    };
    if x.len() != n || p.shape() != (n, n) {
        return Err(Error::Dimension("initial real state".into()));
    }
    let mut out = Vec::with_capacity(measurements.len());
    for y in measurements {
        if y.len() != model.measurement_dim() {
            return Err(Error::Dimension(format!(
                "real measurement has length {}, expected {}",
                y.len(),
                model.measurement_dim()
            )));
        }
        if skip_predict {
            skip_predict = false;
        } else {
            x = &model.e * &x;
            p = &model.e * &p * model.e.transpose() + &model.f * &model.q * model.f.transpose();
            p = (&p + p.transpose()) * 0.5;
            t += 1;
        }
        let (px, pp) = (x.clone(), p.clone());
        let s = &model.g * &p * model.g.transpose() + &model.r;
        let s = (&s + s.transpose()) * 0.5;
        let (k, singular) = right_divide_selfadjoint(&(&p * model.g.transpose()), &s);
        x = &x + &k * (y - &model.g * &x);
        p = (RMat::identity(n, n) - &k * &model.g) * &p;
        p = (&p + p.transpose()) * 0.5;
        out.push(RealStep {
            predicted_estimate: px,
            predicted_cov: pp,
            innovation_cov: s,
            gain: k,
            estimate: x.clone(),
            cov: p.clone(),
            t,
            singular_innovation: singular,
        });
    }
    Ok(out)
}
