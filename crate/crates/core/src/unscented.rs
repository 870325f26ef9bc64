//! Unscented transform with moment-preserving complex sigma points, the
//! unscented WLCKF (UWLCKF) and a real-space UKF baseline.
//!
//! The complex points are built in the real composite domain: for
//! `s ~ (μ, R, R̃)` the composite `ζ = [Re s; Im s]` has mean `½Tᴴμ̄` and
//! covariance `¼TᴴR̄T`, the usual `4N+1` UT points are drawn there and each is
//! mapped back as `u + jv`. Because the composite covariance carries `R̃`, the
//! resulting points reproduce the mean, Hermitian and complementary
//! covariance; points drawn from the Hermitian covariance alone do not.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::augmented::{psd_sqrt, right_divide_selfadjoint, AugmentedMatrix, AugmentedVector, CMat, CVec, RMat, RVec};
use crate::error::{Error, Result};
use crate::improper::SecondOrderStats;
use crate::linear::{FilterState, StepReport, WidelyLinearModel};

/// Secondary scaling `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Fixed(f64),
    /// `κ = 3 − L`: with `α = 1` every nonzero direction gets spread `√3` and
    /// the points match the Gaussian fourth moment, however many zero-variance
    /// directions pad the composite vector.
    ThreeMinusL,
}

impl Kappa {
    pub fn value(&self, l: usize) -> f64 {
        match *self {
            Kappa::Fixed(k) => k,
            Kappa::ThreeMinusL => 3.0 - l as f64,
        }
    }
}

/// Spread and weighting parameters; `λ = α²(L + κ) − L` for composite dimension `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: Kappa,
}

impl Default for UtParams {
    /// `α = 1`, `β = 2`, `κ = 0`, so `λ = 0`.
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            kappa: Kappa::Fixed(0.0),
        }
    }
}

impl UtParams {
    pub fn new(alpha: f64, beta: f64, kappa: f64) -> Self {
        Self {
            alpha,
            beta,
            kappa: Kappa::Fixed(kappa),
        }
    }

    /// `α = 1`, `β = 2`, `κ = 3 − L`.
    pub fn gaussian() -> Self {
        Self {
            kappa: Kappa::ThreeMinusL,
            ..Self::default()
        }
    }

    pub fn lambda(&self, l: usize) -> f64 {
        self.alpha * self.alpha * (l as f64 + self.kappa.value(l)) - l as f64
    }

    pub fn validate(&self, l: usize) -> Result<()> {
        let spread = l as f64 + self.lambda(l);
        if !(spread > 0.0) || !spread.is_finite() {
            return Err(Error::Degenerate(format!("L + lambda must be positive, got {spread}")));
        }
        Ok(())
    }

    /// Mean and covariance weights for the `2L + 1` points.
    pub fn weights(&self, l: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate(l)?;
        let lambda = self.lambda(l);
        let spread = l as f64 + lambda;
        let wi = 1.0 / (2.0 * spread);
        let mut wm = vec![wi; 2 * l + 1];
        let mut wc = wm.clone();
        wm[0] = lambda / spread;
        wc[0] = wm[0] + 1.0 - self.alpha * self.alpha + self.beta;
        Ok((wm, wc))
    }
}

/// Sigma points with their mean and covariance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPointSet<P> {
    pub points: Vec<P>,
    pub w_mean: Vec<f64>,
    pub w_cov: Vec<f64>,
}

impl<P> SigmaPointSet<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `Z₀ = μ`, `Z_k = μ + √(L+λ) b_k`, `Z_{L+k} = μ − √(L+λ) b_k` with `B Bᵀ = R`.
pub fn composite_sigma_points(mu: &RVec, r: &RMat, params: &UtParams) -> Result<SigmaPointSet<RVec>> {
    let l = mu.len();
    if r.shape() != (l, l) {
        return Err(Error::Dimension(format!("mean has length {l}, covariance is {:?}", r.shape())));
    }
    let (w_mean, w_cov) = params.weights(l)?;
    let b = psd_sqrt(r)? * (l as f64 + params.lambda(l)).sqrt();
    let mut points = Vec::with_capacity(2 * l + 1);
    points.push(mu.clone());
    points.extend((0..l).map(|k| mu + b.column(k)));
    points.extend((0..l).map(|k| mu - b.column(k)));
    Ok(SigmaPointSet { points, w_mean, w_cov })
}

fn composite_to_complex(z: &RVec) -> CVec {
    let n = z.len() / 2;
    CVec::from_fn(n, |i, _| Complex64::new(z[i], z[n + i]))
}

/// Complex points `X_k = u_k + j v_k` from the composite points of `s`.
///
/// Each augmented point `[X_k; X_k*]` equals `T Z_k` exactly.
pub fn modified_complex_sigma_points(stats: &SecondOrderStats, params: &UtParams) -> Result<SigmaPointSet<CVec>> {
    stats.validate()?;
    let set = composite_sigma_points(&stats.composite_mean(), &stats.composite_cov()?, params)?;
    Ok(SigmaPointSet {
        points: set.points.iter().map(composite_to_complex).collect(),
        w_mean: set.w_mean,
        w_cov: set.w_cov,
    })
}

/// Points that only honour the Hermitian covariance (the complementary
/// covariance is treated as zero), as a proper-assuming UT would build them.
pub fn proper_sigma_points(stats: &SecondOrderStats, params: &UtParams) -> Result<SigmaPointSet<CVec>> {
    let n = stats.dim();
    let proper = SecondOrderStats::new(stats.mean.clone(), stats.hermitian.clone(), CMat::zeros(n, n));
    modified_complex_sigma_points(&proper, params)
}

fn weighted_mean(points: &[CVec], w: &[f64]) -> CVec {
    let n = points[0].len();
    points
        .iter()
        .zip(w)
        .fold(CVec::zeros(n), |acc, (p, &wk)| acc + p * Complex64::new(wk, 0.0))
}

/// `(Σ w (a−ā)(b−b̄)ᴴ, Σ w (a−ā)(b−b̄)ᵀ)`.
fn cross_moments(a: &[CVec], a_mean: &CVec, b: &[CVec], b_mean: &CVec, w: &[f64]) -> (CMat, CMat) {
    let mut herm = CMat::zeros(a_mean.len(), b_mean.len());
    let mut comp = herm.clone();
    for ((ak, bk), &wk) in a.iter().zip(b).zip(w) {
        let da = (ak - a_mean) * Complex64::new(wk, 0.0);
        let db = bk - b_mean;
        herm += &da * db.adjoint();
        comp += &da * db.transpose();
    }
    (herm, comp)
}

/// Weighted mean and Hermitian / complementary covariance of a point set.
pub fn reconstruct_stats(set: &SigmaPointSet<CVec>) -> Result<SecondOrderStats> {
    if set.is_empty() {
        return Err(Error::Dimension("empty sigma point set".into()));
    }
    let mean = weighted_mean(&set.points, &set.w_mean);
    let (hermitian, complementary) = cross_moments(&set.points, &mean, &set.points, &mean, &set.w_cov);
    Ok(SecondOrderStats::new(mean, hermitian, complementary))
}

/// `(x, noise) ↦ vector`, effect-free so sigma points may be mapped in any order.
pub type ComplexMap = Arc<dyn Fn(&CVec, &CVec) -> CVec + Send + Sync>;

/// `x_t = f(x_{t−1}, w_{t−1})`, `y_t = h(x_t, n_t)` with improper noises.
#[derive(Clone)]
pub struct NonlinearModel {
    pub f: ComplexMap,
    pub h: ComplexMap,
    pub driving: SecondOrderStats,
    pub measurement: SecondOrderStats,
    pub initial: SecondOrderStats,
}

impl fmt::Debug for NonlinearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearModel")
            .field("driving", &self.driving)
            .field("measurement", &self.measurement)
            .field("initial", &self.initial)
            .finish_non_exhaustive()
    }
}

impl NonlinearModel {
    pub fn new(
        f: ComplexMap,
        h: ComplexMap,
        driving: SecondOrderStats,
        measurement: SecondOrderStats,
        initial: SecondOrderStats,
    ) -> Result<Self> {
        let model = Self {
            f,
            h,
            driving,
            measurement,
            initial,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn state_dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.driving.dim()
    }

    pub fn measurement_dim(&self) -> usize {
        self.measurement.dim()
    }

    /// Checks the statistics and probes `f`, `h` at the means for output sizes.
    pub fn validate(&self) -> Result<()> {
        self.driving.validate()?;
        self.measurement.validate()?;
        self.initial.validate()?;
        let x = (self.f)(&self.initial.mean, &self.driving.mean);
        if x.len() != self.state_dim() {
            return Err(Error::Dimension(format!("f returns {} entries, state has {}", x.len(), self.state_dim())));
        }
        let y = (self.h)(&x, &self.measurement.mean);
        if y.len() != self.measurement_dim() {
            return Err(Error::Dimension(format!(
                "h returns {} entries, measurement noise has {}",
                y.len(),
                self.measurement_dim()
            )));
        }
        Ok(())
    }

    /// `f(x, w) = A₁x + A₂x* + B₁w + B₂w*`, `h(x, n) = C₁x + C₂x* + n`.
    pub fn from_linear(model: &WidelyLinearModel) -> Result<Self> {
        model.validate()?;
        model.require_zero_cross_covariance()?;
        let (a, b, c) = (model.a.clone(), model.b.clone(), model.c.clone());
        let f: ComplexMap = Arc::new(move |x, w| {
            a.m1() * x + a.m2() * x.conjugate() + b.m1() * w + b.m2() * w.conjugate()
        });
        let h: ComplexMap = Arc::new(move |x, n| c.m1() * x + c.m2() * x.conjugate() + n);
        Self::new(
            f,
            h,
            model.driving_noise_stats(),
            model.measurement_noise_stats(),
            model.initial_stats(),
        )
    }

    pub fn prior(&self) -> Result<FilterState> {
        Ok(FilterState {
            estimate: self.initial.augmented_mean(),
            cov: self.initial.augmented_cov()?,
            t: 0,
        })
    }
}

fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

fn concat(parts: &[&CVec]) -> CVec {
    CVec::from_iterator(parts.iter().map(|p| p.len()).sum(), parts.iter().flat_map(|p| p.iter().copied()))
}

fn ut_step(state: &FilterState, y: &CVec, model: &NonlinearModel, params: &UtParams, predict: bool) -> Result<StepReport> {
    let n = model.state_dim();
    let m = model.measurement_dim();
    if state.estimate.dim() != n || state.cov.rows() != n {
        return Err(Error::Dimension(format!("filter state has dimension {}, model has {n}", state.estimate.dim())));
    }
    if y.len() != m {
        return Err(Error::Dimension(format!("measurement has length {}, expected {m}", y.len())));
    }
    let p = if predict { model.noise_dim() } else { 0 };
    let empty_v = CVec::zeros(0);
    let empty_m = CMat::zeros(0, 0);
    let (w_mean, q, q_tilde) = if predict {
        (&model.driving.mean, &model.driving.hermitian, &model.driving.complementary)
    } else {
        (&empty_v, &empty_m, &empty_m)
    };
    let joint = SecondOrderStats::new(
        concat(&[state.estimate.top(), w_mean, &model.measurement.mean]),
        block_diag(&[state.cov.m1(), q, &model.measurement.hermitian]),
        block_diag(&[state.cov.m2(), q_tilde, &model.measurement.complementary]),
    );
    let set = modified_complex_sigma_points(&joint, params)?;

    let mut xs = Vec::with_capacity(set.len());
    let mut ys = Vec::with_capacity(set.len());
    for s in &set.points {
        let xk = s.rows(0, n).into_owned();
        let nk = s.rows(n + p, m).into_owned();
        let xp = if predict { (model.f)(&xk, &s.rows(n, p).into_owned()) } else { xk };
        let yk = (model.h)(&xp, &nk);
        if xp.len() != n || yk.len() != m {
            return Err(Error::Dimension("f or h changed output size".into()));
        }
        xs.push(xp);
        ys.push(yk);
    }

    let x_mean = weighted_mean(&xs, &set.w_mean);
    let y_mean = weighted_mean(&ys, &set.w_mean);
    let (pxx, pxx_t) = cross_moments(&xs, &x_mean, &xs, &x_mean, &set.w_cov);
    let (pyy, pyy_t) = cross_moments(&ys, &y_mean, &ys, &y_mean, &set.w_cov);
    let (pxy, pxy_t) = cross_moments(&xs, &x_mean, &ys, &y_mean, &set.w_cov);

    let predicted = FilterState {
        estimate: AugmentedVector::new(x_mean),
        cov: AugmentedMatrix::new(pxx, pxx_t)?.symmetrize(),
        t: if predict { state.t + 1 } else { state.t },
    };
    let s_bar = AugmentedMatrix::new(pyy, pyy_t)?.symmetrize();
    let cross = AugmentedMatrix::new(pxy, pxy_t)?;
    let (gain, singular) = right_divide_selfadjoint(&cross.full(), &s_bar.full());
    let gain = AugmentedMatrix::from_full(&gain)?;
    let innovation = AugmentedVector::new(y - &y_mean);
    let correction = gain.apply(&innovation)?;
    let estimate = AugmentedVector::new(predicted.estimate.top() + correction.top());
    let cov = predicted
        .cov
        .sub(&gain.mul(&s_bar)?.mul(&gain.adjoint())?)?
        .symmetrize();
    Ok(StepReport {
        posterior: FilterState {
            estimate,
            cov,
            t: predicted.t,
        },
        predicted,
        innovation,
        innovation_cov: s_bar,
        gain,
        singular_innovation: singular,
    })
}

/// Predict through `f` and update with `y` from one set of joint `[x; w; n]` sigma points.
pub fn uwlckf_step(state: &FilterState, y: &CVec, model: &NonlinearModel, params: &UtParams) -> Result<StepReport> {
    ut_step(state, y, model, params, true)
}

/// Update only: `state` is already the prediction for `y` (used for `y₀`).
pub fn uwlckf_update(state: &FilterState, y: &CVec, model: &NonlinearModel, params: &UtParams) -> Result<StepReport> {
    ut_step(state, y, model, params, false)
}

/// Runs the UWLCKF over a measurement sequence with the same start-up rule as
/// [`crate::linear::wlckf_run`].
pub fn uwlckf_run(
    model: &NonlinearModel,
    measurements: &[CVec],
    init: Option<FilterState>,
    params: &UtParams,
) -> Result<Vec<StepReport>> {
    let (mut state, mut skip_predict) = match init {
        Some(s) => (s, false),
        None => (model.prior()?, true),
    };
    let mut out = Vec::with_capacity(measurements.len());
    for y in measurements {
        let report = if skip_predict {
            skip_predict = false;
            uwlckf_update(&state, y, model, params)?
        } else {
            uwlckf_step(&state, y, model, params)?
        };
        state = report.posterior.clone();
        out.push(report);
    }
    Ok(out)
}

/// `(x, noise) ↦ vector` in the real domain.
pub type RealMap = Arc<dyn Fn(&RVec, &RVec) -> RVec + Send + Sync>;

/// Real model `x_t = f(x_{t−1}, w)`, `y_t = h(x_t, v)` with zero-mean noises of
/// covariance `q`, `r`.
#[derive(Clone)]
pub struct RealUkfModel {
    pub f: RealMap,
    pub h: RealMap,
    pub q: RMat,
    pub r: RMat,
}

impl fmt::Debug for RealUkfModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealUkfModel")
            .field("q", &self.q)
            .field("r", &self.r)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealUkfState {
    pub estimate: RVec,
    pub cov: RMat,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealUkfReport {
    pub predicted: RealUkfState,
    pub innovation_cov: RMat,
    pub gain: RMat,
    pub posterior: RealUkfState,
    pub singular_innovation: bool,
}

fn real_block_diag(blocks: &[&RMat]) -> RMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RMat::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

fn real_mean(points: &[RVec], w: &[f64]) -> RVec {
    points.iter().zip(w).fold(RVec::zeros(points[0].len()), |acc, (p, &wk)| acc + p * wk)
}

fn real_cross(a: &[RVec], am: &RVec, b: &[RVec], bm: &RVec, w: &[f64]) -> RMat {
    a.iter()
        .zip(b)
        .zip(w)
        .fold(RMat::zeros(am.len(), bm.len()), |acc, ((ak, bk), &wk)| acc + (ak - am) * (bk - bm).transpose() * wk)
}

fn real_ut_step(state: &RealUkfState, y: &RVec, model: &RealUkfModel, params: &UtParams, predict: bool) -> Result<RealUkfReport> {
    let n = state.estimate.len();
    let m = model.r.nrows();
    let p = if predict { model.q.nrows() } else { 0 };
    if state.cov.shape() != (n, n) || y.len() != m {
        return Err(Error::Dimension("UKF state or measurement size".into()));
    }
    let empty = RMat::zeros(0, 0);
    let mut mean = RVec::zeros(n + p + m);
    mean.rows_mut(0, n).copy_from(&state.estimate);
    let cov = real_block_diag(&[&state.cov, if predict { &model.q } else { &empty }, &model.r]);
    let set = composite_sigma_points(&mean, &cov, params)?;

    let mut xs = Vec::with_capacity(set.len());
    let mut ys = Vec::with_capacity(set.len());
    for s in &set.points {
        let xk = s.rows(0, n).into_owned();
        let xp = if predict { (model.f)(&xk, &s.rows(n, p).into_owned()) } else { xk };
        let yk = (model.h)(&xp, &s.rows(n + p, m).into_owned());
        if xp.len() != n || yk.len() != m {
            return Err(Error::Dimension("f or h changed output size".into()));
        }
        xs.push(xp);
        ys.push(yk);
    }
    let xm = real_mean(&xs, &set.w_mean);
    let ym = real_mean(&ys, &set.w_mean);
    let pxx = real_cross(&xs, &xm, &xs, &xm, &set.w_cov);
    let pyy = real_cross(&ys, &ym, &ys, &ym, &set.w_cov);
    let pxy = real_cross(&xs, &xm, &ys, &ym, &set.w_cov);
    let s = (&pyy + pyy.transpose()) * 0.5;
    let (gain, singular) = right_divide_selfadjoint(&pxy, &s);
    let estimate = &xm + &gain * (y - &ym);
    let post = &pxx - &gain * &s * gain.transpose();
    let t = if predict { state.t + 1 } else { state.t };
    Ok(RealUkfReport {
        predicted: RealUkfState {
            estimate: xm,
            cov: (&pxx + pxx.transpose()) * 0.5,
            t,
        },
        innovation_cov: s,
        gain,
        posterior: RealUkfState {
            estimate,
            cov: (&post + post.transpose()) * 0.5,
            t,
        },
        singular_innovation: singular,
    })
}

/// Real UT predict + update over joint `[x; w; v]` points with covariance `diag(P, Q, R)`.
pub fn ukf_step(state: &RealUkfState, y: &RVec, model: &RealUkfModel, params: &UtParams) -> Result<RealUkfReport> {
    real_ut_step(state, y, model, params, true)
}

pub fn ukf_update(state: &RealUkfState, y: &RVec, model: &RealUkfModel, params: &UtParams) -> Result<RealUkfReport> {
    real_ut_step(state, y, model, params, false)
}

/// Without `init`, `prior` is updated with the first measurement directly.
pub fn ukf_run(
    model: &RealUkfModel,
    measurements: &[RVec],
    prior: RealUkfState,
    init_is_posterior: bool,
    params: &UtParams,
) -> Result<Vec<RealUkfReport>> {
    let mut state = prior;
    let mut skip_predict = !init_is_posterior;
    let mut out = Vec::with_capacity(measurements.len());
    for y in measurements {
        let report = if skip_predict {
            skip_predict = false;
            ukf_update(&state, y, model, params)?
        } else {
            ukf_step(&state, y, model, params)?
        };
        state = report.posterior.clone();
        out.push(report);
    }
    Ok(out)
}
