//! Second-order statistics of improper complex random vectors.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::augmented::{
    augmented_to_real_matrix, max_abs_c, psd_sqrt, real_matrix_to_augmented, AugmentedMatrix,
    AugmentedVector, CMat, CVec, RMat, RVec, TransformMode, CONSISTENCY_TOL, PSD_TOL,
};
use crate::error::{Error, Result, StatsViolation};

/// Mean, Hermitian covariance `E(x−μ)(x−μ)ᴴ` and complementary covariance
/// `E(x−μ)(x−μ)ᵀ` of a complex random vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderStats {
    pub mean: CVec,
    pub hermitian: CMat,
    pub complementary: CMat,
}

impl SecondOrderStats {
    pub fn new(mean: CVec, hermitian: CMat, complementary: CMat) -> Self {
        Self {
            mean,
            hermitian,
            complementary,
        }
    }

    /// Zero-mean scalar statistics with variance `r` and complementary variance `r_tilde`.
    pub fn scalar(r: f64, r_tilde: Complex64) -> Self {
        Self {
            mean: CVec::zeros(1),
            hermitian: CMat::from_element(1, 1, Complex64::new(r, 0.0)),
            complementary: CMat::from_element(1, 1, r_tilde),
        }
    }

    /// Zero-mean statistics from an augmented covariance.
    pub fn from_augmented(cov: &AugmentedMatrix) -> Self {
        Self {
            mean: CVec::zeros(cov.rows()),
            hermitian: cov.m1().clone(),
            complementary: cov.m2().clone(),
        }
    }

    /// Statistics of `u + jv` for a real composite `[u; v]` with the given mean and covariance.
    pub fn from_composite(mean: &RVec, cov: &RMat) -> Result<Self> {
        let aug = real_matrix_to_augmented(cov, TransformMode::Covariance)?;
        let n = mean.len() / 2;
        if mean.len() % 2 != 0 || aug.rows() != n {
            return Err(Error::Dimension("composite mean and covariance disagree".into()));
        }
        let mean = CVec::from_fn(n, |i, _| Complex64::new(mean[i], mean[n + i]));
        Ok(Self::new(mean, aug.m1().clone(), aug.m2().clone()))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn augmented_mean(&self) -> AugmentedVector {
        AugmentedVector::new(self.mean.clone())
    }

    pub fn augmented_cov(&self) -> Result<AugmentedMatrix> {
        AugmentedMatrix::new(self.hermitian.clone(), self.complementary.clone())
    }

    /// Real composite mean `½ Tᴴ μ̄ = [Re μ; Im μ]`.
    pub fn composite_mean(&self) -> RVec {
        let n = self.dim();
        RVec::from_fn(2 * n, |i, _| {
            if i < n {
                self.mean[i].re
            } else {
                self.mean[i - n].im
            }
        })
    }

    /// Real composite covariance `¼ Tᴴ R̄ T`.
    pub fn composite_cov(&self) -> Result<RMat> {
        augmented_to_real_matrix(&self.augmented_cov()?, TransformMode::Covariance)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.hermitian.shape() != (n, n) || self.complementary.shape() != (n, n) {
            return Err(Error::InvalidStats(StatsViolation::Dimension(format!(
                "mean {n}, hermitian {:?}, complementary {:?}",
                self.hermitian.shape(),
                self.complementary.shape()
            ))));
        }
        let scale = max_abs_c(&self.hermitian)
            .max(max_abs_c(&self.complementary))
            .max(1.0);
        if max_abs_c(&(&self.hermitian - self.hermitian.adjoint())) > CONSISTENCY_TOL * scale {
            return Err(Error::InvalidStats(StatsViolation::NonHermitian));
        }
        if max_abs_c(&(&self.complementary - self.complementary.transpose()))
            > CONSISTENCY_TOL * scale
        {
            return Err(Error::InvalidStats(StatsViolation::NonSymmetric));
        }
        if n == 0 {
            return Ok(());
        }
        let full = self.augmented_cov()?.full();
        let sym = (&full + full.adjoint()) * Complex64::new(0.5, 0.0);
        let min = SymmetricEigen::new(sym).eigenvalues.min();
        if min < -PSD_TOL * scale {
            return Err(Error::InvalidStats(StatsViolation::AugmentedNotPsd(min)));
        }
        Ok(())
    }

    /// Proper when `‖R̃‖_max ≤ tol · max(1, ‖R‖_max)`.
    pub fn is_proper(&self, tol: f64) -> bool {
        max_abs_c(&self.complementary) <= tol * max_abs_c(&self.hermitian).max(1.0)
    }

    /// `ρ = R̃ / R` for scalar statistics.
    pub fn correlation_coefficient(&self) -> Result<Complex64> {
        if self.dim() != 1 {
            return Err(Error::Dimension(format!(
                "correlation coefficient needs scalar stats, got dimension {}",
                self.dim()
            )));
        }
        let r = self.hermitian[(0, 0)].re;
        if r <= 0.0 {
            return Err(Error::Degenerate("zero Hermitian variance".into()));
        }
        Ok(self.complementary[(0, 0)] / r)
    }

    /// Draws `count` vectors through the real composite Gaussian.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<CVec>> {
        let sampler = Sampler::new(self)?;
        Ok((0..count).map(|_| sampler.draw(rng)).collect())
    }
}

/// Precomputed composite factor for repeated draws from one distribution.
#[derive(Debug, Clone)]
pub struct Sampler {
    mean: RVec,
    factor: RMat,
}

impl Sampler {
    pub fn new(stats: &SecondOrderStats) -> Result<Self> {
        stats.validate()?;
        Ok(Self {
            mean: stats.composite_mean(),
            factor: psd_sqrt(&stats.composite_cov()?)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> CVec {
        let n = self.dim();
        let eps = RVec::from_fn(2 * n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let z = &self.mean + &self.factor * eps;
        CVec::from_fn(n, |i, _| Complex64::new(z[i], z[n + i]))
    }
}

/// Sample mean and unbiased (count − 1) Hermitian and complementary covariances.
pub fn empirical_stats(samples: &[CVec]) -> Result<SecondOrderStats> {
    if samples.len() < 2 {
        return Err(Error::Dimension(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples[0].len();
    if samples.iter().any(|s| s.len() != n) {
        return Err(Error::Dimension("ragged sample dimensions".into()));
    }
    let count = samples.len() as f64;
    let mean = samples.iter().fold(CVec::zeros(n), |acc, s| acc + s) / Complex64::new(count, 0.0);
    let mut herm = CMat::zeros(n, n);
    let mut comp = CMat::zeros(n, n);
    for s in samples {
        let d = s - &mean;
        herm += &d * d.adjoint();
        comp += &d * d.transpose();
    }
    let norm = Complex64::new(1.0 / (count - 1.0), 0.0);
    Ok(SecondOrderStats::new(mean, herm * norm, comp * norm))
}
