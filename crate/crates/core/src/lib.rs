//! Widely linear complex Kalman filtering.
//!
//! Filters for complex-valued state-space models whose states and noises are
//! improper, i.e. carry a nonzero complementary covariance `E x xᵀ`. The crate
//! provides the augmented algebra, improper Gaussian statistics, the widely
//! linear Kalman filter (WLCKF) with its strictly linear baseline (CKF) and a
//! dual-channel real KF oracle, closed-form MSE analysis for scalar models,
//! an unscented WLCKF built on moment-preserving complex sigma points, and the
//! phase-demodulation experiment.

pub mod augmented;
pub mod error;
pub mod improper;
pub mod linear;
pub mod mse;
pub mod phase;
pub mod rng;
pub mod unscented;

pub use augmented::{AugmentedMatrix, AugmentedVector, CMat, CVec, RMat, RVec, TransformMode};
pub use error::{Error, Result, StatsViolation};
pub use improper::SecondOrderStats;
pub use linear::{FilterState, StepReport, WidelyLinearModel};
pub use mse::{ScalarModelParams, StepCoefficients};
pub use unscented::{NonlinearModel, SigmaPointSet, UtParams};
pub use phase::PhaseModel;
