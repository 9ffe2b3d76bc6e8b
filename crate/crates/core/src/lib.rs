//! Two-party fidelity estimation by classical shadows and quantum amplitude
//! estimation, simulated inside the stabilizer formalism.
//!
//! Bob rotates copies of his (possibly noisy) state by uniformly random
//! Cliffords and measures in the computational basis. Alice, holding the pure
//! target, estimates each overlap `|<b|C|psi>|^2` with phase-estimation based
//! amplitude estimation and turns the medians into the fidelity estimator
//! `(2^n + 1) * mean(median) - 1`.
//!
//! The numerical modules are generic over the scalar type through
//! [`scalar::Real`]; `f64` and `f32` aliases are exported below. Exact
//! probabilities coming out of the tableau simulator are carried as
//! [`stabilizer::Dyadic`] values.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod noise;
pub mod protocol;
pub mod qae;
pub mod scalar;
pub mod seeds;
pub mod stabilizer;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
pub use scalar::Real;

pub type QaeDistribution64 = qae::QaeDistribution<f64>;
pub type QaeDistribution32 = qae::QaeDistribution<f32>;
pub type QaeSampler64 = qae::QaeSampler<f64>;
pub type QaeSampler32 = qae::QaeSampler<f32>;
pub type NoiseModel64 = noise::NoiseModel<f64>;
pub type NoiseModel32 = noise::NoiseModel<f32>;
pub type AmplitudeSample64 = estimators::AmplitudeSample<f64>;
pub type AmplitudeSample32 = estimators::AmplitudeSample<f32>;
pub type RunEstimate64 = estimators::RunEstimate<f64>;
pub type RunEstimate32 = estimators::RunEstimate<f32>;
pub type ResourcePlan64 = bounds::ResourcePlan<f64>;
pub type ResourcePlan32 = bounds::ResourcePlan<f32>;
pub type CorollaryPlan64 = bounds::CorollaryPlan<f64>;
pub type CorollaryPlan32 = bounds::CorollaryPlan<f32>;
