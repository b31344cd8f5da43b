//! Simulation of Deutsch–Jozsa and Fourier sampling under depolarizing noise, and of the
//! Gaussian squared-Forrelation distributions.
//!
//! The Boolean-function, noise and simulator layers are generic over [`Scalar`] (`f32` or
//! `f64`); the aliases below fix the scalar for the common cases. The Gaussian layer in
//! [`gauss`] is `f64` only.

// Guards written `!(x > 0.0)` reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod dj;
pub mod error;
pub mod fourier;
pub mod gauss;
pub mod noise;
pub mod sampling;
pub mod scalar;
pub mod seed;
pub mod sim;
pub mod stats;

pub use bits::BitString;
pub use dj::{decide_dj, estimate_success_rate, query_budget, FunctionClass};
pub use error::{Error, Result};
pub use fourier::{BooleanFunction, Convention};
pub use gauss::{CovarianceSpec, GaussianSample, Label, RoundedInstance};
pub use scalar::Scalar;
pub use seed::{derive_rng, derive_seed, ExperimentRng};
pub use stats::{ProportionEstimate, RunningMoments};

pub type Spectrum = fourier::FourierSpectrum<f64>;
pub type Spectrum32 = fourier::FourierSpectrum<f32>;
pub type Noise = noise::NoiseParams<f64>;
pub type Noise32 = noise::NoiseParams<f32>;
pub type ErrorDistribution = noise::ErrorVectorDistribution<f64>;
pub type ErrorDistribution32 = noise::ErrorVectorDistribution<f32>;
pub type Density = sim::DensityMatrix<f64>;
pub type Density32 = sim::DensityMatrix<f32>;
pub type DjConfig = dj::DjRunConfig<f64>;
pub type DjConfig32 = dj::DjRunConfig<f32>;
pub type DjResult = dj::DjOutcome<f64>;
