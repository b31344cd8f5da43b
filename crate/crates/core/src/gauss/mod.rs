//! Gaussian squared-Forrelation distributions and the statistics that separate them.
//!
//! Vectors have `N = 2^n` coordinates and `H` is the orthonormal Hadamard matrix. Yes samples
//! satisfy `Y = HX` with `X ∼ 𝒩(0, Σ)`; No samples draw `Y ∼ 𝒩(0, HΣH)` independently.
//! This part of the crate works in `f64`.

mod covariance;
mod distinguisher;
mod moments;
mod sample;
mod statistic;

pub use covariance::{
    hadamard_conjugate, random_psd_matrix, CovarianceDescriptor, CovarianceSpec, PSD_TOLERANCE,
    SYMMETRY_TOLERANCE,
};
pub use distinguisher::{
    acceptance_probability, faulty_acceptance_probability, faulty_phase_oracle_advantage,
    noisy_quantum_distinguisher, ACCEPTANCE_CONFIDENCE,
};
pub use moments::{isserlis_moment, nogo_frobenius_check, NogoReport, MAX_ISSERLIS_ORDER};
pub use sample::{
    round_to_boolean, sample_raz_tal, sample_rounded_instance, sample_squared_forrelation,
    truncate, truncation_events, truncation_tail_bound, GaussianSample, Label, RoundedInstance,
    SampleHeader,
};
pub use statistic::{completeness_score, expectation_gap, psi_statistic, psi_statistics};
