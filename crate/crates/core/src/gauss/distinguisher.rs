//! One-query Fourier-sampling distinguisher on rounded instances: sample `s` with probability
//! `f̂(s)²`, shift it by a pre-oracle error `e`, and accept iff `g(s ⊕ e) = +1`.

use rand::Rng;

use super::sample::RoundedInstance;
use crate::error::{invalid, Result};
use crate::fourier::{Convention, FourierSpectrum};
use crate::noise::ErrorVectorDistribution;
use crate::sampling::DiscreteSampler;
use crate::stats::ProportionEstimate;

/// Confidence level of the intervals attached to acceptance rates.
pub const ACCEPTANCE_CONFIDENCE: f64 = 0.95;

fn fourier_power(instance: &RoundedInstance) -> Vec<f64> {
    FourierSpectrum::<f64>::of(&instance.f, Convention::Mean).power()
}

fn accepts(instance: &RoundedInstance, s: usize) -> bool {
    instance.g.value(s) == 1
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(invalid("at least one query is required"));
    }
    Ok(())
}

pub fn noisy_quantum_distinguisher<R: Rng + ?Sized>(
    instance: &RoundedInstance,
    dist: &ErrorVectorDistribution<f64>,
    trials: usize,
    rng: &mut R,
) -> Result<ProportionEstimate> {
    check_trials(trials)?;
    if dist.n() != instance.n() {
        return Err(invalid(format!(
            "error distribution over {} bits for an instance over {}",
            dist.n(),
            instance.n()
        )));
    }
    let sampler = DiscreteSampler::new(&fourier_power(instance))?;
    let mut accepted = 0;
    for _ in 0..trials {
        let e = dist.sample(rng).index();
        let s = sampler.sample(rng);
        accepted += usize::from(accepts(instance, s ^ e));
    }
    Ok(ProportionEstimate::from_counts(
        accepted,
        trials,
        ACCEPTANCE_CONFIDENCE,
    ))
}

/// Exact acceptance probability `Σ_t Pr[s ⊕ e = t] (1 + g(t))/2`.
pub fn acceptance_probability(
    instance: &RoundedInstance,
    dist: &ErrorVectorDistribution<f64>,
) -> Result<f64> {
    let shifted = dist.shift(&fourier_power(instance))?;
    Ok(shifted
        .iter()
        .enumerate()
        .filter(|(t, _)| accepts(instance, *t))
        .map(|(_, p)| p)
        .sum())
}

fn check_p1(p1: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&p1) {
        return Err(invalid(format!("p1 must lie in [1/2, 1], got {p1}")));
    }
    Ok(())
}

/// Noiseless distinguisher whose oracle acts only with probability `p1`; otherwise the state
/// is Fourier-sampled as if `f ≡ +1`, which always yields `s = 0`.
pub fn faulty_phase_oracle_advantage<R: Rng + ?Sized>(
    instance: &RoundedInstance,
    p1: f64,
    trials: usize,
    rng: &mut R,
) -> Result<ProportionEstimate> {
    check_trials(trials)?;
    check_p1(p1)?;
    let sampler = DiscreteSampler::new(&fourier_power(instance))?;
    let mut accepted = 0;
    for _ in 0..trials {
        let s = if rng.random::<f64>() < p1 {
            sampler.sample(rng)
        } else {
            0
        };
        accepted += usize::from(accepts(instance, s));
    }
    Ok(ProportionEstimate::from_counts(
        accepted,
        trials,
        ACCEPTANCE_CONFIDENCE,
    ))
}

/// Exact acceptance probability of [`faulty_phase_oracle_advantage`].
pub fn faulty_acceptance_probability(instance: &RoundedInstance, p1: f64) -> Result<f64> {
    check_p1(p1)?;
    let noiseless = acceptance_probability(instance, &ErrorVectorDistribution::noiseless(instance.n())?)?;
    let identity = if accepts(instance, 0) { 1.0 } else { 0.0 };
    Ok(p1 * noiseless + (1.0 - p1) * identity)
}
