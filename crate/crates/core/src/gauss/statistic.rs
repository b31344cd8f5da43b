use super::covariance::CovarianceSpec;
use super::sample::GaussianSample;
use crate::bits::BitString;
use crate::error::{invalid, Result};
use crate::fourier::{fwht_in_place, fwht_orthonormal_in_place};
use crate::noise::ErrorVectorDistribution;

fn check_len(sample: &GaussianSample) -> Result<usize> {
    let len = sample.x.len();
    if sample.y_prime.len() != len || !len.is_power_of_two() {
        return Err(invalid(format!(
            "sample vectors of lengths {} and {} do not match",
            len,
            sample.y_prime.len()
        )));
    }
    Ok(len)
}

fn squared_transform(x: &[f64]) -> Vec<f64> {
    let mut hx = x.to_vec();
    fwht_orthonormal_in_place(&mut hx).expect("length checked");
    hx.iter_mut().for_each(|v| *v *= *v);
    hx
}

/// `ψ_e = (1/N) Σ_i (HX)_i² Y'_{i⊕e}`.
pub fn psi_statistic(sample: &GaussianSample, e: BitString) -> Result<f64> {
    let len = check_len(sample)?;
    if 1usize << e.len() != len {
        return Err(invalid(format!(
            "error vector over {} bits for a sample of length {len}",
            e.len()
        )));
    }
    let a = squared_transform(&sample.x);
    let shift = e.index();
    Ok(a.iter()
        .enumerate()
        .map(|(i, v)| v * sample.y_prime[i ^ shift])
        .sum::<f64>()
        / len as f64)
}

/// `ψ_e` for every `e` at once, indexed by `e`.
pub fn psi_statistics(sample: &GaussianSample) -> Result<Vec<f64>> {
    let len = check_len(sample)?;
    // Σ_i a_i b_{i⊕e} is an XOR correlation, diagonal under the transform.
    let mut a = squared_transform(&sample.x);
    let mut b = sample.y_prime.clone();
    fwht_in_place(&mut a)?;
    fwht_in_place(&mut b)?;
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    fwht_in_place(&mut a)?;
    let scale = (len as f64).powi(2);
    Ok(a.into_iter().map(|v| v / scale).collect())
}

/// `E_Yes[ψ_e] − E_No[ψ_e] = (2/N) Σ_i Σ̃²_{i,i⊕e}`.
pub fn expectation_gap(spec: &CovarianceSpec, e: BitString) -> Result<f64> {
    if e.len() != spec.n() {
        return Err(invalid(format!(
            "error vector over {} bits for n = {}",
            e.len(),
            spec.n()
        )));
    }
    Ok(gap_at(spec, e.index()))
}

fn gap_at(spec: &CovarianceSpec, e: usize) -> f64 {
    let dim = spec.dimension();
    if let Some(epsilon) = spec.epsilon() {
        return if e == 0 { 2.0 * epsilon * epsilon } else { 0.0 };
    }
    2.0 * (0..dim)
        .map(|i| spec.conjugate_entry(i, i ^ e).powi(2))
        .sum::<f64>()
        / dim as f64
}

/// `Σ_e ℰ(e) · (2/N) Σ_i Σ̃²_{i,i⊕e}`.
pub fn completeness_score(
    spec: &CovarianceSpec,
    dist: &ErrorVectorDistribution<f64>,
) -> Result<f64> {
    if dist.n() != spec.n() {
        return Err(invalid(format!(
            "error distribution over {} bits for n = {}",
            dist.n(),
            spec.n()
        )));
    }
    if let Some(epsilon) = spec.epsilon() {
        let p0 = dist.probability(BitString::zeros(spec.n())?)?;
        return Ok(p0 * 2.0 * epsilon * epsilon);
    }
    Ok(dist
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .map(|(e, p)| p * gap_at(spec, e))
        .sum())
}
