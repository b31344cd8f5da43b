//! Closed-form model of the noisy Deutsch–Jozsa circuit.
//!
//! Pre-oracle noise leaves each qubit in `|−⟩` instead of `|+⟩` with probability `1 − p1`,
//! which shifts the Fourier-sampled outcome `s` (drawn with probability `f̂(s)²`) to `s ⊕ E`.
//! The two depolarizing layers after the oracle then replace each output bit by a fair coin
//! with probability `1 − (1 − λ)²`.

use rand::Rng;

use crate::bits::BitString;
use crate::error::{resource, Result};
use crate::fourier::{BooleanFunction, Convention, FourierSpectrum};
use crate::noise::{flip_bits_independently, NoiseParams};
use crate::sampling::DiscreteSampler;
use crate::scalar::Scalar;

/// Largest `n` for which the exact output distribution is materialized.
pub const MAX_EXACT_DJ_QUBITS: usize = 12;

/// Repeated-shot sampler for one `(f, λ)` pair.
#[derive(Debug, Clone)]
pub struct NoisyDjSampler<T> {
    n: usize,
    spectrum: DiscreteSampler<T>,
    pre_oracle_flip: T,
    uniformize: T,
}

impl<T: Scalar> NoisyDjSampler<T> {
    pub fn new(f: &BooleanFunction, params: &NoiseParams<T>) -> Result<Self> {
        let power = FourierSpectrum::<T>::of(f, Convention::Mean).power();
        Ok(Self {
            n: f.n(),
            spectrum: DiscreteSampler::new(&power)?,
            pre_oracle_flip: params.pre_oracle_error_probability(),
            uniformize: params.readout_uniformization(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One measured bit string.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        BitString::new(self.n, self.sample_index(rng)).expect("index fits in n bits")
    }

    pub(crate) fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut outcome = self.spectrum.sample(rng);
        for i in 0..self.n {
            if T::unit(rng) < self.pre_oracle_flip {
                outcome ^= 1 << i;
            }
        }
        if self.uniformize > T::zero() {
            for i in 0..self.n {
                if T::unit(rng) < self.uniformize {
                    if rng.random::<bool>() {
                        outcome |= 1 << i;
                    } else {
                        outcome &= !(1 << i);
                    }
                }
            }
        }
        outcome
    }
}

pub fn sample_noisy_dj<T: Scalar, R: Rng + ?Sized>(
    f: &BooleanFunction,
    params: &NoiseParams<T>,
    rng: &mut R,
) -> Result<BitString> {
    Ok(NoisyDjSampler::new(f, params)?.sample(rng))
}

/// Exact output distribution of the analytic model.
pub fn output_distribution_noisy_dj<T: Scalar>(
    f: &BooleanFunction,
    params: &NoiseParams<T>,
) -> Result<Vec<T>> {
    if f.n() > MAX_EXACT_DJ_QUBITS {
        return Err(resource(format!(
            "exact distribution for n = {} exceeds the cap of {MAX_EXACT_DJ_QUBITS}",
            f.n()
        )));
    }
    let mut dist = FourierSpectrum::<T>::of(f, Convention::Mean).power();
    flip_bits_independently(&mut dist, params.pre_oracle_error_probability());
    // A fair-coin replacement flips the bit with half the replacement probability.
    flip_bits_independently(&mut dist, params.readout_uniformization() * T::of(0.5));
    Ok(dist)
}

/// `Pr[bit i = 1]` for each bit under `dist`.
pub fn bit_marginals<T: Scalar>(dist: &[T]) -> Vec<T> {
    let n = dist.len().trailing_zeros() as usize;
    let mut out = vec![T::zero(); n];
    for (x, &p) in dist.iter().enumerate() {
        for (i, slot) in out.iter_mut().enumerate() {
            if (x >> i) & 1 == 1 {
                *slot += p;
            }
        }
    }
    out
}

/// `½ Σ |p − q|`.
pub fn total_variation<T: Scalar>(p: &[T], q: &[T]) -> T {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| (a - b).abs())
        .sum::<T>()
        * T::of(0.5)
}
