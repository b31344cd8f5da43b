//! Noise-robust Deutsch–Jozsa decision: average each output bit over `M` noisy shots and
//! declare the function constant iff every average stays below
//! `(1 − λ)⁴/(2n) + g(λ)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{invalid, Result};
use crate::fourier::BooleanFunction;
use crate::noise::NoiseParams;
use crate::scalar::Scalar;
use crate::sim::NoisyDjSampler;
use crate::stats::ProportionEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Constant,
    Balanced,
}

impl FunctionClass {
    pub fn of(f: &BooleanFunction) -> Option<Self> {
        if f.is_constant() {
            Some(Self::Constant)
        } else if f.is_balanced() {
            Some(Self::Balanced)
        } else {
            None
        }
    }

    /// A fresh random instance: a uniformly signed constant or a uniform balanced function.
    pub fn sample<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<BooleanFunction> {
        match self {
            Self::Constant => {
                BooleanFunction::constant(n, if rng.random::<bool>() { 1 } else { -1 })
            }
            Self::Balanced => BooleanFunction::random_balanced(n, rng),
        }
    }
}

/// Default shot count `⌈8 n² ln n⌉`.
pub fn query_budget(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(invalid(format!("query budget needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok((8.0 * nf * nf * nf.ln()).ceil() as usize)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DjRunConfig<T> {
    n: usize,
    params: NoiseParams<T>,
    shots: usize,
    threshold: T,
    reject_unpromised: bool,
}

impl<T: Scalar> DjRunConfig<T> {
    /// Uses the default budget [`query_budget`].
    pub fn new(n: usize, lambda: T) -> Result<Self> {
        Self::with_shots(n, lambda, query_budget(n)?)
    }

    pub fn with_shots(n: usize, lambda: T, shots: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        if shots == 0 {
            return Err(invalid("shot count must be at least 1"));
        }
        let params = NoiseParams::new(lambda)?;
        let survival = params.readout_survival();
        let threshold = survival * survival / T::of(2.0 * n as f64) + params.g();
        Ok(Self {
            n,
            params,
            shots,
            threshold,
            reject_unpromised: false,
        })
    }

    /// Makes [`decide_dj`] reject functions that are neither constant nor balanced.
    pub fn rejecting_unpromised(mut self, reject: bool) -> Self {
        self.reject_unpromised = reject;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> T {
        self.params.lambda()
    }

    pub fn params(&self) -> &NoiseParams<T> {
        &self.params
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    /// Hoeffding failure bounds `(n e^{−2Mε²}, e^{−2Mε²})` for the constant and balanced
    /// classes with margin `ε = (1 − λ)⁴/(2n)`.
    pub fn hoeffding_failure_bounds(&self) -> (f64, f64) {
        let survival = self.params.readout_survival().to_f64_lossless();
        let margin = survival * survival / (2.0 * self.n as f64);
        let tail = (-2.0 * self.shots as f64 * margin * margin).exp();
        (self.n as f64 * tail, tail)
    }

    /// Whether the Hoeffding argument certifies success probability at least 2/3 for both
    /// classes at this shot count.
    pub fn guarantee_applies(&self) -> bool {
        let (constant, balanced) = self.hoeffding_failure_bounds();
        constant <= 1.0 / 3.0 && balanced <= 1.0 / 3.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjOutcome<T> {
    pub decision: FunctionClass,
    pub bit_averages: Vec<T>,
    pub shots_used: usize,
}

/// Runs `M` noisy shots on `f` and thresholds the per-bit averages.
pub fn decide_dj<T: Scalar, R: Rng + ?Sized>(
    f: &BooleanFunction,
    config: &DjRunConfig<T>,
    rng: &mut R,
) -> Result<DjOutcome<T>> {
    if f.n() != config.n {
        return Err(invalid(format!(
            "function over {} bits, configuration for {}",
            f.n(),
            config.n
        )));
    }
    if config.reject_unpromised && FunctionClass::of(f).is_none() {
        return Err(invalid("function is neither constant nor balanced"));
    }
    let sampler = NoisyDjSampler::new(f, &config.params)?;
    let mut ones = vec![0usize; config.n];
    for _ in 0..config.shots {
        let outcome = sampler.sample_index(rng);
        for (i, count) in ones.iter_mut().enumerate() {
            *count += (outcome >> i) & 1;
        }
    }
    let shots = T::of(config.shots as f64);
    let bit_averages: Vec<T> = ones.iter().map(|&c| T::of(c as f64) / shots).collect();
    let decision = if bit_averages.iter().all(|&y| y <= config.threshold) {
        FunctionClass::Constant
    } else {
        FunctionClass::Balanced
    };
    Ok(DjOutcome {
        decision,
        bit_averages,
        shots_used: config.shots,
    })
}

/// One trial: draw a fresh instance of `class` and report whether it was classified correctly.
pub fn run_trial<T: Scalar, R: Rng + ?Sized>(
    class: FunctionClass,
    config: &DjRunConfig<T>,
    rng: &mut R,
) -> Result<bool> {
    let f = class.sample(config.n, rng)?;
    Ok(decide_dj(&f, config, rng)?.decision == class)
}

/// Fraction of correct decisions over `trials` fresh instances of `class`.
pub fn estimate_success_rate<T: Scalar, R: Rng + ?Sized>(
    class: FunctionClass,
    config: &DjRunConfig<T>,
    trials: usize,
    confidence: f64,
    rng: &mut R,
) -> Result<ProportionEstimate> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let mut successes = 0;
    for _ in 0..trials {
        successes += usize::from(run_trial(class, config, rng)?);
    }
    Ok(ProportionEstimate::from_counts(successes, trials, confidence))
}

/// Exact probability that a constant function is classified correctly.
///
/// For constant `f` the output bits are independent with mean `g(λ)`, so the probability is
/// `Pr[Bin(M, g) ≤ ⌊M·threshold⌋]^n`.
pub fn constant_class_success_probability<T: Scalar>(config: &DjRunConfig<T>) -> f64 {
    let g = config.params.g().to_f64_lossless();
    let threshold = config.threshold.to_f64_lossless();
    let shots = config.shots as u64;
    let max_ones = (threshold * shots as f64 + 1e-9).floor().max(0.0) as u64;
    let per_bit = if g <= 0.0 || max_ones >= shots {
        1.0
    } else {
        Binomial::new(g.min(1.0), shots)
            .expect("valid binomial parameters")
            .cdf(max_ones)
    };
    per_bit.powi(config.n as i32)
}
