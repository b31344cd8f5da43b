//! Estimators and Hoeffding intervals shared by the experiments.

use serde::{Deserialize, Serialize};

/// Half-width `t` of the two-sided Hoeffding interval for the mean of `trials` independent
/// `[0, 1]` variables: `Pr[|mean − μ| ≥ t] ≤ 2 exp(−2 trials t²) = 1 − confidence`.
pub fn hoeffding_half_width(trials: usize, confidence: f64) -> f64 {
    assert!(trials > 0, "Hoeffding interval needs at least one trial");
    assert!(
        confidence > 0.0 && confidence < 1.0,
        "confidence {confidence} outside (0, 1)"
    );
    let delta = 1.0 - confidence;
    ((2.0 / delta).ln() / (2.0 * trials as f64)).sqrt()
}

/// A success count with its two-sided Hoeffding interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub successes: usize,
    pub trials: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

impl ProportionEstimate {
    pub fn from_counts(successes: usize, trials: usize, confidence: f64) -> Self {
        assert!(successes <= trials);
        let rate = successes as f64 / trials as f64;
        let half = hoeffding_half_width(trials, confidence);
        Self {
            successes,
            trials,
            rate,
            ci_low: (rate - half).max(0.0),
            ci_high: (rate + half).min(1.0),
            confidence,
        }
    }

    /// Binomial standard error `√(r(1 − r)/trials)`.
    pub fn standard_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }
}

/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two partial summaries (Chan et al.).
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self) -> f64 {
        if self.count == 0 {
            f64::INFINITY
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for RunningMoments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Self::new();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Difference of two independent means with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanDifference {
    pub estimate: f64,
    pub standard_error: f64,
}

impl MeanDifference {
    pub fn between(a: &RunningMoments, b: &RunningMoments) -> Self {
        Self {
            estimate: a.mean() - b.mean(),
            standard_error: (a.standard_error().powi(2) + b.standard_error().powi(2)).sqrt(),
        }
    }

    /// `estimate / standard_error`.
    pub fn z_score(&self) -> f64 {
        self.estimate / self.standard_error
    }

    /// Whether `target` lies within `k` standard errors of the estimate.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.standard_error
    }
}
