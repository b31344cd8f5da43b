use rand::Rng;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Inverse-CDF sampler over `0..weights.len()`.
#[derive(Debug, Clone)]
pub struct DiscreteSampler<T> {
    cumulative: Vec<T>,
}

impl<T: Scalar> DiscreteSampler<T> {
    /// Weights must be nonnegative with a positive total; they are normalized internally.
    pub fn new(weights: &[T]) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("cannot sample from an empty weight vector"));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut total = T::zero();
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= T::zero()) || !w.is_finite() {
                return Err(invalid(format!("weight {i} is {w}")));
            }
            total += w;
            cumulative.push(total);
        }
        if !(total > T::zero()) {
            return Err(invalid("weights sum to zero"));
        }
        cumulative.iter_mut().for_each(|c| *c /= total);
        Ok(Self { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = T::unit(rng);
        // First index whose cumulative weight exceeds u; zero-weight entries are never chosen.
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}
