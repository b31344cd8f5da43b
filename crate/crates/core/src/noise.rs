//! Depolarizing-noise algebra for the noisy Deutsch–Jozsa circuit and distributions over
//! pre-oracle error vectors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, MAX_BITS};
use crate::error::{invalid, Result};
use crate::fourier::fwht_in_place;
use crate::sampling::DiscreteSampler;
use crate::scalar::Scalar;

/// Noise rate `λ` of the per-qubit depolarizing channel with the derived quantities
/// `p1 = 1 − λ + λ²/2` and `g(λ) = ½(2 − λ)λ((λ − 2)λ + 2)`.
///
/// `p1` is the probability that a qubit initialized to `|0⟩`, depolarized, Hadamard-rotated and
/// depolarized again is found in `|+⟩`; otherwise it is in `|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "LambdaRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>", serialize = "T: Serialize")
)]
pub struct NoiseParams<T> {
    lambda: T,
    p1: T,
    g: T,
}

#[derive(Deserialize)]
struct LambdaRepr<T> {
    lambda: T,
}

impl<T: Scalar> TryFrom<LambdaRepr<T>> for NoiseParams<T> {
    type Error = crate::Error;

    fn try_from(repr: LambdaRepr<T>) -> Result<Self> {
        Self::new(repr.lambda)
    }
}

impl<T: Scalar> NoiseParams<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(invalid(format!("noise rate {lambda} outside [0, 1]")));
        }
        let half = T::of(0.5);
        let two = T::of(2.0);
        let p1 = (T::one() - lambda) * (T::one() - lambda * half) + lambda * half;
        let g = half * (two - lambda) * lambda * ((lambda - two) * lambda + two);
        Ok(Self { lambda, p1, g })
    }

    pub fn noiseless() -> Self {
        Self::new(T::zero()).expect("zero noise is valid")
    }

    #[inline]
    pub fn lambda(&self) -> T {
        self.lambda
    }

    #[inline]
    pub fn p1(&self) -> T {
        self.p1
    }

    #[inline]
    pub fn g(&self) -> T {
        self.g
    }

    /// Probability that a qubit enters the oracle as `|−⟩`, i.e. `1 − p1`.
    #[inline]
    pub fn pre_oracle_error_probability(&self) -> T {
        T::one() - self.p1
    }

    /// `(1 − λ)²`: probability that an output bit survives the two post-oracle noise layers.
    #[inline]
    pub fn readout_survival(&self) -> T {
        let keep = T::one() - self.lambda;
        keep * keep
    }

    /// `1 − (1 − λ)²`: probability that an output bit is replaced by a fair coin.
    #[inline]
    pub fn readout_uniformization(&self) -> T {
        T::one() - self.readout_survival()
    }

    /// Expected value of a measured bit before readout noise: `(2p1 − 1)s̄ + (1 − p1)`.
    pub fn pre_readout_bit_value(&self, sbar: T) -> T {
        (T::of(2.0) * self.p1 - T::one()) * sbar + (T::one() - self.p1)
    }

    /// Expected value `y_i = (1 − λ)⁴ s̄_i + g(λ)` of output bit `i` given its spectral mass.
    pub fn expected_bit_value(&self, sbar: T) -> T {
        let survival = self.readout_survival();
        survival * survival * sbar + self.g
    }
}

pub fn derive_noise_params<T: Scalar>(lambda: T) -> Result<NoiseParams<T>> {
    NoiseParams::new(lambda)
}

pub fn expected_bit_value<T: Scalar>(params: &NoiseParams<T>, sbar: T) -> T {
    params.expected_bit_value(sbar)
}

/// A distribution `ℰ` over error vectors `e ∈ {0,1}^n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(
    try_from = "ErrorVectorRepr<T>",
    into = "ErrorVectorRepr<T>",
    bound(deserialize = "T: Scalar + Deserialize<'de>", serialize = "T: Scalar + Serialize")
)]
pub struct ErrorVectorDistribution<T: Scalar> {
    n: usize,
    kind: ErrorKind<T>,
}

#[derive(Debug, Clone)]
enum ErrorKind<T: Scalar> {
    /// Independent bit flips with probability `lambda`: `ℰ(e) = (1 − λ)^{n−|e|} λ^{|e|}`.
    Iid { lambda: T },
    Explicit {
        probabilities: Vec<T>,
        sampler: DiscreteSampler<T>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ErrorVectorRepr<T> {
    Iid { n: usize, lambda: T },
    Explicit { n: usize, probabilities: Vec<T> },
}

impl<T: Scalar> TryFrom<ErrorVectorRepr<T>> for ErrorVectorDistribution<T> {
    type Error = crate::Error;

    fn try_from(repr: ErrorVectorRepr<T>) -> Result<Self> {
        match repr {
            ErrorVectorRepr::Iid { n, lambda } => Self::iid(n, lambda),
            ErrorVectorRepr::Explicit { n, probabilities } => {
                let dist = Self::explicit(probabilities)?;
                if dist.n != n {
                    return Err(invalid(format!(
                        "explicit table has n = {} but header says {n}",
                        dist.n
                    )));
                }
                Ok(dist)
            }
        }
    }
}

impl<T: Scalar> From<ErrorVectorDistribution<T>> for ErrorVectorRepr<T> {
    fn from(dist: ErrorVectorDistribution<T>) -> Self {
        match dist.kind {
            ErrorKind::Iid { lambda } => ErrorVectorRepr::Iid { n: dist.n, lambda },
            ErrorKind::Explicit { probabilities, .. } => ErrorVectorRepr::Explicit {
                n: dist.n,
                probabilities,
            },
        }
    }
}

impl<T: Scalar> ErrorVectorDistribution<T> {
    pub fn iid(n: usize, lambda: T) -> Result<Self> {
        check_n(n)?;
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(invalid(format!("flip probability {lambda} outside [0, 1]")));
        }
        Ok(Self {
            n,
            kind: ErrorKind::Iid { lambda },
        })
    }

    /// No errors: all mass on `0^n`.
    pub fn noiseless(n: usize) -> Result<Self> {
        Self::iid(n, T::zero())
    }

    /// `IID(ln n / n)` (natural logarithm).
    pub fn log_over_n(n: usize) -> Result<Self> {
        let nf = n as f64;
        Self::iid(n, T::of(nf.ln() / nf))
    }

    /// An explicit probability table over `{0,1}^n`, indexed like [`BitString::index`].
    pub fn explicit(probabilities: Vec<T>) -> Result<Self> {
        let len = probabilities.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!(
                "probability table length {len} is not 2^n with n >= 1"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_n(n)?;
        if let Some(i) = probabilities.iter().position(|&p| !(p >= T::zero())) {
            return Err(invalid(format!(
                "probability of error vector {i} is {}",
                probabilities[i]
            )));
        }
        let total: T = probabilities.iter().copied().sum();
        let tol = (T::epsilon() * T::of(4.0 * len as f64)).max(T::of(1e-12));
        if (total - T::one()).abs() > tol {
            return Err(invalid(format!("probabilities sum to {total}, expected 1")));
        }
        let sampler = DiscreteSampler::new(&probabilities)?;
        Ok(Self {
            n,
            kind: ErrorKind::Explicit {
                probabilities,
                sampler,
            },
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n)?;
        let len = 1usize << n;
        Self::explicit(vec![T::one() / T::of(len as f64); len])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The per-bit flip probability for the independent kind.
    pub fn flip_probability(&self) -> Option<T> {
        match self.kind {
            ErrorKind::Iid { lambda } => Some(lambda),
            ErrorKind::Explicit { .. } => None,
        }
    }

    /// `ℰ(e)`.
    pub fn probability(&self, e: BitString) -> Result<T> {
        if e.len() != self.n {
            return Err(invalid(format!(
                "error vector has {} bits, distribution is over {}",
                e.len(),
                self.n
            )));
        }
        Ok(self.probability_at(e.index()))
    }

    fn probability_at(&self, index: usize) -> T {
        match &self.kind {
            ErrorKind::Iid { lambda } => {
                let weight = index.count_ones() as i32;
                let n = self.n as i32;
                (T::one() - *lambda).powi(n - weight) * lambda.powi(weight)
            }
            ErrorKind::Explicit { probabilities, .. } => probabilities[index],
        }
    }

    /// The full table `ℰ(e)` for every `e`.
    pub fn probabilities(&self) -> Vec<T> {
        (0..1usize << self.n).map(|e| self.probability_at(e)).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let index = match &self.kind {
            ErrorKind::Iid { lambda } => (0..self.n).fold(0usize, |acc, i| {
                if T::unit(rng) < *lambda {
                    acc | (1 << i)
                } else {
                    acc
                }
            }),
            ErrorKind::Explicit { sampler, .. } => sampler.sample(rng),
        };
        BitString::new(self.n, index).expect("sampled index fits in n bits")
    }

    /// Distribution of `s ⊕ e` for `s ∼ weights` and independent `e ∼ ℰ`.
    pub fn shift(&self, weights: &[T]) -> Result<Vec<T>> {
        if weights.len() != 1usize << self.n {
            return Err(invalid(format!(
                "weight vector of length {} does not match n = {}",
                weights.len(),
                self.n
            )));
        }
        let mut out = weights.to_vec();
        match &self.kind {
            ErrorKind::Iid { lambda } => flip_bits_independently(&mut out, *lambda),
            ErrorKind::Explicit { probabilities, .. } => {
                // XOR convolution diagonalizes under the Walsh–Hadamard transform.
                let mut kernel = probabilities.clone();
                fwht_in_place(&mut kernel)?;
                fwht_in_place(&mut out)?;
                let len = T::of(out.len() as f64);
                out.iter_mut()
                    .zip(&kernel)
                    .for_each(|(o, &k)| *o = *o * k / len);
                fwht_in_place(&mut out)?;
            }
        }
        Ok(out)
    }
}

/// Replaces `weights` by the distribution after flipping every bit independently with
/// probability `flip`.
pub(crate) fn flip_bits_independently<T: Scalar>(weights: &mut [T], flip: T) {
    if flip == T::zero() {
        return;
    }
    let keep = T::one() - flip;
    let len = weights.len();
    let mut bit = 1;
    while bit < len {
        for x in 0..len {
            if x & bit == 0 {
                let (a, b) = (weights[x], weights[x | bit]);
                weights[x] = keep * a + flip * b;
                weights[x | bit] = flip * a + keep * b;
            }
        }
        bit <<= 1;
    }
}

pub fn error_probability<T: Scalar>(dist: &ErrorVectorDistribution<T>, e: BitString) -> Result<T> {
    dist.probability(e)
}

pub fn sample_error_vector<T: Scalar, R: Rng + ?Sized>(
    dist: &ErrorVectorDistribution<T>,
    rng: &mut R,
) -> BitString {
    dist.sample(rng)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_BITS {
        return Err(invalid(format!("n = {n} outside 1..={MAX_BITS}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
        let coeff = (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64);
        coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
    }

    #[test]
    fn closed_forms_at_reference_points() {
        let p = NoiseParams::<f64>::new(0.0).unwrap();
        assert_eq!((p.p1(), p.g()), (1.0, 0.0));
        let p = NoiseParams::<f64>::new(1.0).unwrap();
        assert_eq!((p.p1(), p.g()), (0.5, 0.5));
        let p = NoiseParams::<f64>::new(0.2).unwrap();
        assert!((p.p1() - 0.82).abs() < 1e-15);
        assert!((p.g() - 0.2952).abs() < 1e-15);
        assert!(NoiseParams::new(-0.1).is_err());
        assert!(NoiseParams::new(1.5).is_err());
        assert!(NoiseParams::new(f64::NAN).is_err());
    }

    #[test]
    fn expected_bit_values() {
        let p = NoiseParams::<f64>::new(0.0).unwrap();
        assert_eq!(p.expected_bit_value(0.0), 0.0);
        assert_eq!(p.expected_bit_value(1.0), 1.0);
        let p = NoiseParams::<f64>::new(0.2).unwrap();
        assert!((expected_bit_value(&p, 1.0) - 0.7048).abs() < 1e-15);
    }

    #[test]
    fn noise_identities_on_grid() {
        for i in 0..1000 {
            let lambda = i as f64 / 999.0;
            let p = NoiseParams::new(lambda).unwrap();
            assert!((p.p1() - (1.0 - lambda + lambda * lambda / 2.0)).abs() < 1e-12);
            assert!((2.0 * p.p1() - 1.0 - (1.0 - lambda).powi(2)).abs() < 1e-12);
            assert!((0.5..=1.0).contains(&p.p1()));
            assert!((0.0..=0.5 + 1e-15).contains(&p.g()));
            for j in 0..=10 {
                let s = j as f64 / 10.0;
                let composed = p.readout_survival() * p.pre_readout_bit_value(s)
                    + p.readout_uniformization() / 2.0;
                assert!((composed - p.expected_bit_value(s)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_precision_params() {
        let p = NoiseParams::<f32>::new(0.2).unwrap();
        assert!((p.p1() - 0.82).abs() < 1e-6);
        assert!((p.g() - 0.2952).abs() < 1e-6);
    }

    #[test]
    fn noise_params_serialize_through_lambda() {
        let p = NoiseParams::<f64>::new(0.2).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: NoiseParams<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<NoiseParams<f64>>(r#"{"lambda": 2.0}"#).is_err());
    }

    #[test]
    fn iid_probabilities() {
        let d = ErrorVectorDistribution::iid(4, 0.0).unwrap();
        assert_eq!(d.probability(BitString::zeros(4).unwrap()).unwrap(), 1.0);
        assert_eq!(d.probability(BitString::parse("0100").unwrap()).unwrap(), 0.0);

        let d = ErrorVectorDistribution::<f64>::log_over_n(4).unwrap();
        let expected = (1.0 - 4f64.ln() / 4.0).powi(4);
        let got = error_probability(&d, BitString::zeros(4).unwrap()).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(d.probability(BitString::zeros(3).unwrap()).is_err());

        // (1 - ln n / n)^n approaches 1/n.
        let n = 1_000_000usize;
        let lambda = (n as f64).ln() / n as f64;
        let p0 = (1.0 - lambda).powf(n as f64);
        assert!((p0 * n as f64 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn uniform_explicit_table() {
        let d = ErrorVectorDistribution::<f64>::uniform(3).unwrap();
        for e in 0..8 {
            let p = d.probability(BitString::new(3, e).unwrap()).unwrap();
            assert!((p - 0.125).abs() < 1e-15);
        }
        assert!(ErrorVectorDistribution::explicit(vec![0.5, 0.6]).is_err());
        assert!(ErrorVectorDistribution::explicit(vec![1.5, -0.5]).is_err());
        assert!(ErrorVectorDistribution::explicit(vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn iid_tables_sum_to_one() {
        for n in 1..=12 {
            for lambda in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
                let d = ErrorVectorDistribution::iid(n, lambda).unwrap();
                let total: f64 = d.probabilities().iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} λ={lambda}: {total}");
            }
        }
    }

    #[test]
    fn sampling_noiseless_is_zero() {
        let d = ErrorVectorDistribution::<f64>::noiseless(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            assert_eq!(sample_error_vector(&d, &mut rng).index(), 0);
        }
    }

    #[test]
    fn sampling_half_noise_has_fair_bits() {
        let d = ErrorVectorDistribution::iid(8, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 100_000;
        let mut ones = [0usize; 8];
        for _ in 0..draws {
            let e = d.sample(&mut rng);
            for (i, count) in ones.iter_mut().enumerate() {
                *count += usize::from(e.bit(i));
            }
        }
        let sigma = (0.25 / draws as f64).sqrt();
        for count in ones {
            assert!((count as f64 / draws as f64 - 0.5).abs() <= 4.0 * sigma);
        }
    }

    #[test]
    fn sampled_weights_follow_binomial() {
        let d = ErrorVectorDistribution::iid(8, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let draws = 100_000;
        let mut hist = [0usize; 9];
        for _ in 0..draws {
            hist[d.sample(&mut rng).hamming_weight()] += 1;
        }
        for (k, &count) in hist.iter().enumerate() {
            let p = binomial_pmf(8, k as u64, 0.2);
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt().max(1.0);
            assert!(
                (count as f64 - draws as f64 * p).abs() <= 4.0 * sigma,
                "k={k}: {count} vs {}",
                draws as f64 * p
            );
        }
    }

    #[test]
    fn explicit_sampling_matches_table() {
        let table: Vec<f64> = vec![0.1, 0.2, 0.3, 0.4];
        let d = ErrorVectorDistribution::explicit(table.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let draws = 100_000;
        let mut hist = [0usize; 4];
        for _ in 0..draws {
            hist[d.sample(&mut rng).index()] += 1;
        }
        for (p, count) in table.iter().zip(hist) {
            let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
            assert!((count as f64 - draws as f64 * p).abs() <= 4.0 * sigma);
        }
    }

    #[test]
    fn shift_agrees_between_kinds() {
        let weights: Vec<f64> = vec![0.5, 0.1, 0.0, 0.4, 0.0, 0.0, 0.0, 0.0];
        let iid = ErrorVectorDistribution::iid(3, 0.3).unwrap();
        let explicit = ErrorVectorDistribution::explicit(iid.probabilities()).unwrap();
        let a = iid.shift(&weights).unwrap();
        let b = explicit.shift(&weights).unwrap();
        // Direct XOR convolution.
        let table = iid.probabilities();
        for y in 0..8 {
            let direct: f64 = (0..8).map(|s| weights[s] * table[s ^ y]).sum();
            assert!((a[y] - direct).abs() < 1e-14);
            assert!((b[y] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn distribution_json_round_trip() {
        let d = ErrorVectorDistribution::iid(5, 0.25).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"kind":"iid","n":5,"lambda":0.25}"#);
        let back: ErrorVectorDistribution<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.flip_probability(), Some(0.25));

        let d = ErrorVectorDistribution::explicit(vec![0.25; 4]).unwrap();
        let back: ErrorVectorDistribution<f64> =
            serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back.probabilities(), vec![0.25; 4]);
        assert!(serde_json::from_str::<ErrorVectorDistribution<f64>>(
            r#"{"kind":"explicit","n":3,"probabilities":[0.5,0.5]}"#
        )
        .is_err());
    }
}
