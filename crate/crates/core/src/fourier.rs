//! Boolean functions over `{0,1}^n` with `±1` values, their Walsh–Hadamard spectra and the
//! Forrelation between two functions.
//!
//! Truth tables are dense: entry `x` holds `f(x)` where bit `i` of `x` is the input bit
//! `x_{i+1}`. A `{0,1}`-valued function maps to this form through `0 ↦ +1`, `1 ↦ −1`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitString, MAX_BITS};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// In-place unnormalized Walsh–Hadamard transform.
///
/// Applying it twice multiplies the input by `N = values.len()`.
pub fn fwht_in_place<T: Scalar>(values: &mut [T]) -> Result<()> {
    let len = values.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(invalid(format!(
            "transform length {len} is not a power of two"
        )));
    }
    let mut half = 1;
    while half < len {
        for block in values.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Unnormalized Walsh–Hadamard transform of `values`.
pub fn fwht<T: Scalar>(values: &[T]) -> Result<Vec<T>> {
    let mut out = values.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// In-place transform by the orthonormal Hadamard matrix (entries `±1/√N`). Self-inverse.
pub fn fwht_orthonormal_in_place<T: Scalar>(values: &mut [T]) -> Result<()> {
    fwht_in_place(values)?;
    let scale = T::one() / T::of(values.len() as f64).sqrt();
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(())
}

/// A Boolean function `f: {0,1}^n → {±1}` stored as its truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct BooleanFunction {
    n: usize,
    values: Vec<i8>,
}

impl BooleanFunction {
    /// Builds a function from a `±1` truth table whose length is a power of two.
    pub fn from_values(values: Vec<i8>) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!(
                "truth table length {len} is not 2^n with n >= 1"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_BITS {
            return Err(invalid(format!("n = {n} exceeds the cap of {MAX_BITS}")));
        }
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(invalid(format!(
                "truth table entry {pos} is {}, expected +1 or -1",
                values[pos]
            )));
        }
        Ok(Self { n, values })
    }

    /// Builds a function from `{0,1}` outputs using `0 ↦ +1`, `1 ↦ −1`.
    pub fn from_bits(outputs: &[bool]) -> Result<Self> {
        Self::from_values(outputs.iter().map(|&b| if b { -1 } else { 1 }).collect())
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> i8) -> Result<Self> {
        check_arity(n)?;
        Self::from_values((0..1usize << n).map(f).collect())
    }

    /// The constant function with value `sign` (`+1` or `−1`).
    pub fn constant(n: usize, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(invalid(format!("constant sign {sign} is not ±1")));
        }
        Self::from_fn(n, |_| sign)
    }

    /// The character `x ↦ (−1)^{s·x}`.
    pub fn parity(s: BitString) -> Self {
        let n = s.len();
        let values = (0..1usize << n)
            .map(|x| if crate::bits::dot_parity(s.index(), x) { -1 } else { 1 })
            .collect();
        Self { n, values }
    }

    /// A balanced function drawn uniformly by shuffling a half `+1`, half `−1` table.
    pub fn random_balanced<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_arity(n)?;
        let len = 1usize << n;
        let mut values: Vec<i8> = (0..len).map(|i| if i < len / 2 { 1 } else { -1 }).collect();
        values.shuffle(rng);
        Ok(Self { n, values })
    }

    /// A function with independent uniform `±1` entries.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_arity(n)?;
        let values = (0..1usize << n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        Ok(Self { n, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    #[inline]
    pub fn value(&self, x: usize) -> i8 {
        self.values[x]
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    pub fn is_balanced(&self) -> bool {
        self.values.iter().map(|&v| i64::from(v)).sum::<i64>() == 0
    }

    /// `x ↦ −f(x)`.
    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|&v| -v).collect(),
        }
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.values.iter().map(|&v| T::of(f64::from(v))).collect()
    }

    /// Packs one sign bit per entry (`1` for `−1`), entry 0 in the least significant bit of
    /// byte 0.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.values.len().div_ceil(8)];
        for (i, &v) in self.values.iter().enumerate() {
            if v < 0 {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    pub fn from_packed_bytes(n: usize, bytes: &[u8]) -> Result<Self> {
        check_arity(n)?;
        let len = 1usize << n;
        if bytes.len() != len.div_ceil(8) {
            return Err(invalid(format!(
                "packed table for n = {n} needs {} bytes, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        if len < 8 && bytes[0] >> len != 0 {
            return Err(invalid("padding bits of packed truth table are not zero"));
        }
        let values = (0..len)
            .map(|i| if (bytes[i / 8] >> (i % 8)) & 1 == 1 { -1 } else { 1 })
            .collect();
        Ok(Self { n, values })
    }
}

impl TryFrom<Vec<i8>> for BooleanFunction {
    type Error = crate::Error;

    fn try_from(values: Vec<i8>) -> Result<Self> {
        Self::from_values(values)
    }
}

impl From<BooleanFunction> for Vec<i8> {
    fn from(f: BooleanFunction) -> Self {
        f.values
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_BITS {
        return Err(invalid(format!("n = {n} outside 1..={MAX_BITS}")));
    }
    Ok(())
}

/// Normalization of a Fourier spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `f̂(s) = (1/N) Σ_x f(x)(−1)^{s·x}`; squared coefficients of a `±1` function sum to 1.
    Mean,
    /// `f̂(y) = (1/√N) Σ_x f(x)(−1)^{x·y}`; squared coefficients of a `±1` function sum to `N`.
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum<T> {
    n: usize,
    coefficients: Vec<T>,
    convention: Convention,
}

impl<T: Scalar> FourierSpectrum<T> {
    pub fn of(f: &BooleanFunction, convention: Convention) -> Self {
        let mut coefficients = f.to_scalars::<T>();
        fwht_in_place(&mut coefficients).expect("truth tables have power-of-two length");
        let len = T::of(f.len() as f64);
        let scale = match convention {
            Convention::Mean => T::one() / len,
            Convention::Sqrt => T::one() / len.sqrt(),
        };
        coefficients.iter_mut().for_each(|c| *c *= scale);
        Self {
            n: f.n(),
            coefficients,
            convention,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn coefficient(&self, s: BitString) -> T {
        self.coefficients[s.index()]
    }

    /// `Σ_s f̂(s)²`.
    pub fn squared_norm(&self) -> T {
        self.coefficients.iter().map(|&c| c * c).sum()
    }

    /// Squared coefficients; a probability vector under [`Convention::Mean`] for `±1` inputs.
    pub fn power(&self) -> Vec<T> {
        self.coefficients.iter().map(|&c| c * c).collect()
    }

    /// Per-bit spectral mass `s̄_i = Σ_{s: s_i = 1} f̂(s)²`. Requires the `Mean` convention.
    pub fn spectral_mass_per_bit(&self) -> Result<Vec<T>> {
        if self.convention != Convention::Mean {
            return Err(invalid(
                "spectral mass per bit is defined on the mean-normalized spectrum",
            ));
        }
        let mut mass = vec![T::zero(); self.n];
        for (s, &c) in self.coefficients.iter().enumerate() {
            let weight = c * c;
            let mut bits = s;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                mass[i] += weight;
                bits &= bits - 1;
            }
        }
        Ok(mass)
    }
}

pub fn fourier_spectrum<T: Scalar>(f: &BooleanFunction, convention: Convention) -> FourierSpectrum<T> {
    FourierSpectrum::of(f, convention)
}

pub fn spectral_mass_per_bit<T: Scalar>(spectrum: &FourierSpectrum<T>) -> Result<Vec<T>> {
    spectrum.spectral_mass_per_bit()
}

pub fn random_balanced_function<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BooleanFunction> {
    BooleanFunction::random_balanced(n, rng)
}

pub fn make_constant_function(n: usize, sign: i8) -> Result<BooleanFunction> {
    BooleanFunction::constant(n, sign)
}

/// Forrelation `Φ_{f,g}` together with the acceptance probability `(1 + Φ)/2` of the
/// one-query circuit that estimates it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forrelation<T> {
    pub value: T,
    pub acceptance_probability: T,
}

/// `Φ_{f,g} = 2^{−3n/2} Σ_{x,y} f(x)(−1)^{x·y} g(y)`.
pub fn forrelation_value<T: Scalar>(f: &BooleanFunction, g: &BooleanFunction) -> Result<Forrelation<T>> {
    if f.n() != g.n() {
        return Err(invalid(format!(
            "forrelation needs equal arity, got {} and {}",
            f.n(),
            g.n()
        )));
    }
    let transformed = fwht(&f.to_scalars::<T>())?;
    let inner: T = transformed
        .iter()
        .zip(g.values())
        .map(|(&t, &gy)| t * T::of(f64::from(gy)))
        .sum();
    let len = T::of(f.len() as f64);
    let value = inner / (len * len.sqrt());
    Ok(Forrelation {
        value,
        acceptance_probability: (T::one() + value) / T::of(2.0),
    })
}
