use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest bit-string length supported. Truth tables of this width already hold 2^24 entries.
pub const MAX_BITS: usize = 24;

/// An `n`-bit string `x_1 x_2 ... x_n`, packed so that `x_{i+1}` is bit `i` of [`BitString::index`].
///
/// Displayed with `x_1` first, so the string `"100"` is index 1 for `n = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    n: usize,
    index: usize,
}

impl BitString {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(invalid(format!("bit-string length {n} outside 1..={MAX_BITS}")));
        }
        if index >> n != 0 {
            return Err(invalid(format!("index {index} does not fit in {n} bits")));
        }
        Ok(Self { n, index })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let index = bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
        Self::new(bits.len(), index)
    }

    /// Parses a string of `0`/`1` characters written `x_1 ... x_n`.
    pub fn parse(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    /// Bit `x_{i+1}` (zero-based `i`).
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.index >> i) & 1 == 1
    }

    pub fn hamming_weight(&self) -> usize {
        self.index.count_ones() as usize
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.bit(i)).collect()
    }

    pub fn checked_xor(self, other: Self) -> Result<Self> {
        if self.n != other.n {
            return Err(invalid(format!(
                "cannot xor bit strings of lengths {} and {}",
                self.n, other.n
            )));
        }
        Ok(Self {
            n: self.n,
            index: self.index ^ other.index,
        })
    }
}

impl BitXor for BitString {
    type Output = BitString;

    /// Panics on mismatched lengths; use [`BitString::checked_xor`] for fallible input.
    fn bitxor(self, rhs: Self) -> Self::Output {
        self.checked_xor(rhs).expect("xor of bit strings with different lengths")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parity of `a · b` over GF(2).
#[inline]
pub fn dot_parity(a: usize, b: usize) -> bool {
    (a & b).count_ones() & 1 == 1
}
