use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::covariance::{CovarianceDescriptor, CovarianceSpec};
use crate::error::{invalid, Result};
use crate::fourier::{fwht_orthonormal_in_place, BooleanFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Yes, Label::No];
}

/// One draw `(X, Y)` with the centered squares `Y'_i = Y_i² − Σ̃_ii`.
///
/// Raz–Tal samples carry `Y` itself in `y_prime`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSample {
    pub label: Label,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
}

fn hadamard(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    fwht_orthonormal_in_place(&mut y).expect("covariance dimension is a power of two");
    y
}

/// Yes: `X ∼ 𝒩(0, Σ)`, `Y = HX`. No: `X` as before and `Y = HX''` for an independent
/// `X'' ∼ 𝒩(0, Σ)`, so `Y ∼ 𝒩(0, Σ̃)` independently of `X`.
pub fn sample_squared_forrelation<R: Rng + ?Sized>(
    spec: &CovarianceSpec,
    label: Label,
    rng: &mut R,
) -> GaussianSample {
    let x = spec.sample(rng);
    let y = match label {
        Label::Yes => hadamard(&x),
        Label::No => hadamard(&spec.sample(rng)),
    };
    let y_prime = y
        .iter()
        .enumerate()
        .map(|(i, v)| v * v - spec.conjugate_entry(i, i))
        .collect();
    GaussianSample {
        label,
        x,
        y,
        y_prime,
    }
}

/// Isotropic pair over `N = 2^n` coordinates: Yes gives `(X, HX)`, No gives independent draws.
pub fn sample_raz_tal<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    label: Label,
    rng: &mut R,
) -> Result<GaussianSample> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let spec = CovarianceSpec::scaled_identity(n, epsilon)?;
    let x = spec.sample(rng);
    let y = match label {
        Label::Yes => hadamard(&x),
        Label::No => spec.sample(rng),
    };
    Ok(GaussianSample {
        label,
        x,
        y_prime: y.clone(),
        y,
    })
}

/// Componentwise clamp into `[−1, 1]`.
pub fn truncate(z: &[f64]) -> Vec<f64> {
    z.iter().map(|v| v.clamp(-1.0, 1.0)).collect()
}

/// Number of entries outside `[−1, 1]`.
pub fn truncation_events(z: &[f64]) -> usize {
    z.iter().filter(|v| v.abs() > 1.0).count()
}

/// Union bound `2N e^{−1/(2ε)}` on the probability that any of `N` coordinates of
/// variance `ε` leaves `[−1, 1]`.
pub fn truncation_tail_bound(dimension: usize, epsilon: f64) -> f64 {
    2.0 * dimension as f64 * (-1.0 / (2.0 * epsilon)).exp()
}

/// Rounds each `z_i ∈ [−1, 1]` to `+1` with probability `(1 + z_i)/2`, else `−1`.
pub fn round_to_boolean<R: Rng + ?Sized>(z: &[f64], rng: &mut R) -> Result<Vec<i8>> {
    if let Some((i, v)) = z
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.abs() <= 1.0))
    {
        return Err(invalid(format!(
            "entry {i} is {v}; truncate before rounding"
        )));
    }
    Ok(z.iter()
        .map(|&v| if rng.random::<f64>() < (1.0 + v) / 2.0 { 1 } else { -1 })
        .collect())
}

/// A pair of Boolean functions obtained from a Gaussian sample: `f` from `X`, `g` from `Y'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundedInstance {
    pub f: BooleanFunction,
    pub g: BooleanFunction,
    pub label: Label,
}

impl RoundedInstance {
    pub fn from_sample<R: Rng + ?Sized>(sample: &GaussianSample, rng: &mut R) -> Result<Self> {
        let f = BooleanFunction::from_values(round_to_boolean(&truncate(&sample.x), rng)?)?;
        let g = BooleanFunction::from_values(round_to_boolean(&truncate(&sample.y_prime), rng)?)?;
        Ok(Self {
            f,
            g,
            label: sample.label,
        })
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }
}

/// Draws a squared-Forrelation sample and rounds it.
pub fn sample_rounded_instance<R: Rng + ?Sized>(
    spec: &CovarianceSpec,
    label: Label,
    rng: &mut R,
) -> Result<RoundedInstance> {
    let sample = sample_squared_forrelation(spec, label, rng);
    RoundedInstance::from_sample(&sample, rng)
}

/// Metadata written ahead of the vectors in the binary sample format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub n: usize,
    pub label: Label,
    pub covariance: CovarianceDescriptor,
    pub seed: Option<u64>,
}

const MAGIC: &[u8; 4] = b"NQAG";

impl GaussianSample {
    /// Writes `MAGIC`, a little-endian `u32` header length, the JSON header, then `X`, `Y`
    /// and `Y'` as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, header: &SampleHeader, mut out: W) -> std::io::Result<()> {
        let json = serde_json::to_vec(header).map_err(std::io::Error::other)?;
        out.write_all(MAGIC)?;
        out.write_all(&(json.len() as u32).to_le_bytes())?;
        out.write_all(&json)?;
        for v in self.x.iter().chain(&self.y).chain(&self.y_prime) {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<(SampleHeader, Self)> {
        let io = |e: std::io::Error| invalid(format!("malformed sample: {e}"));
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(invalid("not a Gaussian sample file"));
        }
        let mut len = [0u8; 4];
        input.read_exact(&mut len).map_err(io)?;
        let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
        input.read_exact(&mut json).map_err(io)?;
        let header: SampleHeader = serde_json::from_slice(&json)
            .map_err(|e| invalid(format!("malformed sample header: {e}")))?;
        if header.n > crate::bits::MAX_BITS {
            return Err(invalid(format!("n = {} is too large", header.n)));
        }
        let dim = 1usize << header.n;
        let mut read_vec = || -> Result<Vec<f64>> {
            let mut buf = vec![0u8; 8 * dim];
            input.read_exact(&mut buf).map_err(io)?;
            Ok(buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect())
        };
        let x = read_vec()?;
        let y = read_vec()?;
        let y_prime = read_vec()?;
        Ok((
            header.clone(),
            Self {
                label: header.label,
                x,
                y,
                y_prime,
            },
        ))
    }
}
