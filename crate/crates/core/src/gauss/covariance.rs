use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::MAX_BITS;
use crate::error::{invalid, Result};
use crate::fourier::{fwht, fwht_orthonormal_in_place};
use crate::scalar::Scalar;

/// Symmetry tolerance for user-supplied matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues down to this value are accepted and clipped to zero.
pub const PSD_TOLERANCE: f64 = -1e-9;

/// Serializable description of a covariance matrix over `N = 2^n` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceDescriptor {
    ScaledIdentity { n: usize, epsilon: f64 },
    Diagonal { values: Vec<f64> },
    General { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone)]
enum Kind {
    ScaledIdentity(f64),
    Diagonal {
        values: Vec<f64>,
        // Σ̃_{ij} = row[i ⊕ j]
        conjugate_row: Vec<f64>,
    },
    General {
        matrix: DMatrix<f64>,
        factor: DMatrix<f64>,
        conjugate: DMatrix<f64>,
    },
}

/// A validated covariance matrix `Σ` together with its Hadamard conjugate `Σ̃ = HΣH`.
#[derive(Debug, Clone)]
pub struct CovarianceSpec {
    n: usize,
    kind: Kind,
}

fn log2_dimension(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(invalid(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_BITS {
        return Err(invalid(format!("n = {n} exceeds the limit of {MAX_BITS}")));
    }
    Ok(n)
}

impl CovarianceSpec {
    /// `Σ = εI` over `2^n` coordinates.
    pub fn scaled_identity(n: usize, epsilon: f64) -> Result<Self> {
        if n > MAX_BITS {
            return Err(invalid(format!("n = {n} exceeds the limit of {MAX_BITS}")));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(invalid(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        Ok(Self {
            n,
            kind: Kind::ScaledIdentity(epsilon),
        })
    }

    /// `Σ = I/(c₁ n)`.
    pub fn hardness_scale(n: usize, c1: f64) -> Result<Self> {
        if n == 0 || !(c1 > 0.0) {
            return Err(invalid(format!("need n >= 1 and c1 > 0, got n = {n}, c1 = {c1}")));
        }
        Self::scaled_identity(n, 1.0 / (c1 * n as f64))
    }

    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        let n = log2_dimension(values.len())?;
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < PSD_TOLERANCE)
        {
            return Err(invalid(format!("diagonal entry {i} is {v}")));
        }
        let len = values.len() as f64;
        let conjugate_row = fwht(&values)?.into_iter().map(|v| v / len).collect();
        Ok(Self {
            n,
            kind: Kind::Diagonal {
                values,
                conjugate_row,
            },
        })
    }

    pub fn general(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid("covariance matrix is not square"));
        }
        let n = log2_dimension(matrix.nrows())?;
        check_symmetric(&matrix)?;
        let eigen = SymmetricEigen::new(matrix.clone());
        let min = eigen.eigenvalues.min();
        if min < PSD_TOLERANCE {
            return Err(invalid(format!(
                "covariance matrix is not positive semidefinite (eigenvalue {min})"
            )));
        }
        let roots = eigen.eigenvalues.map(|l| l.max(0.0).sqrt());
        let v = &eigen.eigenvectors;
        let factor = v * DMatrix::from_diagonal(&roots) * v.transpose();
        let conjugate = hadamard_conjugate_dense(&matrix)?;
        Ok(Self {
            n,
            kind: Kind::General {
                matrix,
                factor,
                conjugate,
            },
        })
    }

    pub fn from_descriptor(descriptor: &CovarianceDescriptor) -> Result<Self> {
        match descriptor {
            CovarianceDescriptor::ScaledIdentity { n, epsilon } => {
                Self::scaled_identity(*n, *epsilon)
            }
            CovarianceDescriptor::Diagonal { values } => Self::diagonal(values.clone()),
            CovarianceDescriptor::General { rows } => {
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(invalid("covariance rows have unequal lengths"));
                }
                Self::general(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
            }
        }
    }

    pub fn descriptor(&self) -> CovarianceDescriptor {
        match &self.kind {
            Kind::ScaledIdentity(epsilon) => CovarianceDescriptor::ScaledIdentity {
                n: self.n,
                epsilon: *epsilon,
            },
            Kind::Diagonal { values, .. } => CovarianceDescriptor::Diagonal {
                values: values.clone(),
            },
            Kind::General { matrix, .. } => CovarianceDescriptor::General {
                rows: matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N = 2^n`.
    pub fn dimension(&self) -> usize {
        1 << self.n
    }

    /// `ε` for a scaled identity.
    pub fn epsilon(&self) -> Option<f64> {
        match self.kind {
            Kind::ScaledIdentity(epsilon) => Some(epsilon),
            _ => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.kind {
            Kind::ScaledIdentity(epsilon) => {
                if i == j {
                    *epsilon
                } else {
                    0.0
                }
            }
            Kind::Diagonal { values, .. } => {
                if i == j {
                    values[i]
                } else {
                    0.0
                }
            }
            Kind::General { matrix, .. } => matrix[(i, j)],
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let dim = self.dimension();
        DMatrix::from_fn(dim, dim, |i, j| self.entry(i, j))
    }

    /// `Σ̃_{ij}` without materializing the conjugate for structured kinds.
    pub fn conjugate_entry(&self, i: usize, j: usize) -> f64 {
        match &self.kind {
            Kind::ScaledIdentity(epsilon) => {
                if i == j {
                    *epsilon
                } else {
                    0.0
                }
            }
            Kind::Diagonal { conjugate_row, .. } => conjugate_row[i ^ j],
            Kind::General { conjugate, .. } => conjugate[(i, j)],
        }
    }

    /// `Σ̃_{ii}`, the variance of `Y_i = (HX)_i`.
    pub fn conjugate_diagonal(&self) -> Vec<f64> {
        (0..self.dimension())
            .map(|i| self.conjugate_entry(i, i))
            .collect()
    }

    /// Draws `X ∼ 𝒩(0, Σ)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let dim = self.dimension();
        let z: Vec<f64> = (0..dim).map(|_| f64::standard_normal(rng)).collect();
        match &self.kind {
            Kind::ScaledIdentity(epsilon) => {
                let s = epsilon.sqrt();
                z.into_iter().map(|v| v * s).collect()
            }
            Kind::Diagonal { values, .. } => z
                .into_iter()
                .zip(values)
                .map(|(v, &d)| v * d.max(0.0).sqrt())
                .collect(),
            Kind::General { factor, .. } => {
                (factor * DVector::from_vec(z)).iter().copied().collect()
            }
        }
    }
}

fn check_symmetric(matrix: &DMatrix<f64>) -> Result<()> {
    let dim = matrix.nrows();
    for i in 0..dim {
        for j in 0..i {
            let gap = (matrix[(i, j)] - matrix[(j, i)]).abs();
            if !(gap <= SYMMETRY_TOLERANCE) {
                return Err(invalid(format!(
                    "matrix is not symmetric at ({i}, {j}): difference {gap}"
                )));
            }
        }
    }
    Ok(())
}

/// `HMH` for a dense matrix, by transforming every column and then every row.
fn hadamard_conjugate_dense(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut out = matrix.clone();
    for mut col in out.column_iter_mut() {
        let mut buf: Vec<f64> = col.iter().copied().collect();
        fwht_orthonormal_in_place(&mut buf)?;
        col.iter_mut().zip(buf).for_each(|(c, b)| *c = b);
    }
    for mut row in out.row_iter_mut() {
        let mut buf: Vec<f64> = row.iter().copied().collect();
        fwht_orthonormal_in_place(&mut buf)?;
        row.iter_mut().zip(buf).for_each(|(c, b)| *c = b);
    }
    Ok(out)
}

/// The conjugate `Σ̃ = HΣH` as a dense matrix.
pub fn hadamard_conjugate(spec: &CovarianceSpec) -> DMatrix<f64> {
    match &spec.kind {
        Kind::General { conjugate, .. } => conjugate.clone(),
        _ => {
            let dim = spec.dimension();
            DMatrix::from_fn(dim, dim, |i, j| spec.conjugate_entry(i, j))
        }
    }
}

/// `AAᵀ/N` for a standard Gaussian `N × N` matrix `A`: a random full-rank PSD matrix.
pub fn random_psd_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| f64::standard_normal(rng));
    let m = &a * a.transpose() / dim as f64;
    // Exact symmetry despite rounding in the product.
    (&m + m.transpose()) * 0.5
}
