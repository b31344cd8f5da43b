use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, resource, Result};

/// Largest moment order evaluated by pairing enumeration (105 pairings).
pub const MAX_ISSERLIS_ORDER: usize = 8;

/// `E[X_{i₁} ⋯ X_{i_k}]` for `X ∼ 𝒩(0, Σ)` as a sum over perfect pairings of covariances.
pub fn isserlis_moment(indices: &[usize], sigma: &DMatrix<f64>) -> Result<f64> {
    if indices.len() > MAX_ISSERLIS_ORDER {
        return Err(resource(format!(
            "moment of order {} exceeds the cap of {MAX_ISSERLIS_ORDER}",
            indices.len()
        )));
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= sigma.nrows() || i >= sigma.ncols()) {
        return Err(invalid(format!(
            "index {i} outside a {}x{} covariance",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    if indices.len() % 2 == 1 {
        return Ok(0.0);
    }
    Ok(pairing_sum(indices, sigma))
}

fn pairing_sum(indices: &[usize], sigma: &DMatrix<f64>) -> f64 {
    let Some((&first, rest)) = indices.split_first() else {
        return 1.0;
    };
    let mut total = 0.0;
    for k in 0..rest.len() {
        let mut remaining = rest.to_vec();
        let partner = remaining.remove(k);
        total += sigma[(first, partner)] * pairing_sum(&remaining, sigma);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NogoReport {
    /// `Σ_ij C_ij²`.
    pub frobenius_sq: f64,
    /// `Σ_k λ_k²`.
    pub eigen_sq_sum: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `|Σ c² − Σ λ²|` relative to `Σ c²`.
    pub relative_gap: f64,
    /// Whether `Σ c² ≤ N λ_max²`, up to rounding.
    pub bound_holds: bool,
}

/// Checks `Σ_ij C_ij² = Σ_k λ_k² ≤ N λ_max²` for a symmetric matrix.
pub fn nogo_frobenius_check(c: &DMatrix<f64>) -> Result<NogoReport> {
    if !c.is_square() {
        return Err(invalid("matrix is not square"));
    }
    let dim = c.nrows();
    for i in 0..dim {
        for j in 0..i {
            let gap = (c[(i, j)] - c[(j, i)]).abs();
            if !(gap <= super::covariance::SYMMETRY_TOLERANCE) {
                return Err(invalid(format!(
                    "matrix is not symmetric at ({i}, {j}): difference {gap}"
                )));
            }
        }
    }
    let frobenius_sq: f64 = c.iter().map(|v| v * v).sum();
    let eigen = SymmetricEigen::new(c.clone()).eigenvalues;
    let eigen_sq_sum: f64 = eigen.iter().map(|l| l * l).sum();
    let lambda_max = eigen.max();
    let lambda_min = eigen.min();
    let scale = frobenius_sq.max(f64::MIN_POSITIVE);
    let bound = dim as f64 * lambda_max * lambda_max;
    Ok(NogoReport {
        frobenius_sq,
        eigen_sq_sum,
        lambda_max,
        lambda_min,
        relative_gap: (frobenius_sq - eigen_sq_sum).abs() / scale,
        bound_holds: frobenius_sq <= bound * (1.0 + 1e-12),
    })
}
