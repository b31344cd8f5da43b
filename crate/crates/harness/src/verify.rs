//! Verification suites: each check reports a measured value against a pinned tolerance.

use nalgebra::DMatrix;
use nqa_core::gauss::{
    isserlis_moment, nogo_frobenius_check, random_psd_matrix, sample_squared_forrelation,
    truncation_events, truncation_tail_bound, CovarianceSpec, Label,
};
use nqa_core::noise::NoiseParams;
use nqa_core::sim::{output_distribution_noisy_dj, simulate_reference, total_variation, NoisyCircuit};
use nqa_core::{derive_rng, FunctionClass};
use rayon::prelude::*;

use crate::error::Result;
use crate::parallel::{map_chunks, run_on_pool, RunOptions};
use crate::record::{CheckRow, ExperimentRecord, Rows};
use crate::spec::{Suite, VerifySpec};

pub const TV_TOLERANCE: f64 = 1e-9;
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const MOMENT_Z_TOLERANCE: f64 = 4.0;
pub const NOGO_RELATIVE_TOLERANCE: f64 = 1e-8;

pub fn run_verify(spec: &VerifySpec, options: &RunOptions) -> Result<ExperimentRecord> {
    spec.validate()?;
    let (rows, seconds) = run_on_pool(options, || -> Result<Vec<CheckRow>> {
        let mut rows = Vec::new();
        let all = spec.suite == Suite::All;
        if all || spec.suite == Suite::Identities {
            rows.extend(identities());
        }
        if all || spec.suite == Suite::SimEquivalence {
            rows.extend(sim_equivalence(spec.seed)?);
        }
        if all || spec.suite == Suite::GaussianMoments {
            rows.extend(gaussian_moments(spec)?);
        }
        if all || spec.suite == Suite::Nogo {
            rows.extend(nogo(spec.seed)?);
        }
        Ok(rows)
    })?;
    let mut record = ExperimentRecord::new("verify", spec.seed, spec, Rows::Verify(rows?))?;
    record.wall_clock_seconds = seconds;
    record.threads = options.threads.unwrap_or_else(rayon::current_num_threads);
    Ok(record)
}

fn check(suite: Suite, name: impl Into<String>, measured: f64, tolerance: f64, detail: String) -> CheckRow {
    CheckRow {
        suite: suite.name().to_string(),
        check: name.into(),
        measured,
        tolerance,
        passed: measured <= tolerance,
        detail,
    }
}

/// Closed forms of the noise algebra on a 1000-point `λ` grid and an 11-point `s̄` grid.
pub fn identities() -> Vec<CheckRow> {
    let mut p1_err = 0.0f64;
    let mut survival_err = 0.0f64;
    let mut composition_err = 0.0f64;
    for k in 0..1000 {
        let lambda = k as f64 / 999.0;
        let params = NoiseParams::<f64>::new(lambda).expect("grid lies in [0, 1]");
        let p1 = params.p1();
        p1_err = p1_err.max((p1 - (1.0 - lambda + lambda * lambda / 2.0)).abs());
        survival_err = survival_err.max((2.0 * p1 - 1.0 - (1.0 - lambda).powi(2)).abs());
        // Flip with probability 1 − p1, then replace by a fair coin with probability u.
        let u = 1.0 - (1.0 - lambda).powi(2);
        for j in 0..=10 {
            let s = j as f64 / 10.0;
            let before = (1.0 - p1) * (1.0 - s) + p1 * s;
            let composed = (1.0 - u) * before + u / 2.0;
            composition_err = composition_err.max((composed - params.expected_bit_value(s)).abs());
        }
    }
    let grid = "1000 lambda points x 11 spectral masses".to_string();
    vec![
        check(Suite::Identities, "p1 = 1 - l + l^2/2", p1_err, IDENTITY_TOLERANCE, grid.clone()),
        check(Suite::Identities, "2 p1 - 1 = (1 - l)^2", survival_err, IDENTITY_TOLERANCE, grid.clone()),
        check(
            Suite::Identities,
            "y = (1 - l)^4 s + g(l) by composition",
            composition_err,
            IDENTITY_TOLERANCE,
            grid,
        ),
    ]
}

/// Analytic model against the density-matrix simulator, `n ∈ {2, 3, 4}`,
/// `λ ∈ {0, 0.1, 0.3, 0.7}`, five random functions per class.
pub fn sim_equivalence(seed: u64) -> Result<Vec<CheckRow>> {
    let lambdas = [0.0, 0.1, 0.3, 0.7];
    let cells: Vec<(usize, f64)> = (2..=4)
        .flat_map(|n| lambdas.iter().map(move |&l| (n, l)))
        .collect();
    cells
        .par_iter()
        .enumerate()
        .map(|(cell, &(n, lambda))| {
            let params = NoiseParams::<f64>::new(lambda)?;
            let mut rng = derive_rng(seed, cell as u64, 0);
            let mut worst = 0.0f64;
            for class in [FunctionClass::Constant, FunctionClass::Balanced] {
                for _ in 0..5 {
                    let f = class.sample(n, &mut rng)?;
                    let analytic = output_distribution_noisy_dj(&f, &params)?;
                    let reference = simulate_reference(&NoisyCircuit::deutsch_jozsa(&f), lambda)?;
                    worst = worst.max(total_variation(&analytic, &reference));
                }
            }
            Ok(check(
                Suite::SimEquivalence,
                format!("tv n={n} lambda={lambda}"),
                worst,
                TV_TOLERANCE,
                "max over 5 constant and 5 balanced functions".to_string(),
            ))
        })
        .collect()
}

/// All multisets of `0..dim` with sizes `1..=max_order`, in depth-first order: each entry
/// extends the one it was grown from.
pub fn multisets(dim: usize, max_order: usize) -> Vec<Vec<usize>> {
    fn grow(dim: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let start = prefix.last().copied().unwrap_or(0);
        for i in start..dim {
            prefix.push(i);
            out.push(prefix.clone());
            if prefix.len() < max {
                grow(dim, max, prefix, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(dim, max_order, &mut Vec::new(), &mut out);
    out
}

/// Products `∏ x_i` over [`multisets`] for one draw, in the same order.
fn monomials(x: &[f64], max_order: usize, out: &mut Vec<f64>) {
    fn grow(x: &[f64], max: usize, start: usize, depth: usize, acc: f64, out: &mut Vec<f64>) {
        for i in start..x.len() {
            let p = acc * x[i];
            out.push(p);
            if depth + 1 < max {
                grow(x, max, i, depth + 1, p, out);
            }
        }
    }
    out.clear();
    grow(x, max_order, 0, 0, 1.0, out);
}

pub const MOMENT_ORDER: usize = 6;
pub const MOMENT_MATRICES: usize = 20;

/// Monte Carlo moments against the pairing formula, plus the truncation tail at the hardness
/// scale `ε = 1/160`, `n = 10`.
pub fn gaussian_moments(spec: &VerifySpec) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let mut fourth_err = 0.0f64;
    for k in 0..MOMENT_MATRICES {
        // Dimensions cycle through 2..=6.
        let dim = 2 + k % 5;
        let sigma = random_psd_matrix(dim, &mut derive_rng(spec.seed, k as u64, u64::MAX));
        for i in 0..dim {
            let fourth = isserlis_moment(&[i; 4], &sigma)?;
            fourth_err = fourth_err.max((fourth - 3.0 * sigma[(i, i)].powi(2)).abs());
        }
        rows.push(moment_check(spec, k, &sigma)?);
    }
    rows.push(check(
        Suite::GaussianMoments,
        "E[X_i^4] = 3 S_ii^2",
        fourth_err,
        IDENTITY_TOLERANCE,
        format!("{MOMENT_MATRICES} covariances"),
    ));
    rows.extend(truncation_tail(spec)?);
    Ok(rows)
}

fn moment_check(spec: &VerifySpec, k: usize, sigma: &DMatrix<f64>) -> Result<CheckRow> {
    let dim = sigma.nrows();
    let sets = multisets(dim, MOMENT_ORDER);
    let exact: Vec<f64> = sets
        .iter()
        .map(|s| isserlis_moment(s, sigma))
        .collect::<nqa_core::Result<_>>()?;
    let factor = CovarianceSpec::general(if dim.is_power_of_two() {
        sigma.clone()
    } else {
        padded(sigma)
    })?;
    let chunks = map_chunks(spec.moment_samples, |c, range| {
        let mut rng = derive_rng(spec.seed, k as u64, c as u64);
        let mut sum = vec![0.0; sets.len()];
        let mut sum_sq = vec![0.0; sets.len()];
        let mut buf = Vec::with_capacity(sets.len());
        for _ in range {
            let x = factor.sample(&mut rng);
            monomials(&x[..dim], MOMENT_ORDER, &mut buf);
            for ((s, q), v) in sum.iter_mut().zip(&mut sum_sq).zip(&buf) {
                *s += v;
                *q += v * v;
            }
        }
        (sum, sum_sq)
    });
    let mut sum = vec![0.0; sets.len()];
    let mut sum_sq = vec![0.0; sets.len()];
    for (s, q) in chunks {
        sum.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        sum_sq.iter_mut().zip(&q).for_each(|(a, b)| *a += b);
    }
    let m = spec.moment_samples as f64;
    let mut worst = (0.0f64, 0usize);
    let mut exceed = 0;
    for (idx, ((s, q), e)) in sum.iter().zip(&sum_sq).zip(&exact).enumerate() {
        let mean = s / m;
        let var = ((q - m * mean * mean) / (m - 1.0)).max(0.0);
        let z = (mean - e).abs() / (var / m).sqrt().max(f64::MIN_POSITIVE);
        if z > MOMENT_Z_TOLERANCE {
            exceed += 1;
        }
        if z > worst.0 {
            worst = (z, idx);
        }
    }
    Ok(check(
        Suite::GaussianMoments,
        format!("isserlis vs monte carlo #{k} (N={dim})"),
        worst.0,
        MOMENT_Z_TOLERANCE,
        format!(
            "max |z| over {} moments of order <= {MOMENT_ORDER} at {} draws; worst {:?}; {exceed} above tolerance",
            sets.len(),
            spec.moment_samples,
            sets[worst.1]
        ),
    ))
}

/// Embeds `Σ` in the top-left block of a power-of-two sized matrix with unit variance
/// elsewhere; the first `dim` coordinates keep covariance `Σ`.
fn padded(sigma: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = sigma.nrows();
    let size = dim.next_power_of_two();
    DMatrix::from_fn(size, size, |i, j| {
        if i < dim && j < dim {
            sigma[(i, j)]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    })
}

pub const TRUNCATION_BITS: usize = 10;
pub const TRUNCATION_EPSILON: f64 = 1.0 / 160.0;

fn truncation_tail(spec: &VerifySpec) -> Result<Vec<CheckRow>> {
    let sigma = CovarianceSpec::scaled_identity(TRUNCATION_BITS, TRUNCATION_EPSILON)?;
    let block = MOMENT_MATRICES as u64;
    let events: usize = map_chunks(spec.truncation_draws, |c, range| {
        let mut rng = derive_rng(spec.seed, block, c as u64);
        range
            .map(|_| {
                let s = sample_squared_forrelation(&sigma, Label::Yes, &mut rng);
                truncation_events(&s.x) + truncation_events(&s.y_prime)
            })
            .sum::<usize>()
    })
    .into_iter()
    .sum();
    let bound = truncation_tail_bound(1 << TRUNCATION_BITS, TRUNCATION_EPSILON);
    Ok(vec![
        check(
            Suite::GaussianMoments,
            "truncation events",
            events as f64,
            0.0,
            format!("{} yes draws, n = {TRUNCATION_BITS}, eps = 1/160", spec.truncation_draws),
        ),
        check(
            Suite::GaussianMoments,
            "truncation tail bound",
            bound,
            1e-30,
            "2N exp(-1/(2 eps))".to_string(),
        ),
    ])
}

pub const NOGO_MATRICES: usize = 50;

/// `Σ c² = Σ λ²` and `Σ c² ≤ N λ_max²` on fixed examples and random PSD matrices up to 64×64.
pub fn nogo(seed: u64) -> Result<Vec<CheckRow>> {
    let block = MOMENT_MATRICES as u64 + 1;
    let reports = (0..NOGO_MATRICES)
        .into_par_iter()
        .map(|k| {
            let dim = 1 + 63 * k / (NOGO_MATRICES - 1);
            let m = random_psd_matrix(dim, &mut derive_rng(seed, block, k as u64));
            nogo_frobenius_check(&m)
        })
        .collect::<nqa_core::Result<Vec<_>>>()?;
    let worst = reports.iter().map(|r| r.relative_gap).fold(0.0, f64::max);
    let violations = reports.iter().filter(|r| !r.bound_holds).count();
    let identity = nogo_frobenius_check(&DMatrix::identity(8, 8))?;
    let ones = nogo_frobenius_check(&DMatrix::from_element(8, 8, 1.0))?;
    Ok(vec![
        check(
            Suite::Nogo,
            "frobenius = eigenvalue squares",
            worst,
            NOGO_RELATIVE_TOLERANCE,
            format!("max relative gap over {NOGO_MATRICES} random PSD matrices, N = 1..=64"),
        ),
        check(
            Suite::Nogo,
            "frobenius <= N lambda_max^2",
            violations as f64,
            0.0,
            format!("violations over {NOGO_MATRICES} random PSD matrices"),
        ),
        check(
            Suite::Nogo,
            "identity N=8",
            (identity.frobenius_sq - 8.0).abs() + (identity.eigen_sq_sum - 8.0).abs()
                + (identity.lambda_max - 1.0).abs(),
            1e-10,
            "sums 8, lambda_max 1".to_string(),
        ),
        check(
            Suite::Nogo,
            "all-ones N=8",
            (ones.frobenius_sq - 64.0).abs() + (ones.eigen_sq_sum - 64.0).abs()
                + (ones.lambda_max - 8.0).abs(),
            1e-10,
            "sums 64, eigenvalues {8, 0 x7}".to_string(),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_counts() {
        // C(N + k - 1, k) summed over k = 1..=6.
        assert_eq!(multisets(2, 6).len(), 27);
        assert_eq!(multisets(6, 6).len(), 923);
        let mut buf = Vec::new();
        monomials(&[2.0, 3.0], 6, &mut buf);
        for (set, v) in multisets(2, 6).iter().zip(&buf) {
            let expected: f64 = set.iter().map(|&i| [2.0, 3.0][i]).product();
            assert_eq!(*v, expected);
        }
    }

    #[test]
    fn identities_pass() {
        assert!(identities().iter().all(|r| r.passed));
    }

    #[test]
    fn padding_keeps_block() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.1, 0.0, 0.1, 1.0]);
        let p = padded(&m);
        assert_eq!(p.nrows(), 4);
        assert_eq!(p.view((0, 0), (3, 3)), m.view((0, 0), (3, 3)));
        assert_eq!(p[(3, 3)], 1.0);
    }
}
