//! Acceptance suite. Prints one PASS/FAIL line per check and exits nonzero if any fails.
//!
//! Every tolerance and sample size is pinned below. Seeds are fixed in advance.

use std::time::Instant;

use nqa_core::dj::{decide_dj, DjRunConfig};
use nqa_core::fourier::{BooleanFunction, Convention, FourierSpectrum};
use nqa_core::gauss::CovarianceSpec;
use nqa_core::{derive_rng, ErrorDistribution};
use nqa_harness::verify::{identities, nogo, sim_equivalence};
use nqa_harness::{
    run_dj_experiment, run_forrelation_experiment, run_verify, DjSpec, ForrelationRow,
    ForrelationSpec, NoiseModel, Rows, RunOptions, Suite, VerifySpec,
};

const SEED: u64 = 1;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { name, passed, detail }
}

fn options() -> RunOptions {
    RunOptions::default()
}

fn forrelation_rows(spec: &ForrelationSpec) -> Vec<ForrelationRow> {
    match run_forrelation_experiment(spec, &options()).expect("valid spec").rows {
        Rows::Forrelation(rows) => rows,
        _ => unreachable!(),
    }
}

fn find<'a>(rows: &'a [ForrelationRow], n: usize, noise: &str, measure: &str) -> &'a ForrelationRow {
    rows.iter()
        .find(|r| r.n == n && r.noise == noise && r.measure == measure)
        .unwrap_or_else(|| panic!("missing {measure} for n = {n}, noise {noise}"))
}

fn cross_simulator_equivalence() -> Outcome {
    const TOLERANCE: f64 = 1e-9;
    const LIMIT_SECONDS: f64 = 60.0;
    let start = Instant::now();
    let rows = sim_equivalence(SEED).expect("grid runs");
    let seconds = start.elapsed().as_secs_f64();
    let worst = rows.iter().map(|r| r.measured).fold(0.0, f64::max);
    outcome(
        "cross-simulator equivalence",
        worst <= TOLERANCE && seconds < LIMIT_SECONDS,
        format!("max TV {worst:.3e} over {} cells (tolerance {TOLERANCE:e}); {seconds:.2} s (limit {LIMIT_SECONDS} s)", rows.len()),
    )
}

fn noise_algebra_identities() -> Outcome {
    const TOLERANCE: f64 = 1e-12;
    const LIMIT_SECONDS: f64 = 1.0;
    let start = Instant::now();
    let rows = identities();
    let seconds = start.elapsed().as_secs_f64();
    let worst = rows.iter().map(|r| r.measured).fold(0.0, f64::max);
    outcome(
        "noise algebra identities",
        worst <= TOLERANCE && seconds < LIMIT_SECONDS,
        format!("max error {worst:.3e} over {} identities (tolerance {TOLERANCE:e}); {seconds:.3} s (limit {LIMIT_SECONDS} s)", rows.len()),
    )
}

fn dj_success_at_desk_scale() -> Outcome {
    const BOUND: f64 = 2.0 / 3.0;
    const LIMIT_SECONDS: f64 = 300.0;
    let spec = DjSpec {
        n: vec![8],
        lambda: vec![0.25],
        shots: vec![1065],
        trials: 200,
        confidence: 0.95,
        seed: SEED,
    };
    let record = run_dj_experiment(&spec, &options()).expect("valid spec");
    let Rows::Dj(rows) = &record.rows else { unreachable!() };
    let passed = rows.iter().all(|r| r.ci_low >= BOUND) && record.wall_clock_seconds < LIMIT_SECONDS;
    let per_class: Vec<String> = rows
        .iter()
        .map(|r| {
            let exact = r.exact.map(|p| format!(", exact {p:.4}")).unwrap_or_default();
            format!("{:?} {}/{} (95% lower bound {:.3}{exact})", r.class, r.successes, r.trials, r.ci_low)
        })
        .collect();
    outcome(
        "DJ success at n=8, lambda=0.25, M=1065",
        passed,
        format!("{}; bound {BOUND:.4}; {:.1} s", per_class.join("; "), record.wall_clock_seconds),
    )
}

fn per_bit_mean_formula() -> Outcome {
    const N: usize = 6;
    const LAMBDA: f64 = 0.2;
    const SHOTS: usize = 100_000;
    const FUNCTIONS: u64 = 10;
    const LIMIT_SECONDS: f64 = 120.0;
    let tolerance = 4.0 * ((2.0 * N as f64).ln() / (2.0 * SHOTS as f64)).sqrt();
    let start = Instant::now();
    let config = DjRunConfig::<f64>::with_shots(N, LAMBDA, SHOTS).expect("valid config");
    let mut worst = 0.0f64;
    for k in 0..FUNCTIONS {
        let mut rng = derive_rng(SEED, 1000, k);
        let f = BooleanFunction::random_balanced(N, &mut rng).expect("valid n");
        let sbar = FourierSpectrum::<f64>::of(&f, Convention::Mean)
            .spectral_mass_per_bit()
            .expect("mean convention");
        let out = decide_dj(&f, &config, &mut rng).expect("matching n");
        for (y, s) in out.bit_averages.iter().zip(&sbar) {
            worst = worst.max((y - config.params().expected_bit_value(*s)).abs());
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    outcome(
        "per-bit mean formula",
        worst <= tolerance && seconds < LIMIT_SECONDS,
        format!("max deviation {worst:.3e} (tolerance {tolerance:.3e}); {seconds:.2} s"),
    )
}

fn psi_gap() -> Outcome {
    const K: f64 = 4.0;
    const SAMPLES: usize = 1_000_000;
    const LIMIT_SECONDS: f64 = 300.0;
    // Zero and two nonzero error vectors.
    let shifts = vec![0, 1, 0b1011_0101];
    let spec = ForrelationSpec {
        n: vec![8],
        c1: vec![16.0],
        covariance: None,
        noise: vec![NoiseModel::None],
        instances: 0,
        queries: 1,
        faulty_p1: None,
        psi_samples: SAMPLES,
        psi_shifts: shifts,
        seed: SEED,
    };
    let start = Instant::now();
    let rows = forrelation_rows(&spec);
    let seconds = start.elapsed().as_secs_f64();
    let gaps: Vec<&ForrelationRow> = rows.iter().filter(|r| r.measure.starts_with("psi_gap")).collect();
    let within = gaps.iter().all(|r| {
        (r.estimate - r.expected.expect("closed form")).abs() <= K * r.standard_error
    });
    let detail: Vec<String> = gaps
        .iter()
        .map(|r| {
            format!(
                "{} {:.4e} +- {:.1e} vs {:.4e}",
                r.measure,
                r.estimate,
                r.standard_error,
                r.expected.unwrap()
            )
        })
        .collect();
    outcome(
        "psi gap at N=256, Sigma=I/128",
        within && seconds < LIMIT_SECONDS,
        format!("{} (within {K} SE); {seconds:.1} s", detail.join("; ")),
    )
}

fn completeness_corollary() -> Outcome {
    const C1: f64 = 16.0;
    const RELATIVE: f64 = 1e-12;
    const RATIO: f64 = 2.0;
    let mut worst = 0.0f64;
    let mut scaled = Vec::new();
    for n in 4..=10usize {
        let eps = 1.0 / (C1 * n as f64);
        // A diagonal spec forces the full enumeration over e.
        let sigma = CovarianceSpec::diagonal(vec![eps; 1 << n]).expect("valid");
        let dist = ErrorDistribution::log_over_n(n).expect("valid");
        let score = nqa_core::gauss::completeness_score(&sigma, &dist).expect("matching n");
        let lambda = (n as f64).ln() / n as f64;
        let closed = 2.0 * (1.0 - lambda).powi(n as i32) / (C1 * n as f64).powi(2);
        worst = worst.max((score - closed).abs() / closed);
        scaled.push(score * (n as f64).powi(3));
    }
    let max = scaled.iter().copied().fold(f64::MIN, f64::max);
    let min = scaled.iter().copied().fold(f64::MAX, f64::min);
    outcome(
        "completeness score for n=4..10",
        worst <= RELATIVE && max / min <= RATIO,
        format!(
            "max relative error {worst:.2e} (tolerance {RELATIVE:e}); score*n^3 in [{min:.4e}, {max:.4e}], ratio {:.3} (limit {RATIO})",
            max / min
        ),
    )
}

fn distinguisher_advantage() -> Outcome {
    const SIGMAS: f64 = 5.0;
    const TREND: f64 = 4.0;
    const INSTANCES: usize = 10_000;
    const QUERIES: usize = 100;
    const LIMIT_SECONDS: f64 = 1800.0;
    let start = Instant::now();
    let noiseless = forrelation_rows(&ForrelationSpec {
        n: vec![8, 10, 12],
        c1: vec![16.0],
        covariance: None,
        noise: vec![NoiseModel::None],
        instances: INSTANCES,
        queries: QUERIES,
        faulty_p1: None,
        psi_samples: 0,
        psi_shifts: vec![0],
        seed: SEED,
    });
    let noisy = forrelation_rows(&ForrelationSpec {
        n: vec![12],
        c1: vec![16.0],
        covariance: None,
        noise: vec![NoiseModel::LogOverN],
        instances: INSTANCES,
        queries: QUERIES,
        faulty_p1: None,
        psi_samples: 0,
        psi_shifts: vec![0],
        seed: SEED,
    });
    let seconds = start.elapsed().as_secs_f64();
    let mut passed = true;
    let mut detail = Vec::new();
    let mut scaled = Vec::new();
    for n in [8, 10, 12] {
        let r = find(&noiseless, n, "none", "advantage");
        passed &= r.z_score() >= SIGMAS;
        scaled.push(r.estimate * n as f64);
        detail.push(format!("n={n} {:.2e} (z {:.2})", r.estimate, r.z_score()));
    }
    let r = find(&noisy, 12, "log_over_n", "advantage");
    passed &= r.z_score() >= SIGMAS;
    detail.push(format!("n=12 log_over_n {:.2e} (z {:.2})", r.estimate, r.z_score()));
    let max = scaled.iter().copied().fold(f64::MIN, f64::max);
    let min = scaled.iter().copied().fold(f64::MAX, f64::min);
    let trend_ok = min > 0.0 && max / min < TREND;
    passed &= trend_ok && seconds < LIMIT_SECONDS;
    outcome(
        "distinguisher advantage",
        passed,
        format!(
            "{} (need z >= {SIGMAS}); gap*n in [{min:.2e}, {max:.2e}] (need positive, ratio < {TREND}); {seconds:.1} s",
            detail.join("; ")
        ),
    )
}

fn faulty_oracle() -> Outcome {
    const K: f64 = 4.0;
    const P1: f64 = 0.8;
    let rows = forrelation_rows(&ForrelationSpec {
        n: vec![8],
        c1: vec![16.0],
        covariance: None,
        noise: vec![NoiseModel::None],
        instances: 10_000,
        queries: 100,
        faulty_p1: Some(P1),
        psi_samples: 0,
        psi_shifts: vec![0],
        seed: SEED,
    });
    let faulty = find(&rows, 8, "none", "faulty_advantage");
    let noiseless = find(&rows, 8, "none", "advantage");
    let diff = find(&rows, 8, "none", "faulty_minus_scaled");
    outcome(
        "faulty phase oracle scaling",
        diff.estimate.abs() <= K * diff.standard_error,
        format!(
            "faulty {:.2e}, {P1} x noiseless {:.2e}, paired difference {:.2e} +- {:.2e} (within {K} SE)",
            faulty.estimate,
            P1 * noiseless.estimate,
            diff.estimate,
            diff.standard_error
        ),
    )
}

struct GaussianChecks {
    moments: Outcome,
    truncation: Outcome,
}

fn gaussian_checks() -> GaussianChecks {
    let record = run_verify(&VerifySpec { seed: SEED, ..VerifySpec::new(Suite::GaussianMoments) }, &options())
        .expect("suite runs");
    let Rows::Verify(rows) = &record.rows else { unreachable!() };
    let (trunc, moments): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r.check.starts_with("truncation"));
    let worst_z = moments
        .iter()
        .filter(|r| r.check.starts_with("isserlis"))
        .map(|r| r.measured)
        .fold(0.0, f64::max);
    let fourth = moments
        .iter()
        .find(|r| r.check.starts_with("E[X_i^4]"))
        .expect("fourth moment check");
    GaussianChecks {
        moments: outcome(
            "Gaussian moments vs pairing sums",
            moments.iter().all(|r| r.passed),
            format!(
                "worst |z| {worst_z:.2} over 20 covariances, orders <= 6, 1e6 draws (limit 4); fourth-moment form error {:.1e} (tolerance 1e-12)",
                fourth.measured
            ),
        ),
        truncation: outcome(
            "truncation tail at eps=1/160, n=10",
            trunc.iter().all(|r| r.passed),
            trunc
                .iter()
                .map(|r| format!("{} {:.3e} (limit {:e})", r.check, r.measured, r.tolerance))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    }
}

fn nogo_identity() -> Outcome {
    let rows = nogo(SEED).expect("suite runs");
    outcome(
        "no-go Frobenius identity",
        rows.iter().all(|r| r.passed),
        rows.iter()
            .map(|r| format!("{} {:.2e} (limit {:e})", r.check, r.measured, r.tolerance))
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn reproducibility() -> Outcome {
    let dj = DjSpec {
        n: vec![3, 5],
        lambda: vec![0.0, 0.2],
        shots: vec![],
        trials: 300,
        confidence: 0.95,
        seed: 42,
    };
    let forr = ForrelationSpec {
        n: vec![4, 6],
        c1: vec![16.0],
        covariance: None,
        noise: vec![NoiseModel::None, NoiseModel::LogOverN],
        instances: 5000,
        queries: 20,
        faulty_p1: Some(0.8),
        psi_samples: 10_000,
        psi_shifts: vec![0, 3],
        seed: 42,
    };
    let mut identical = true;
    let mut sizes = Vec::new();
    for threads in [1, 8, 1] {
        let opts = RunOptions { threads: Some(threads) };
        let a = run_dj_experiment(&dj, &opts).unwrap().csv_bytes().unwrap();
        let b = run_forrelation_experiment(&forr, &opts).unwrap().csv_bytes().unwrap();
        sizes.push((a, b));
    }
    for pair in sizes.windows(2) {
        identical &= pair[0] == pair[1];
    }
    outcome(
        "byte-identical CSV at 1 and 8 threads",
        identical,
        format!(
            "dj {} bytes, forrelation {} bytes, three runs",
            sizes[0].0.len(),
            sizes[0].1.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut outcomes = vec![
        cross_simulator_equivalence(),
        noise_algebra_identities(),
        dj_success_at_desk_scale(),
        per_bit_mean_formula(),
        psi_gap(),
        completeness_corollary(),
        distinguisher_advantage(),
        faulty_oracle(),
    ];
    let gaussian = gaussian_checks();
    outcomes.push(gaussian.moments);
    outcomes.push(nogo_identity());
    outcomes.push(gaussian.truncation);
    outcomes.push(reproducibility());

    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        outcomes.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
