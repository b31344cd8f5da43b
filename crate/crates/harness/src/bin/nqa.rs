use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nqa_harness::spec::load_json;
use nqa_harness::{
    run_dj_experiment, run_forrelation_experiment, run_sweep, run_verify, DjSpec,
    ExperimentRecord, Format, ForrelationSpec, HarnessError, NoiseModel, Result, Rows, RunOptions,
    Suite, SweepSpec, VerifySpec, DEFAULT_OUT_DIR, OUT_DIR_ENV,
};

/// Noisy Deutsch–Jozsa and squared-Forrelation experiments.
///
/// Exit status: 0 on success, 1 when a verification check or the run fails, 2 on usage errors.
#[derive(Parser)]
#[command(name = "nqa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Success rates of the noisy Deutsch–Jozsa decision.
    Dj(ExperimentArgs),
    /// Distinguisher advantage, completeness scores and psi gaps.
    Forrelation(ExperimentArgs),
    /// Run a verification suite: sim-equivalence, gaussian-moments, nogo, identities or all.
    Verify(VerifyArgs),
    /// Run the experiment described by a sweep file (requires --config).
    Sweep(ExperimentArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed for every derived random stream.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Noise rates; for forrelation these are independent pre-oracle flip rates.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Trials per class (dj) or rounded instances per label (forrelation).
    #[arg(long)]
    trials: Option<usize>,
    /// Shots per trial (dj) or queries per instance (forrelation); dj accepts a list.
    #[arg(long, value_delimiter = ',')]
    shots: Vec<usize>,
    /// Covariance scale constants, Σ = I/(c1 n) (forrelation).
    #[arg(long, value_delimiter = ',')]
    c1: Vec<f64>,
    /// Noise models for forrelation: none, log_over_n or iid:RATE.
    #[arg(long, value_delimiter = ',')]
    noise: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: CommonArgs,
    /// Monte Carlo draws per covariance in the moment check.
    #[arg(long)]
    trials: Option<usize>,
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

fn dj_spec(args: &ExperimentArgs, base: Option<DjSpec>) -> Result<DjSpec> {
    if !args.c1.is_empty() || !args.noise.is_empty() {
        return Err(usage("--c1 and --noise do not apply to dj"));
    }
    let mut spec = match base {
        Some(s) => s,
        None => DjSpec {
            n: Vec::new(),
            lambda: Vec::new(),
            shots: Vec::new(),
            trials: 200,
            confidence: 0.95,
            seed: 0,
        },
    };
    if !args.n.is_empty() {
        spec.n = args.n.clone();
    }
    if !args.lambda.is_empty() {
        spec.lambda = args.lambda.clone();
    }
    if !args.shots.is_empty() {
        spec.shots = args.shots.clone();
    }
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(seed) = args.common.seed {
        spec.seed = seed;
    }
    if spec.n.is_empty() || spec.lambda.is_empty() {
        return Err(usage("dj needs --n and --lambda (or a --config file)"));
    }
    Ok(spec)
}

fn forrelation_spec(args: &ExperimentArgs, base: Option<ForrelationSpec>) -> Result<ForrelationSpec> {
    let mut spec = match base {
        Some(s) => s,
        None => serde_json::from_str(r#"{"n":[]}"#).expect("defaults parse"),
    };
    if !args.n.is_empty() {
        spec.n = args.n.clone();
    }
    if !args.c1.is_empty() {
        spec.c1 = args.c1.clone();
    }
    let mut noise: Vec<NoiseModel> = args
        .noise
        .iter()
        .map(|s| NoiseModel::parse(s))
        .collect::<Result<_>>()?;
    noise.extend(args.lambda.iter().map(|&l| NoiseModel::Iid(l)));
    if !noise.is_empty() {
        spec.noise = noise;
    }
    if let Some(t) = args.trials {
        spec.instances = t;
    }
    match args.shots.as_slice() {
        [] => {}
        [q] => spec.queries = *q,
        _ => return Err(usage("forrelation takes a single --shots value")),
    }
    if let Some(seed) = args.common.seed {
        spec.seed = seed;
    }
    if spec.n.is_empty() {
        return Err(usage("forrelation needs --n (or a --config file)"));
    }
    Ok(spec)
}

fn options(common: &CommonArgs) -> RunOptions {
    RunOptions {
        threads: common.threads,
    }
}

fn run(cli: Cli) -> Result<(ExperimentRecord, PathBuf, Format)> {
    let (record, common) = match &cli.command {
        Command::Dj(args) => {
            let base = args.common.config.as_deref().map(load_json).transpose()?;
            let spec = dj_spec(args, base)?;
            (run_dj_experiment(&spec, &options(&args.common))?, &args.common)
        }
        Command::Forrelation(args) => {
            let base = args.common.config.as_deref().map(load_json).transpose()?;
            let spec = forrelation_spec(args, base)?;
            (run_forrelation_experiment(&spec, &options(&args.common))?, &args.common)
        }
        Command::Sweep(args) => {
            let path = args
                .common
                .config
                .as_deref()
                .ok_or_else(|| usage("sweep needs --config"))?;
            let spec = match load_json::<SweepSpec>(path)? {
                SweepSpec::Dj(s) => SweepSpec::Dj(dj_spec(args, Some(s))?),
                SweepSpec::Forrelation(s) => SweepSpec::Forrelation(forrelation_spec(args, Some(s))?),
            };
            (run_sweep(&spec, &options(&args.common))?, &args.common)
        }
        Command::Verify(args) => {
            let suite = Suite::parse(&args.suite)?;
            let mut spec = match args.common.config.as_deref() {
                Some(path) => load_json::<VerifySpec>(path)?,
                None => VerifySpec::new(suite),
            };
            spec.suite = suite;
            if let Some(seed) = args.common.seed {
                spec.seed = seed;
            }
            if let Some(t) = args.trials {
                spec.moment_samples = t;
            }
            (run_verify(&spec, &options(&args.common))?, &args.common)
        }
    };
    Ok((record, common.out.clone(), common.format))
}

fn report(record: &ExperimentRecord) {
    if let Rows::Verify(rows) = &record.rows {
        for r in rows {
            let status = if r.passed { "PASS" } else { "FAIL" };
            println!(
                "{status} [{}] {}: measured {:e}, tolerance {:e} ({})",
                r.suite, r.check, r.measured, r.tolerance, r.detail
            );
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(cli).and_then(|(record, out, format)| {
        report(&record);
        let files = record.write(&out, format)?;
        println!(
            "{} rows in {:.2} s -> {} ({})",
            record.rows.len(),
            record.wall_clock_seconds,
            files.results.display(),
            files.manifest.display()
        );
        Ok(record.passed())
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
