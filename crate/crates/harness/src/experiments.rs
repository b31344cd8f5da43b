use nqa_core::dj::{constant_class_success_probability, run_trial, DjRunConfig};
use nqa_core::gauss::{
    acceptance_probability, completeness_score, expectation_gap, faulty_phase_oracle_advantage,
    noisy_quantum_distinguisher, psi_statistics, sample_rounded_instance,
    sample_squared_forrelation, CovarianceSpec, Label,
};
use nqa_core::stats::{MeanDifference, ProportionEstimate, RunningMoments};
use nqa_core::{derive_rng, BitString, FunctionClass};
use rayon::prelude::*;

use crate::error::Result;
use crate::parallel::{map_chunks, run_on_pool, stream, RunOptions};
use crate::record::{DjRow, ExperimentRecord, ForrelationRow, Rows};
use crate::spec::{DjSpec, ForrelationSpec, NoiseModel, SweepSpec};

const CLASSES: [FunctionClass; 2] = [FunctionClass::Constant, FunctionClass::Balanced];

/// Success rates of the noisy Deutsch–Jozsa decision for every cell of `spec`.
///
/// Cells are numbered in the order `n`, `λ`, `M`, class; trial `t` of cell `c` draws from
/// `derive_rng(seed, c, t)`.
pub fn run_dj_experiment(spec: &DjSpec, options: &RunOptions) -> Result<ExperimentRecord> {
    spec.validate()?;
    let ((rows, shots), seconds) = run_on_pool(options, || dj_rows(spec))?;
    let mut record = ExperimentRecord::new("dj", spec.seed, spec, Rows::Dj(rows?))?;
    record.wall_clock_seconds = seconds;
    record.total_shots = shots;
    record.threads = options.threads.unwrap_or_else(rayon::current_num_threads);
    Ok(record)
}

fn dj_rows(spec: &DjSpec) -> (Result<Vec<DjRow>>, u64) {
    let mut rows = Vec::new();
    let mut shots_total = 0u64;
    let mut cell = 0u64;
    let result = (|| {
        for &n in &spec.n {
            for &lambda in &spec.lambda {
                for shots in spec.shots_for(n)? {
                    let config = DjRunConfig::<f64>::with_shots(n, lambda, shots)?;
                    for class in CLASSES {
                        let outcomes: Vec<bool> = (0..spec.trials as u64)
                            .into_par_iter()
                            .map(|t| run_trial(class, &config, &mut derive_rng(spec.seed, cell, t)))
                            .collect::<nqa_core::Result<_>>()?;
                        let successes = outcomes.iter().filter(|&&ok| ok).count();
                        let est =
                            ProportionEstimate::from_counts(successes, spec.trials, spec.confidence);
                        rows.push(DjRow {
                            n,
                            lambda,
                            shots,
                            class,
                            trials: spec.trials,
                            successes,
                            rate: est.rate,
                            ci_low: est.ci_low,
                            ci_high: est.ci_high,
                            exact: (class == FunctionClass::Constant)
                                .then(|| constant_class_success_probability(&config)),
                            seed: spec.seed,
                        });
                        shots_total += (spec.trials * shots) as u64;
                        cell += 1;
                    }
                }
            }
        }
        Ok(())
    })();
    (result.map(|()| rows), shots_total)
}

const PURPOSE_INSTANCE: u64 = 1;
const PURPOSE_FAULTY: u64 = 2;
const PURPOSE_PSI: u64 = 3;

fn label_code(label: Label) -> u64 {
    match label {
        Label::Yes => 0,
        Label::No => 1,
    }
}

/// Distinguisher advantages, completeness scores and `ψ_e` gaps for every cell of `spec`.
///
/// Cells are numbered in the order `n`, `c₁`, noise model.
pub fn run_forrelation_experiment(
    spec: &ForrelationSpec,
    options: &RunOptions,
) -> Result<ExperimentRecord> {
    spec.validate()?;
    let ((rows, queries), seconds) = run_on_pool(options, || forrelation_rows(spec))?;
    let mut record =
        ExperimentRecord::new("forrelation", spec.seed, spec, Rows::Forrelation(rows?))?;
    record.wall_clock_seconds = seconds;
    record.total_shots = queries;
    record.threads = options.threads.unwrap_or_else(rayon::current_num_threads);
    Ok(record)
}

struct CellContext<'a> {
    spec: &'a ForrelationSpec,
    n: usize,
    c1: Option<f64>,
    noise: NoiseModel,
    cell: u64,
}

impl CellContext<'_> {
    fn row(
        &self,
        measure: impl Into<String>,
        estimate: f64,
        standard_error: f64,
        expected: Option<f64>,
        count: usize,
    ) -> ForrelationRow {
        ForrelationRow {
            n: self.n,
            c1: self.c1,
            noise: self.noise.to_string(),
            measure: measure.into(),
            estimate,
            standard_error,
            expected,
            count,
            seed: self.spec.seed,
        }
    }
}

fn forrelation_rows(spec: &ForrelationSpec) -> (Result<Vec<ForrelationRow>>, u64) {
    let mut rows = Vec::new();
    let mut queries = 0u64;
    let mut cell = 0u64;
    let c1_axis: Vec<Option<f64>> = if spec.covariance.is_some() {
        vec![None]
    } else {
        spec.c1.iter().copied().map(Some).collect()
    };
    let result = (|| {
        for &n in &spec.n {
            for &c1 in &c1_axis {
                let sigma = match (&spec.covariance, c1) {
                    (Some(d), _) => CovarianceSpec::from_descriptor(d)?,
                    (None, Some(c1)) => CovarianceSpec::hardness_scale(n, c1)?,
                    (None, None) => unreachable!("c1 axis is nonempty without a covariance"),
                };
                for &noise in &spec.noise {
                    let ctx = CellContext {
                        spec,
                        n,
                        c1,
                        noise,
                        cell,
                    };
                    queries += forrelation_cell(&ctx, &sigma, &mut rows)?;
                    cell += 1;
                }
            }
        }
        Ok(())
    })();
    (result.map(|()| rows), queries)
}

struct InstanceOutcome {
    rate: f64,
    exact: f64,
    faulty: Option<f64>,
}

fn forrelation_cell(
    ctx: &CellContext<'_>,
    sigma: &CovarianceSpec,
    rows: &mut Vec<ForrelationRow>,
) -> Result<u64> {
    let spec = ctx.spec;
    let dist = ctx.noise.distribution(ctx.n)?;

    let expected_score = match (sigma.epsilon(), dist.flip_probability()) {
        (Some(eps), Some(lambda)) => Some(2.0 * (1.0 - lambda).powi(ctx.n as i32) * eps * eps),
        _ => None,
    };
    rows.push(ctx.row(
        "completeness",
        completeness_score(sigma, &dist)?,
        0.0,
        expected_score,
        0,
    ));

    let mut queries = 0u64;
    if spec.instances > 0 {
        let faulty_p1 = spec.faulty_p1.filter(|_| ctx.noise == NoiseModel::None);
        let mut per_label = Vec::new();
        for label in Label::BOTH {
            let outcomes: Vec<InstanceOutcome> = (0..spec.instances as u64)
                .into_par_iter()
                .map(|i| {
                    let code = label_code(label);
                    let mut rng = derive_rng(spec.seed, ctx.cell, stream(PURPOSE_INSTANCE, code, i));
                    let inst = sample_rounded_instance(sigma, label, &mut rng)?;
                    let rate = noisy_quantum_distinguisher(&inst, &dist, spec.queries, &mut rng)?.rate;
                    let exact = acceptance_probability(&inst, &dist)?;
                    let faulty = match faulty_p1 {
                        Some(p1) => {
                            let mut rng =
                                derive_rng(spec.seed, ctx.cell, stream(PURPOSE_FAULTY, code, i));
                            Some(faulty_phase_oracle_advantage(&inst, p1, spec.queries, &mut rng)?.rate)
                        }
                        None => None,
                    };
                    Ok(InstanceOutcome { rate, exact, faulty })
                })
                .collect::<nqa_core::Result<_>>()?;
            per_label.push(outcomes);
        }
        queries += (2 * spec.instances * spec.queries) as u64;

        let moments = |outcomes: &[InstanceOutcome], f: &dyn Fn(&InstanceOutcome) -> f64| {
            outcomes.iter().map(f).collect::<RunningMoments>()
        };
        let (yes, no) = (&per_label[0], &per_label[1]);
        let count = spec.instances;

        let yes_rate = moments(yes, &|o| o.rate);
        let no_rate = moments(no, &|o| o.rate);
        rows.push(ctx.row("accept_yes", yes_rate.mean(), yes_rate.standard_error(), None, count));
        rows.push(ctx.row("accept_no", no_rate.mean(), no_rate.standard_error(), None, count));
        let adv = MeanDifference::between(&yes_rate, &no_rate);
        rows.push(ctx.row("advantage", adv.estimate, adv.standard_error, None, count));
        let exact = MeanDifference::between(&moments(yes, &|o| o.exact), &moments(no, &|o| o.exact));
        rows.push(ctx.row("advantage_exact", exact.estimate, exact.standard_error, None, count));

        if let Some(p1) = faulty_p1 {
            let faulty = |o: &InstanceOutcome| o.faulty.expect("faulty rate recorded");
            let adv = MeanDifference::between(&moments(yes, &faulty), &moments(no, &faulty));
            rows.push(ctx.row("faulty_advantage", adv.estimate, adv.standard_error, None, count));
            // Paired per instance, so the shared instance noise cancels.
            let scaled = |o: &InstanceOutcome| faulty(o) - p1 * o.rate;
            let diff = MeanDifference::between(&moments(yes, &scaled), &moments(no, &scaled));
            rows.push(ctx.row(
                "faulty_minus_scaled",
                diff.estimate,
                diff.standard_error,
                Some(0.0),
                count,
            ));
            queries += (2 * spec.instances * spec.queries) as u64;
        }
    }

    if spec.psi_samples > 0 {
        let shifts = &spec.psi_shifts;
        let mut per_label = Vec::new();
        for label in Label::BOTH {
            let chunks = map_chunks(spec.psi_samples, |_, range| -> nqa_core::Result<Vec<RunningMoments>> {
                let mut acc = vec![RunningMoments::new(); shifts.len()];
                for j in range {
                    let mut rng = derive_rng(
                        spec.seed,
                        ctx.cell,
                        stream(PURPOSE_PSI, label_code(label), j as u64),
                    );
                    let sample = sample_squared_forrelation(sigma, label, &mut rng);
                    let psi = psi_statistics(&sample)?;
                    for (m, &e) in acc.iter_mut().zip(shifts) {
                        m.push(psi[e]);
                    }
                }
                Ok(acc)
            });
            let mut total = vec![RunningMoments::new(); shifts.len()];
            for chunk in chunks {
                for (t, c) in total.iter_mut().zip(chunk?) {
                    t.merge(&c);
                }
            }
            per_label.push(total);
        }
        for (k, &e) in shifts.iter().enumerate() {
            let e_bits = BitString::new(ctx.n, e)?;
            let gap = MeanDifference::between(&per_label[0][k], &per_label[1][k]);
            rows.push(ctx.row(
                format!("psi_gap[e={e_bits}]"),
                gap.estimate,
                gap.standard_error,
                Some(expectation_gap(sigma, e_bits)?),
                spec.psi_samples,
            ));
            let no = &per_label[1][k];
            rows.push(ctx.row(
                format!("psi_no_mean[e={e_bits}]"),
                no.mean(),
                no.standard_error(),
                Some(0.0),
                spec.psi_samples,
            ));
        }
    }
    Ok(queries)
}

/// Runs the experiment named in a sweep file; results are recorded under the kind `sweep`.
pub fn run_sweep(spec: &SweepSpec, options: &RunOptions) -> Result<ExperimentRecord> {
    spec.validate()?;
    let mut record = match spec {
        SweepSpec::Dj(s) => run_dj_experiment(s, options)?,
        SweepSpec::Forrelation(s) => run_forrelation_experiment(s, options)?,
    };
    record.kind = "sweep".to_string();
    record.spec = serde_json::to_value(spec)?;
    Ok(record)
}
