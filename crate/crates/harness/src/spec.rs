//! Experiment specifications, read from JSON files and overridden by command-line flags.
//!
//! Axis lists are expanded as a Cartesian product in the order the fields are declared, with
//! the last axis varying fastest.

use std::fmt;
use std::path::Path;

use nqa_core::dj::query_budget;
use nqa_core::gauss::CovarianceDescriptor;
use nqa_core::ErrorDistribution;
use serde::{Deserialize, Serialize};

use crate::error::{usage, HarnessError, Result};

/// Largest `n` accepted by the runners.
pub const MAX_EXPERIMENT_BITS: usize = 16;

fn default_trials() -> usize {
    200
}

fn default_confidence() -> f64 {
    0.95
}

fn default_c1() -> Vec<f64> {
    vec![16.0]
}

fn default_noise() -> Vec<NoiseModel> {
    vec![NoiseModel::None]
}

fn default_instances() -> usize {
    1000
}

fn default_queries() -> usize {
    100
}

fn default_shifts() -> Vec<usize> {
    vec![0]
}

/// Deutsch–Jozsa success-rate experiment over `n × λ × M` cells, each run for both classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DjSpec {
    pub n: Vec<usize>,
    pub lambda: Vec<f64>,
    /// Shot counts; empty means `⌈8n² ln n⌉` per cell.
    #[serde(default)]
    pub shots: Vec<usize>,
    /// Trials per class and cell.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub seed: u64,
}

impl DjSpec {
    pub fn validate(&self) -> Result<()> {
        check_nonempty("n", &self.n)?;
        check_nonempty("lambda", &self.lambda)?;
        for &n in &self.n {
            check_bits(n, 1)?;
            if self.shots.is_empty() && n < 2 {
                return Err(usage("the default shot count needs n >= 2; pass --shots"));
            }
        }
        for &l in &self.lambda {
            check_probability("lambda", l)?;
        }
        if self.shots.contains(&0) {
            return Err(usage("shot counts must be positive"));
        }
        check_count("trials", self.trials)?;
        check_confidence(self.confidence)
    }

    /// Shot counts for one `n`: the explicit axis or the default budget.
    pub fn shots_for(&self, n: usize) -> Result<Vec<usize>> {
        if self.shots.is_empty() {
            Ok(vec![query_budget(n)?])
        } else {
            Ok(self.shots.clone())
        }
    }
}

/// Pre-oracle error model for the Fourier-sampling distinguisher.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// Independent flips with probability `ln n / n`.
    LogOverN,
    /// Independent flips with a fixed probability.
    Iid(f64),
}

impl NoiseModel {
    pub fn distribution(&self, n: usize) -> Result<ErrorDistribution> {
        Ok(match *self {
            Self::None => ErrorDistribution::noiseless(n)?,
            Self::LogOverN => ErrorDistribution::log_over_n(n)?,
            Self::Iid(lambda) => ErrorDistribution::iid(n, lambda)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "none" => Ok(Self::None),
            "log_over_n" => Ok(Self::LogOverN),
            other => other
                .strip_prefix("iid:")
                .and_then(|v| v.parse().ok())
                .map(Self::Iid)
                .ok_or_else(|| {
                    usage(format!(
                        "unknown noise model {other:?}; expected none, log_over_n or iid:<rate>"
                    ))
                }),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::LogOverN => f.write_str("log_over_n"),
            Self::Iid(l) => write!(f, "iid:{l}"),
        }
    }
}

/// Gaussian squared-Forrelation experiment over `n × c₁ × noise` cells with `Σ = I/(c₁n)`,
/// unless `covariance` fixes `Σ` (and with it `n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForrelationSpec {
    pub n: Vec<usize>,
    #[serde(default = "default_c1")]
    pub c1: Vec<f64>,
    #[serde(default)]
    pub covariance: Option<CovarianceDescriptor>,
    #[serde(default = "default_noise")]
    pub noise: Vec<NoiseModel>,
    /// Rounded instances per label for the distinguisher; zero skips it.
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Queries per instance.
    #[serde(default = "default_queries")]
    pub queries: usize,
    /// Oracle success probability for the faulty-oracle comparison, run in noiseless cells.
    #[serde(default)]
    pub faulty_p1: Option<f64>,
    /// Gaussian samples per label for the `ψ_e` gap; zero skips it.
    #[serde(default)]
    pub psi_samples: usize,
    /// Error vectors `e`, as indices, at which `ψ_e` is measured.
    #[serde(default = "default_shifts")]
    pub psi_shifts: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl ForrelationSpec {
    pub fn validate(&self) -> Result<()> {
        check_nonempty("n", &self.n)?;
        check_nonempty("noise", &self.noise)?;
        for &n in &self.n {
            check_bits(n, 1)?;
        }
        if let Some(descriptor) = &self.covariance {
            let spec = nqa_core::CovarianceSpec::from_descriptor(descriptor)
                .map_err(|e| usage(format!("covariance: {e}")))?;
            if self.n != [spec.n()] {
                return Err(usage(format!(
                    "an explicit covariance fixes n = {}; got n = {:?}",
                    spec.n(),
                    self.n
                )));
            }
            if self.c1.len() > 1 {
                return Err(usage("c1 has no effect with an explicit covariance"));
            }
        } else {
            check_nonempty("c1", &self.c1)?;
            if let Some(c) = self.c1.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                return Err(usage(format!("c1 must be positive, got {c}")));
            }
        }
        for noise in &self.noise {
            if let NoiseModel::Iid(l) = noise {
                check_probability("noise rate", *l)?;
            }
            if *noise == NoiseModel::LogOverN && self.n.contains(&1) {
                return Err(usage("log_over_n noise needs n >= 2"));
            }
        }
        if self.instances > 0 {
            check_count("queries", self.queries)?;
        }
        if let Some(p1) = self.faulty_p1 {
            if !(0.5..=1.0).contains(&p1) {
                return Err(usage(format!("faulty_p1 must lie in [1/2, 1], got {p1}")));
            }
            if self.instances == 0 {
                return Err(usage("faulty_p1 needs instances > 0"));
            }
        }
        if self.psi_samples > 0 {
            check_nonempty("psi_shifts", &self.psi_shifts)?;
            if let Some(e) = self
                .psi_shifts
                .iter()
                .find(|&&e| self.n.iter().any(|&n| e >= 1 << n))
            {
                return Err(usage(format!("psi shift {e} does not fit in every n")));
            }
        }
        Ok(())
    }
}

/// A sweep file: an experiment kind plus its axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase")]
pub enum SweepSpec {
    Dj(DjSpec),
    Forrelation(ForrelationSpec),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Dj(s) => s.validate(),
            Self::Forrelation(s) => s.validate(),
        }
    }
}

/// Named verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SimEquivalence,
    GaussianMoments,
    Nogo,
    Identities,
    All,
}

impl Suite {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "sim-equivalence" => Ok(Self::SimEquivalence),
            "gaussian-moments" => Ok(Self::GaussianMoments),
            "nogo" => Ok(Self::Nogo),
            "identities" => Ok(Self::Identities),
            "all" => Ok(Self::All),
            other => Err(usage(format!(
                "unknown suite {other:?}; expected sim-equivalence, gaussian-moments, nogo, identities or all"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SimEquivalence => "sim-equivalence",
            Self::GaussianMoments => "gaussian-moments",
            Self::Nogo => "nogo",
            Self::Identities => "identities",
            Self::All => "all",
        }
    }
}

/// Settings for a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    /// Monte Carlo draws per covariance in the moment check.
    #[serde(default = "default_moment_samples")]
    pub moment_samples: usize,
    /// Draws in the truncation-tail check.
    #[serde(default = "default_truncation_draws")]
    pub truncation_draws: usize,
}

fn default_moment_samples() -> usize {
    1_000_000
}

fn default_truncation_draws() -> usize {
    100_000
}

impl VerifySpec {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            seed: 0,
            moment_samples: default_moment_samples(),
            truncation_draws: default_truncation_draws(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_count("moment_samples", self.moment_samples)?;
        check_count("truncation_draws", self.truncation_draws)
    }
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Config {
        path: path.to_path_buf(),
        source,
    })
}

fn check_nonempty<T>(name: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(usage(format!("{name} must list at least one value")));
    }
    Ok(())
}

fn check_bits(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_EXPERIMENT_BITS {
        return Err(usage(format!(
            "n = {n} outside the supported range {min}..={MAX_EXPERIMENT_BITS}"
        )));
    }
    Ok(())
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(usage(format!("{name} {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_count(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(usage(format!("{name} must be positive")));
    }
    Ok(())
}

fn check_confidence(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(usage(format!("confidence {c} outside (0, 1)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dj_defaults_and_validation() {
        let spec: DjSpec = serde_json::from_str(r#"{"n":[8],"lambda":[0.25]}"#).unwrap();
        assert_eq!(spec.trials, 200);
        assert_eq!(spec.shots_for(8).unwrap(), vec![1065]);
        spec.validate().unwrap();
        let bad: DjSpec = serde_json::from_str(r#"{"n":[8],"lambda":[1.5]}"#).unwrap();
        assert!(bad.validate().unwrap_err().is_usage());
        let bad: DjSpec = serde_json::from_str(r#"{"n":[1],"lambda":[0.1]}"#).unwrap();
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<DjSpec>(r#"{"n":[8],"lambda":[0.1],"x":1}"#).is_err());
    }

    #[test]
    fn noise_models() {
        let spec: ForrelationSpec = serde_json::from_str(
            r#"{"n":[8],"noise":["none","log_over_n",{"iid":0.1}],"faulty_p1":0.8}"#,
        )
        .unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.noise[2], NoiseModel::Iid(0.1));
        assert_eq!(NoiseModel::parse("iid:0.25").unwrap(), NoiseModel::Iid(0.25));
        assert!(NoiseModel::parse("bogus").is_err());
        assert_eq!(NoiseModel::LogOverN.to_string(), "log_over_n");
    }

    #[test]
    fn forrelation_validation() {
        let mut spec: ForrelationSpec = serde_json::from_str(r#"{"n":[3]}"#).unwrap();
        spec.psi_samples = 10;
        spec.psi_shifts = vec![7];
        spec.validate().unwrap();
        spec.psi_shifts = vec![8];
        assert!(spec.validate().is_err());
        spec.psi_shifts = vec![0];
        spec.covariance = Some(CovarianceDescriptor::ScaledIdentity { n: 4, epsilon: 0.1 });
        assert!(spec.validate().is_err());
        spec.n = vec![4];
        spec.validate().unwrap();
    }

    #[test]
    fn sweep_tag() {
        let s: SweepSpec =
            serde_json::from_str(r#"{"experiment":"dj","n":[4,6],"lambda":[0,0.1]}"#).unwrap();
        assert!(matches!(s, SweepSpec::Dj(_)));
        s.validate().unwrap();
        assert!(Suite::parse("nope").is_err());
        assert_eq!(Suite::parse("gaussian-moments").unwrap().name(), "gaussian-moments");
    }
}
