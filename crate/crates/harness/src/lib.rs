//! Reproducible experiment runner for `nqa-core`.
//!
//! Every random choice is drawn from a ChaCha8 stream seeded by
//! [`nqa_core::derive_seed`]`(master, cell, stream)`, and parallel results are reduced in index
//! order over fixed-size chunks, so output files depend only on the spec and the master seed.

pub mod error;
pub mod experiments;
mod parallel;
pub mod record;
pub mod spec;
pub mod verify;

pub use error::{HarnessError, Result};
pub use experiments::{run_dj_experiment, run_forrelation_experiment, run_sweep};
pub use parallel::{RunOptions, CHUNK};
pub use record::{CheckRow, DjRow, ExperimentRecord, Format, ForrelationRow, Rows, WrittenFiles};
pub use spec::{DjSpec, ForrelationSpec, NoiseModel, Suite, SweepSpec, VerifySpec};
pub use verify::run_verify;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NQA_OUT_DIR";
/// Output directory when neither `--out` nor the environment variable is set.
pub const DEFAULT_OUT_DIR: &str = "results";
