//! Experiment orchestration: parse a config, fan out seeded trials, and
//! emit a deterministic artifact set (per-trial CSV rows, a summary JSON
//! whose every number is recomputable from the rows, and a manifest with
//! the config hash).

pub mod config;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind};
pub use run::{run, RunError, RunOutcome};
