//! Experiment driver for `membrane-core`: TOML configs, CSV/JSON
//! artifacts, stability sweeps and the `membrane` command line.
//!
//! Exit statuses of a run: 0 success, 1 I/O failure, 2 config error,
//! 3 solver failure, 4 failed or fatal diagnostic, 5 sweep hypothesis
//! violated (one-phase singular point on the reference free boundary).

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod output;
pub mod report;
pub mod run;
pub mod selftest;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::LabError;
pub use run::{run, RunSummary, Verb};
pub use sweep::{hausdorff_distance, stability_sweep, StabilityReport};
