//! Experiments, CSV output and the command line.

pub mod cli;
pub mod config;
pub mod csv;
pub mod experiments;
pub mod plot;
pub use crate::presets;

pub use cli::cli_main;
pub use config::{ExperimentConfig, ExperimentKind, PolarizabilityPreset, PolarizabilitySpec};
pub use csv::{emit_csv, parse_csv, write_csv};
pub use experiments::{
    run_convergence, run_crank_nicolson_table, run_degenerate, run_nsfd_sweep, run_scaling,
    run_three_level, BenchmarkRow, RunStatus, POSITIVITY_THRESHOLD,
};
