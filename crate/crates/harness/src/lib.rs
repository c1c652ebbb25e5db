//! Monte Carlo sweeps over the holobeam solvers, with CSV and JSON output.

pub mod config;
pub mod digital;
pub mod experiment;
pub mod output;

pub use config::{Architecture, ExperimentConfig, Sweep, SweepVariable};
pub use experiment::{run_experiment, SweepRecord, SweepResult};
