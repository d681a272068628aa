//! Configuration, experiment orchestration and CSV reports for `ncjt-core`.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{ConfigError, Overrides, RunConfig};
pub use experiment::{comparison, run_cell, sweep_cells, Cell, CellResult, ExperimentError};
