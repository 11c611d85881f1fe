//! Experiment harness behind the `supsize` binary: simulation sweeps, sample
//! complexity probes, key=value configuration and CSV / JSON output.

pub mod config;
pub mod error;
pub mod output;
pub mod probe;
pub mod sweep;

pub use error::{CliError, CliResult};
pub use probe::{probe_sample_complexity, ProbeResult, ProbeSpec};
pub use sweep::{geometric_grid, run_sweep, Sampling, SweepRow, SweepSpec};
