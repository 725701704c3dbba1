//! Configuration, CSV tables, synthetic data, the reference report and the
//! command line.

mod cli;
mod config;
pub mod report;
mod synth;
mod table;

pub use cli::{cli_dispatch, exit_code, plan, Outcome};
pub use config::{Cos2Truth, MetricsSettings, OfeTruth, PulseSettings, RunConfig, SweepRange};
pub use synth::{fit_model, forward_model, synthesize_dataset, SynthModel};
pub use table::{
    counts_to_string, ingest_sweep_csv, read_counts, read_rows, read_sweep, rows_to_string, sweep_to_string,
    write_rows, write_sweep, NumberFormat, ResultRow, Value,
};
