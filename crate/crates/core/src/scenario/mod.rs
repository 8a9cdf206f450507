//! Scenario files, the end-to-end pipeline, sweeps and output files.

mod config;
mod output;
mod period;
mod pipeline;
mod sweep;

pub use config::*;
pub use output::{load_scenario, report_json, write_outputs, write_spectrum_csv, write_sweep_csv};
pub use period::{analytic_period, oscillation_period};
pub use pipeline::{
    build_tpa, default_half_span, inter_peak_minimum, prepare, run_scenario, split_bands, BandReport,
    GainReport, GridReport, NrfReport, Report, ScenarioResult, Setup,
};
pub use sweep::{apply_param, default_jobs, freeze_derived, parse_values, resolve_param, run_sweep, SweepRow, SweepSpec};
