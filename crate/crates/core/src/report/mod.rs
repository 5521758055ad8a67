//! Configuration, orchestration and export behind the command-line front end.

mod compare;
mod config;
pub mod io;
mod model_report;
mod pipeline;
mod series;

pub use compare::{compare_baseline, resample, ComparisonReport, PeakInfo};
pub use config::{IntensityConfig, Overrides, Paths, RunConfig, DEFAULT_SWEEP_FRACTIONS};
pub use model_report::{model_breakdown, ModalityRate, ModelBreakdown};
pub use pipeline::{
    fraction_label, load_planar_aps, prepare_out_dir, run_ap_load, run_compare, run_fraction, run_generate, run_model, run_sweep,
    write_ap_outputs, write_compare_outputs, write_model_outputs, write_series_outputs, write_sweep_summary, ApLoadRun, FilterReport,
    FractionRun, RunContext, CONSERVATION_TOLERANCE,
};
pub use series::{accumulate_series, to_mbps, RateSeries, WorkloadSeries};
