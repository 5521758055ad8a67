//! End-to-end runs: trace → region → penetration → attribution → files.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::compare::{compare_baseline, ComparisonReport};
use super::config::RunConfig;
use super::io;
use super::model_report::{model_breakdown, ModelBreakdown};
use super::series::{accumulate_series, to_mbps, RateSeries, WorkloadSeries};
use crate::attribution::Attribution;
use crate::error::{Error, Result};
use crate::spatial::{accumulate_ap_workload, hotspot_summary, AccessPoint, ApWorkloadTable, HotspotSummary};
use crate::trace::{open_trace, BinGrid, PenetrationFilter, ProjectToPlane, Region, RegionFilter, SampleStream, StreamStats};
use crate::workload::{MapMode, VehicleModel};

/// Relative tolerance of the post-run conservation checks.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

/// Inputs shared by every fraction of a run.
pub struct RunContext {
    pub config: RunConfig,
    pub model: VehicleModel<f64>,
    pub attribution: Attribution,
    pub region: Option<Region>,
}

impl RunContext {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let model = config.vehicle_model()?;
        let attribution = Attribution::new(&model, config.intensity_profile()?, config.window_seconds, config.sample_period_s)?;
        Ok(RunContext { region: config.planar_region()?, config: config.clone(), model, attribution })
    }

    fn open(&self) -> Result<SampleStream> {
        let stream = open_trace(self.config.require_trace()?)?;
        Ok(match self.config.projection() {
            Some(p) => Box::new(ProjectToPlane::new(stream, p)),
            None => stream,
        })
    }

    /// Runs the filter chain over the trace and hands the surviving samples
    /// to `sink`.
    fn filtered<T>(
        &self,
        fraction: f64,
        sink: impl FnOnce(&mut dyn Iterator<Item = Result<crate::trace::TraceSample>>) -> Result<T>,
    ) -> Result<(T, FilterReport)> {
        let stream = self.open()?;
        let seed = self.config.seed;
        match &self.region {
            Some(r) => {
                let mut region = RegionFilter::new(stream, r.clone());
                let mut pen = PenetrationFilter::new(&mut region, fraction, seed)?;
                let out = sink(&mut pen)?;
                let (seen, selected) = pen.vehicle_counts();
                let penetration = pen.stats();
                Ok((
                    out,
                    FilterReport { fraction, region: Some(region.stats()), penetration, vehicles_seen: seen, vehicles_selected: selected },
                ))
            }
            None => {
                let mut pen = PenetrationFilter::new(stream, fraction, seed)?;
                let out = sink(&mut pen)?;
                let (seen, selected) = pen.vehicle_counts();
                Ok((
                    out,
                    FilterReport { fraction, region: None, penetration: pen.stats(), vehicles_seen: seen, vehicles_selected: selected },
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterReport {
    pub fraction: f64,
    /// Absent when no region is configured.
    pub region: Option<StreamStats>,
    pub penetration: StreamStats,
    /// Distinct vehicles reaching the penetration stage.
    pub vehicles_seen: u64,
    pub vehicles_selected: u64,
}

#[derive(Debug, Clone)]
pub struct FractionRun {
    pub filters: FilterReport,
    pub series: WorkloadSeries,
}

pub fn fraction_label(fraction: f64) -> String {
    format!("p{fraction:.3}")
}

/// Regional series for one penetration fraction.
pub fn run_fraction(ctx: &RunContext, fraction: f64) -> Result<FractionRun> {
    let bins = ctx.config.bins;
    let (series, filters) = ctx.filtered(fraction, |s| accumulate_series(s, &ctx.attribution, bins, fraction_label(fraction)))?;
    series.check_conservation(CONSERVATION_TOLERANCE)?;
    Ok(FractionRun { filters, series })
}

/// Every configured fraction, one after another.
pub fn run_generate(config: &RunConfig) -> Result<Vec<FractionRun>> {
    let ctx = RunContext::new(config)?;
    config.generate_fractions().into_iter().map(|f| run_fraction(&ctx, f)).collect()
}

/// Sweep fractions, evaluated in parallel.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<FractionRun>> {
    let ctx = RunContext::new(config)?;
    config.sweep_fractions().into_par_iter().map(|f| run_fraction(&ctx, f)).collect()
}

#[derive(Debug, Clone)]
pub struct ApLoadRun {
    pub filters: FilterReport,
    pub table: ApWorkloadTable,
    pub hotspots: HotspotSummary,
}

pub fn load_planar_aps(config: &RunConfig) -> Result<Vec<AccessPoint>> {
    let path = config.paths.aps.as_deref().ok_or_else(|| Error::config("no access point list (set paths.aps)"))?;
    let mut aps = io::load_aps(path)?;
    if let Some(p) = config.projection() {
        for ap in &mut aps {
            if !crate::trace::LocalProjection::is_geographic(ap.x, ap.y) {
                return Err(Error::config(format!("access point {} is not a longitude/latitude pair", ap.ap_id)));
            }
            (ap.x, ap.y) = p.project(ap.x, ap.y);
        }
    }
    Ok(aps)
}

pub fn run_ap_load(config: &RunConfig) -> Result<Vec<ApLoadRun>> {
    let ctx = RunContext::new(config)?;
    let aps = load_planar_aps(config)?;
    config
        .generate_fractions()
        .into_iter()
        .map(|fraction| {
            let (table, filters) = ctx.filtered(fraction, |s| accumulate_ap_workload(s, &aps, &ctx.attribution, config.bins))?;
            table.check_conservation(CONSERVATION_TOLERANCE)?;
            let hotspots = hotspot_summary(&table);
            Ok(ApLoadRun { filters, table, hotspots })
        })
        .collect()
}

pub fn run_model(config: &RunConfig) -> Result<ModelBreakdown> {
    model_breakdown(&config.vehicle_model()?, config.fleet_size, config.mean_learning_rate, config.window_seconds)
}

/// Compares an AV rate series against the configured baseline. Without
/// `av_path` the AV series is generated at the largest configured fraction.
pub fn run_compare(config: &RunConfig, av_path: Option<&Path>) -> Result<ComparisonReport> {
    let baseline_path = config.paths.baseline.as_deref().ok_or_else(|| Error::config("no baseline series (set paths.baseline)"))?;
    let baseline = io::load_rate_series(baseline_path, Some(config.bins.bin_seconds()))?;
    let av = match av_path {
        Some(p) => io::load_rate_series(p, Some(config.bins.bin_seconds()))?,
        None => {
            let ctx = RunContext::new(config)?;
            let fraction = config.generate_fractions().into_iter().fold(0.0, f64::max);
            to_mbps(&run_fraction(&ctx, fraction)?.series)
        }
    };
    compare_baseline(&av, &baseline)
}

// ---- output files ----

#[derive(Serialize)]
struct RunMetadata<'a, T: Serialize> {
    command: &'a str,
    model_map_mode: MapMode,
    attribution_map_mode: MapMode,
    attribution_note: &'static str,
    seed: u64,
    sample_period_s: f64,
    window_seconds: f64,
    mean_learning_rate: f64,
    bins: BinGrid,
    runs: Vec<T>,
}

const ATTRIBUTION_NOTE: &str = "trace-driven attribution uses the per-vehicle map rate regardless of the model map mode";

#[derive(Serialize)]
struct SeriesEntry<'a> {
    #[serde(flatten)]
    filters: &'a FilterReport,
    in_grid_samples: u64,
    out_of_grid_samples: u64,
    total_bytes: f64,
    stream_total_bytes: f64,
    peak_mbps: f64,
    series_file: String,
    rate_file: String,
}

fn metadata<'a, T: Serialize>(command: &'a str, cfg: &RunConfig, model: MapMode, runs: Vec<T>) -> RunMetadata<'a, T> {
    RunMetadata {
        command,
        model_map_mode: model,
        attribution_map_mode: Attribution::MAP_MODE,
        attribution_note: ATTRIBUTION_NOTE,
        seed: cfg.seed,
        sample_period_s: cfg.sample_period_s,
        window_seconds: cfg.window_seconds,
        mean_learning_rate: cfg.mean_learning_rate,
        bins: cfg.bins,
        runs,
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::config(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

/// Prepares the output directory and records the effective configuration.
pub fn prepare_out_dir(config: &RunConfig) -> Result<PathBuf> {
    let out = config.paths.out.clone().ok_or_else(|| Error::config("no output directory (set paths.out or --out)"))?;
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    write_text(&out.join("effective_config.toml"), &config.to_toml()?)?;
    Ok(out)
}

/// Writes `series_<p>.csv` and `rate_<p>.csv` per fraction plus `<command>.json`.
pub fn write_series_outputs(out: &Path, command: &str, config: &RunConfig, runs: &[FractionRun]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for run in runs {
        let label = &run.series.label;
        let series_file = format!("series_{label}.csv");
        let rate_file = format!("rate_{label}.csv");
        run.series.write_csv(create(&out.join(&series_file))?)?;
        let rate: RateSeries = to_mbps(&run.series);
        rate.write_csv(create(&out.join(&rate_file))?)?;
        written.push(out.join(&series_file));
        written.push(out.join(&rate_file));
        entries.push(SeriesEntry {
            filters: &run.filters,
            in_grid_samples: run.series.samples,
            out_of_grid_samples: run.series.overflow,
            total_bytes: run.series.total_bytes(),
            stream_total_bytes: run.series.stream_total_bytes,
            peak_mbps: rate.values.iter().copied().fold(0.0, f64::max),
            series_file,
            rate_file,
        });
    }
    let meta_path = out.join(format!("{command}.json"));
    write_json(&meta_path, &metadata(command, config, config.vehicle_model()?.map_mode(), entries))?;
    written.push(meta_path);
    Ok(written)
}

/// Sweep summary `sweep.csv`: one row per fraction.
pub fn write_sweep_summary(out: &Path, runs: &[FractionRun]) -> Result<PathBuf> {
    let path = out.join("sweep.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    let err = |e: csv::Error| Error::config(format!("writing sweep summary: {e}"));
    w.write_record(["fraction", "vehicles_selected", "selected_samples", "total_bytes", "bytes_per_sample", "peak_mbps"]).map_err(err)?;
    for run in runs {
        let total = run.series.total_bytes();
        let per = if run.series.samples > 0 { total / run.series.samples as f64 } else { 0.0 };
        let peak = to_mbps(&run.series).values.iter().copied().fold(0.0, f64::max);
        w.write_record([
            run.filters.fraction.to_string(),
            run.filters.vehicles_selected.to_string(),
            run.series.samples.to_string(),
            total.to_string(),
            per.to_string(),
            peak.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[derive(Serialize)]
struct ApEntry<'a> {
    #[serde(flatten)]
    filters: &'a FilterReport,
    assigned_samples: u64,
    out_of_grid_samples: u64,
    table_file: String,
    hotspots: &'a HotspotSummary,
}

/// Writes `ap_load_<p>.csv` per fraction and `ap-load.json`.
pub fn write_ap_outputs(out: &Path, config: &RunConfig, runs: &[ApLoadRun]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for run in runs {
        let table_file = format!("ap_load_{}.csv", fraction_label(run.filters.fraction));
        run.table.write_csv(create(&out.join(&table_file))?)?;
        written.push(out.join(&table_file));
        entries.push(ApEntry {
            filters: &run.filters,
            assigned_samples: run.table.assigned_samples(),
            out_of_grid_samples: run.table.overflow(),
            table_file,
            hotspots: &run.hotspots,
        });
    }
    let meta_path = out.join("ap-load.json");
    write_json(&meta_path, &metadata("ap-load", config, config.vehicle_model()?.map_mode(), entries))?;
    written.push(meta_path);
    Ok(written)
}

/// Writes `compare.csv` and `compare.json`.
pub fn write_compare_outputs(out: &Path, report: &ComparisonReport) -> Result<Vec<PathBuf>> {
    let csv_path = out.join("compare.csv");
    report.write_csv(create(&csv_path)?)?;
    let json_path = out.join("compare.json");
    write_json(&json_path, report)?;
    Ok(vec![csv_path, json_path])
}

pub fn write_model_outputs(out: &Path, breakdown: &ModelBreakdown) -> Result<Vec<PathBuf>> {
    let path = out.join("model.json");
    write_json(&path, breakdown)?;
    Ok(vec![path])
}
