use std::io::Write;

use serde::Serialize;

use crate::attribution::{Attribution, Components};
use crate::error::{Error, Result};
use crate::scalar::rel_eq;
use crate::trace::{ActiveVehicleCounter, BinGrid, TraceSample};

/// Time-binned regional workload, split by data category.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSeries {
    pub label: String,
    pub bins: BinGrid,
    pub bytes: Vec<Components>,
    /// Distinct vehicles with at least one sample per bin.
    pub active_vehicles: Vec<u64>,
    /// In-grid samples attributed.
    pub samples: u64,
    /// Samples outside the grid.
    pub overflow: u64,
    /// Running total kept in stream order, independent of the bins.
    pub stream_total_bytes: f64,
}

impl WorkloadSeries {
    pub fn total_bytes(&self) -> f64 {
        self.bytes.iter().map(Components::total).sum()
    }

    pub fn totals(&self) -> Vec<f64> {
        self.bytes.iter().map(Components::total).collect()
    }

    /// Bin sums must add up to the stream-level counter.
    pub fn check_conservation(&self, rel: f64) -> Result<()> {
        let (binned, streamed) = (self.total_bytes(), self.stream_total_bytes);
        if rel_eq(binned, streamed, rel) {
            Ok(())
        } else {
            Err(Error::Invariant(format!("series {}: binned total {binned} differs from stream total {streamed}", self.label)))
        }
    }

    /// CSV with header
    /// `bin_start_s,active_vehicles,telemetry_bytes,learning_bytes,map_bytes,total_bytes,total_mbps`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::config(format!("writing series: {e}"));
        w.write_record(["bin_start_s", "active_vehicles", "telemetry_bytes", "learning_bytes", "map_bytes", "total_bytes", "total_mbps"])
            .map_err(err)?;
        let mbps = to_mbps(self);
        for (i, c) in self.bytes.iter().enumerate() {
            w.write_record([
                self.bins.bin_start(i).to_string(),
                self.active_vehicles[i].to_string(),
                c.telemetry.to_string(),
                c.learning.to_string(),
                c.map.to_string(),
                c.total().to_string(),
                mbps.values[i].to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::config(format!("writing series: {e}")))
    }
}

/// Bins the expected workload of a time-ordered sample stream.
pub fn accumulate_series<I>(samples: I, attribution: &Attribution, bins: BinGrid, label: impl Into<String>) -> Result<WorkloadSeries>
where
    I: IntoIterator<Item = Result<TraceSample>>,
{
    let mut bytes = vec![Components::default(); bins.bin_count()];
    let mut active = ActiveVehicleCounter::new(bins);
    let mut samples_in = 0;
    let mut stream_total = 0.0;
    for s in samples {
        let s = s?;
        active.observe(&s);
        let Some(bin) = bins.bin_of(s.time_s) else {
            continue;
        };
        let b = attribution.sample_bytes(s.time_s)?;
        bytes[bin] += b;
        stream_total += b.total();
        samples_in += 1;
    }
    let (active_vehicles, overflow) = active.into_counts();
    Ok(WorkloadSeries {
        label: label.into(),
        bins,
        bytes,
        active_vehicles,
        samples: samples_in,
        overflow,
        stream_total_bytes: stream_total,
    })
}

/// Uniformly binned rate in megabits per second.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSeries {
    pub label: String,
    pub start_s: f64,
    pub bin_seconds: f64,
    pub values: Vec<f64>,
}

impl RateSeries {
    pub fn new(label: impl Into<String>, start_s: f64, bin_seconds: f64, values: Vec<f64>) -> Result<Self> {
        if !(bin_seconds.is_finite() && bin_seconds > 0.0) || !start_s.is_finite() {
            return Err(Error::parameter(format!("rate series grid invalid: start {start_s}, width {bin_seconds}")));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::parameter(format!("rate series value must be finite and >= 0, got {v}")));
        }
        Ok(RateSeries { label: label.into(), start_s, bin_seconds, values })
    }

    pub fn end_s(&self) -> f64 {
        self.start_s + self.values.len() as f64 * self.bin_seconds
    }

    pub fn bin_start(&self, i: usize) -> f64 {
        self.start_s + i as f64 * self.bin_seconds
    }

    /// CSV with header `bin_start_s,mbps`, the same format as baseline input.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::config(format!("writing rate series: {e}"));
        w.write_record(["bin_start_s", "mbps"]).map_err(err)?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.bin_start(i).to_string(), v.to_string()]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::config(format!("writing rate series: {e}")))
    }
}

/// Megabits per second: `bytes * 8 / (bin_seconds * 1e6)`.
pub fn to_mbps(series: &WorkloadSeries) -> RateSeries {
    let w = series.bins.bin_seconds();
    RateSeries {
        label: series.label.clone(),
        start_s: series.bins.start_s(),
        bin_seconds: w,
        values: series.bytes.iter().map(|c| c.total() * 8.0 / (w * 1e6)).collect(),
    }
}
