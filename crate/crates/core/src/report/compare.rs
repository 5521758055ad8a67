//! Alignment of two rate series and their summary statistics.
//!
//! Both series are resampled onto a common grid whose bin width is the
//! coarser of the two, spanning their overlap. Each target bin takes the
//! overlap-weighted mean of the source bins it covers, so the traffic volume
//! inside the overlap is preserved.

use std::io::Write;

use serde::Serialize;

use super::series::RateSeries;
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakInfo {
    pub bin_start_s: f64,
    /// Hour of day of the peak bin start.
    pub hour_of_day: u32,
    pub mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub av_label: String,
    pub baseline_label: String,
    pub start_s: f64,
    pub bin_seconds: f64,
    pub av_mbps: Vec<f64>,
    pub baseline_mbps: Vec<f64>,
    /// Peak AV rate over peak baseline rate.
    pub peak_ratio: f64,
    pub mean_ratio: f64,
    /// Pearson correlation; `NaN` (serialized as null) with a note when
    /// either aligned series is constant.
    pub correlation: f64,
    pub av_peak: Option<PeakInfo>,
    pub baseline_peak: Option<PeakInfo>,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn bin_start(&self, i: usize) -> f64 {
        self.start_s + i as f64 * self.bin_seconds
    }

    /// CSV with header `bin_start_s,av_mbps,baseline_mbps`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::config(format!("writing comparison: {e}"));
        w.write_record(["bin_start_s", "av_mbps", "baseline_mbps"]).map_err(err)?;
        for (i, (a, b)) in self.av_mbps.iter().zip(&self.baseline_mbps).enumerate() {
            w.write_record([self.bin_start(i).to_string(), a.to_string(), b.to_string()]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::config(format!("writing comparison: {e}")))
    }
}

/// Overlap-weighted mean of `series` over `[lo, hi)`.
fn window_mean(series: &RateSeries, lo: f64, hi: f64) -> f64 {
    let w = series.bin_seconds;
    let first = ((lo - series.start_s) / w).floor().max(0.0) as usize;
    let mut acc = 0.0;
    let mut covered = 0.0;
    for i in first..series.values.len() {
        let a = series.bin_start(i);
        let b = a + w;
        if a >= hi {
            break;
        }
        let overlap = b.min(hi) - a.max(lo);
        if overlap > 0.0 {
            acc += series.values[i] * overlap;
            covered += overlap;
        }
    }
    if covered > 0.0 {
        acc / covered
    } else {
        0.0
    }
}

/// Resamples onto `count` bins of width `width` from `start`, clipped at `end`.
pub fn resample(series: &RateSeries, start: f64, width: f64, count: usize, end: f64) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let lo = start + k as f64 * width;
            window_mean(series, lo, (lo + width).min(end))
        })
        .collect()
}

fn peak(values: &[f64], start: f64, width: f64) -> Option<PeakInfo> {
    stats::argmax(values).map(|i| {
        let t = start + i as f64 * width;
        PeakInfo { bin_start_s: t, hour_of_day: (t.rem_euclid(86_400.0) / 3600.0).floor() as u32, mbps: values[i] }
    })
}

pub fn compare_baseline(av: &RateSeries, baseline: &RateSeries) -> Result<ComparisonReport> {
    let lo = av.start_s.max(baseline.start_s);
    let hi = av.end_s().min(baseline.end_s());
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::parameter(format!(
            "series do not overlap: [{}, {}) vs [{}, {})",
            av.start_s,
            av.end_s(),
            baseline.start_s,
            baseline.end_s()
        )));
    }
    let width = av.bin_seconds.max(baseline.bin_seconds);
    let count = (((hi - lo) / width) - 1e-9).ceil().max(1.0) as usize;
    let a = resample(av, lo, width, count, hi);
    let b = resample(baseline, lo, width, count, hi);

    let mut notes = Vec::new();
    let correlation = stats::pearson(&a, &b);
    if correlation.is_nan() {
        let which: Vec<&str> = [(&a, av.label.as_str()), (&b, baseline.label.as_str())]
            .iter()
            .filter(|(v, _)| v.iter().all(|x| *x == v[0]))
            .map(|(_, l)| *l)
            .collect();
        notes.push(if which.is_empty() {
            "correlation undefined: fewer than two aligned bins".to_string()
        } else {
            format!("correlation undefined: zero variance in {}", which.join(" and "))
        });
    }
    let (max_a, max_b) = (a.iter().copied().fold(0.0, f64::max), b.iter().copied().fold(0.0, f64::max));
    let peak_ratio = if max_b > 0.0 { max_a / max_b } else { f64::NAN };
    if max_b <= 0.0 {
        notes.push("peak ratio undefined: baseline is zero throughout".into());
    }
    let (mean_a, mean_b) = (stats::mean(&a), stats::mean(&b));
    let mean_ratio = if mean_b > 0.0 { mean_a / mean_b } else { f64::NAN };
    if mean_b <= 0.0 {
        notes.push("mean ratio undefined: baseline mean is zero".into());
    }
    if av.bin_seconds != baseline.bin_seconds {
        notes.push(format!("resampled to {width} s bins by overlap-weighted mean"));
    }
    Ok(ComparisonReport {
        av_label: av.label.clone(),
        baseline_label: baseline.label.clone(),
        start_s: lo,
        bin_seconds: width,
        av_peak: peak(&a, lo, width),
        baseline_peak: peak(&b, lo, width),
        av_mbps: a,
        baseline_mbps: b,
        peak_ratio,
        mean_ratio,
        correlation,
        notes,
    })
}
