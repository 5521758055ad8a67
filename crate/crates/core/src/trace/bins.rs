use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TraceSample;
use crate::error::{Error, Result};

/// Uniform partition of `[start_s, start_s + bin_count * bin_seconds)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BinGridDoc", into = "BinGridDoc")]
pub struct BinGrid {
    start_s: f64,
    bin_seconds: f64,
    bin_count: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BinGridDoc {
    #[serde(default)]
    start_s: f64,
    bin_seconds: f64,
    bin_count: usize,
}

impl TryFrom<BinGridDoc> for BinGrid {
    type Error = Error;

    fn try_from(d: BinGridDoc) -> Result<Self> {
        BinGrid::new(d.start_s, d.bin_seconds, d.bin_count)
    }
}

impl From<BinGrid> for BinGridDoc {
    fn from(g: BinGrid) -> Self {
        BinGridDoc { start_s: g.start_s, bin_seconds: g.bin_seconds, bin_count: g.bin_count }
    }
}

impl BinGrid {
    pub fn new(start_s: f64, bin_seconds: f64, bin_count: usize) -> Result<Self> {
        if !start_s.is_finite() {
            return Err(Error::parameter(format!("bin grid start must be finite, got {start_s}")));
        }
        if !(bin_seconds.is_finite() && bin_seconds > 0.0) {
            return Err(Error::parameter(format!("bin_seconds must be > 0, got {bin_seconds}")));
        }
        if bin_count == 0 {
            return Err(Error::parameter("bin_count must be positive"));
        }
        Ok(BinGrid { start_s, bin_seconds, bin_count })
    }

    pub fn start_s(&self) -> f64 {
        self.start_s
    }

    pub fn bin_seconds(&self) -> f64 {
        self.bin_seconds
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn end_s(&self) -> f64 {
        self.bin_start(self.bin_count)
    }

    pub fn bin_start(&self, index: usize) -> f64 {
        self.start_s + index as f64 * self.bin_seconds
    }

    /// Index of the bin containing `t`, or `None` outside the grid.
    pub fn bin_of(&self, t: f64) -> Option<usize> {
        if t.is_nan() || t < self.start_s {
            return None;
        }
        let mut idx = ((t - self.start_s) / self.bin_seconds).floor() as usize;
        // Correct for division rounding at bin edges.
        if idx > 0 && t < self.bin_start(idx) {
            idx -= 1;
        } else if t >= self.bin_start(idx + 1) {
            idx += 1;
        }
        (idx < self.bin_count).then_some(idx)
    }
}

/// Distinct vehicles per bin, computed in one pass.
///
/// Memory is one entry per vehicle plus one counter per bin. Each vehicle's
/// samples must arrive in non-decreasing time order.
#[derive(Debug, Clone)]
pub struct ActiveVehicleCounter {
    bins: BinGrid,
    counts: Vec<u64>,
    /// First and last bin each vehicle was seen in.
    span: HashMap<String, (usize, usize)>,
    overflow: u64,
}

impl ActiveVehicleCounter {
    pub fn new(bins: BinGrid) -> Self {
        ActiveVehicleCounter { bins, counts: vec![0; bins.bin_count()], span: HashMap::new(), overflow: 0 }
    }

    pub fn observe(&mut self, sample: &TraceSample) {
        let Some(bin) = self.bins.bin_of(sample.time_s) else {
            self.overflow += 1;
            return;
        };
        match self.span.get_mut(&sample.vehicle_id) {
            Some((_, last)) if *last == bin => {}
            Some((_, last)) => {
                *last = bin;
                self.counts[bin] += 1;
            }
            None => {
                self.span.insert(sample.vehicle_id.clone(), (bin, bin));
                self.counts[bin] += 1;
            }
        }
    }

    /// Combines with a counter fed with strictly later samples of the same
    /// trace. A vehicle seen in the same bin on both sides is counted once.
    pub fn merge(mut self, later: ActiveVehicleCounter) -> Result<Self> {
        if self.bins != later.bins {
            return Err(Error::parameter("cannot merge counters over different bin grids"));
        }
        for (c, l) in self.counts.iter_mut().zip(&later.counts) {
            *c += l;
        }
        for (id, (first, last)) in later.span {
            match self.span.get_mut(&id) {
                Some((_, mine)) => {
                    if *mine == first {
                        self.counts[first] -= 1;
                    }
                    *mine = last;
                }
                None => {
                    self.span.insert(id, (first, last));
                }
            }
        }
        self.overflow += later.overflow;
        Ok(self)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Samples that fell outside the grid.
    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn into_counts(self) -> (Vec<u64>, u64) {
        (self.counts, self.overflow)
    }
}

/// Per-bin distinct-vehicle counts and the number of out-of-grid samples.
pub fn active_vehicle_counts<I>(samples: I, bins: BinGrid) -> Result<(Vec<u64>, u64)>
where
    I: IntoIterator<Item = Result<TraceSample>>,
{
    let mut counter = ActiveVehicleCounter::new(bins);
    for s in samples {
        counter.observe(&s?);
    }
    Ok(counter.into_counts())
}
