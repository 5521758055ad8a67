use std::collections::HashMap;

use serde::Serialize;

use super::{LocalProjection, Region, TraceSample};
use crate::error::{Error, Result};
use crate::hash::{hash64, unit_interval};

/// Sample accounting for one filter stage; `seen == kept + dropped`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StreamStats {
    pub seen: u64,
    pub kept: u64,
    pub dropped: u64,
}

impl StreamStats {
    fn record(&mut self, keep: bool) {
        self.seen += 1;
        if keep {
            self.kept += 1;
        } else {
            self.dropped += 1;
        }
    }
}

/// Rejects a stream in which some vehicle's timestamps decrease.
///
/// Errors carry the 1-based record index in place of a line number.
pub struct OrderCheck<I> {
    inner: I,
    source_name: String,
    records: u64,
    last: HashMap<String, f64>,
    failed: bool,
}

impl<I> OrderCheck<I> {
    pub fn new(inner: I, source_name: impl Into<String>) -> Self {
        OrderCheck { inner, source_name: source_name.into(), records: 0, last: HashMap::new(), failed: false }
    }
}

impl<I: Iterator<Item = Result<TraceSample>>> Iterator for OrderCheck<I> {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let item = self.inner.next()?;
        self.records += 1;
        let item = item.and_then(|s| {
            match self.last.get_mut(&s.vehicle_id) {
                Some(prev) if s.time_s < *prev => {
                    return Err(Error::parse(
                        &self.source_name,
                        self.records,
                        format!("record {}: vehicle {} goes back in time: t = {} after t = {}", self.records, s.vehicle_id, s.time_s, prev),
                    ));
                }
                Some(prev) => *prev = s.time_s,
                None => {
                    self.last.insert(s.vehicle_id.clone(), s.time_s);
                }
            }
            Ok(s)
        });
        if item.is_err() {
            self.failed = true;
        }
        Some(item)
    }
}

/// Keeps samples inside (or on the boundary of) a region.
pub struct RegionFilter<I> {
    inner: I,
    region: Region,
    stats: StreamStats,
}

impl<I> RegionFilter<I> {
    pub fn new(inner: I, region: Region) -> Self {
        RegionFilter { inner, region, stats: StreamStats::default() }
    }

    pub fn stats(&self) -> StreamStats {
        self.stats
    }
}

impl<I: Iterator<Item = Result<TraceSample>>> Iterator for RegionFilter<I> {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.inner.next()? {
                Ok(s) => {
                    let keep = self.region.contains(s.x, s.y);
                    self.stats.record(keep);
                    if keep {
                        return Some(Ok(s));
                    }
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Deterministic per-vehicle selection: `hash64(seed, id) / 2^64 < fraction`.
///
/// Raising `fraction` only ever adds vehicles to the selected set.
pub fn selects_vehicle(seed: u64, vehicle_id: &str, fraction: f64) -> bool {
    unit_interval(hash64(seed, vehicle_id)) < fraction
}

/// Keeps every sample of the selected vehicles and none of the others.
pub struct PenetrationFilter<I> {
    inner: I,
    seed: u64,
    fraction: f64,
    decisions: HashMap<String, bool>,
    stats: StreamStats,
}

impl<I> PenetrationFilter<I> {
    pub fn new(inner: I, fraction: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::parameter(format!("penetration fraction must lie in [0, 1], got {fraction}")));
        }
        Ok(PenetrationFilter { inner, seed, fraction, decisions: HashMap::new(), stats: StreamStats::default() })
    }

    pub fn stats(&self) -> StreamStats {
        self.stats
    }

    /// Distinct vehicles seen so far and how many of them were selected.
    pub fn vehicle_counts(&self) -> (u64, u64) {
        let selected = self.decisions.values().filter(|&&d| d).count() as u64;
        (self.decisions.len() as u64, selected)
    }
}

impl<I: Iterator<Item = Result<TraceSample>>> Iterator for PenetrationFilter<I> {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.inner.next()? {
                Ok(s) => {
                    let keep = match self.decisions.get(&s.vehicle_id) {
                        Some(&d) => d,
                        None => {
                            let d = selects_vehicle(self.seed, &s.vehicle_id, self.fraction);
                            self.decisions.insert(s.vehicle_id.clone(), d);
                            d
                        }
                    };
                    self.stats.record(keep);
                    if keep {
                        return Some(Ok(s));
                    }
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Projects longitude/latitude samples to local planar metres.
pub struct ProjectToPlane<I> {
    inner: I,
    projection: LocalProjection,
}

impl<I> ProjectToPlane<I> {
    pub fn new(inner: I, projection: LocalProjection) -> Self {
        ProjectToPlane { inner, projection }
    }
}

impl<I: Iterator<Item = Result<TraceSample>>> Iterator for ProjectToPlane<I> {
    type Item = Result<TraceSample>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.inner.next()?.and_then(|mut s| {
            if !LocalProjection::is_geographic(s.x, s.y) {
                return Err(Error::parse(
                    "trace",
                    0,
                    format!("vehicle {} at t = {}: ({}, {}) is not a longitude/latitude pair", s.vehicle_id, s.time_s, s.x, s.y),
                ));
            }
            (s.x, s.y) = self.projection.project(s.x, s.y);
            Ok(s)
        }))
    }
}

pub fn filter_region<I>(samples: I, region: Region) -> RegionFilter<I::IntoIter>
where
    I: IntoIterator<Item = Result<TraceSample>>,
{
    RegionFilter::new(samples.into_iter(), region)
}

pub fn sample_penetration<I>(samples: I, fraction: f64, seed: u64) -> Result<PenetrationFilter<I::IntoIter>>
where
    I: IntoIterator<Item = Result<TraceSample>>,
{
    PenetrationFilter::new(samples.into_iter(), fraction, seed)
}
