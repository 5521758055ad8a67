//! Floating-car-data ingestion and per-sample stream filters.
//!
//! Everything here is a streaming iterator adapter over
//! `Result<TraceSample>`; nothing buffers the whole trace.

mod bins;
mod csv_format;
mod fcd;
mod filters;
mod region;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use bins::{active_vehicle_counts, ActiveVehicleCounter, BinGrid};
pub use csv_format::{CsvTraceReader, CSV_HEADER};
pub use fcd::FcdReader;
pub use filters::{
    filter_region, sample_penetration, selects_vehicle, OrderCheck, PenetrationFilter, ProjectToPlane, RegionFilter, StreamStats,
};
pub use region::{LocalProjection, Region};

use crate::error::{Error, Result};

/// One vehicle position record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub vehicle_id: String,
    /// Seconds since trace start.
    pub time_s: f64,
    pub x: f64,
    pub y: f64,
    pub speed_mps: Option<f64>,
}

impl TraceSample {
    pub fn new(vehicle_id: impl Into<String>, time_s: f64, x: f64, y: f64) -> Self {
        TraceSample { vehicle_id: vehicle_id.into(), time_s, x, y, speed_mps: None }
    }

    pub fn with_speed(mut self, speed_mps: f64) -> Self {
        self.speed_mps = Some(speed_mps);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Fcd,
    Csv,
}

impl TraceFormat {
    /// `.csv` files are CSV, everything else is treated as FCD markup.
    pub fn from_path(path: &Path) -> TraceFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => TraceFormat::Csv,
            _ => TraceFormat::Fcd,
        }
    }
}

pub type SampleStream = Box<dyn Iterator<Item = Result<TraceSample>> + Send>;

/// Opens a trace file as an order-checked sample stream.
pub fn open_trace(path: &Path) -> Result<SampleStream> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let reader = BufReader::new(file);
    Ok(match TraceFormat::from_path(path) {
        TraceFormat::Csv => Box::new(OrderCheck::new(CsvTraceReader::new(reader, name.clone()), name)),
        TraceFormat::Fcd => Box::new(OrderCheck::new(FcdReader::new(reader, name.clone()), name)),
    })
}
