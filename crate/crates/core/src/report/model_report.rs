use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::workload::{MapMode, VehicleModel, WorkloadRates};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalityRate {
    pub modality: String,
    pub raw_bps: f64,
}

/// Every intermediate of the analytic model for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelBreakdown {
    pub map_mode: MapMode,
    pub fleet_size: u64,
    pub lambda: f64,
    pub window_seconds: f64,
    pub per_modality: Vec<ModalityRate>,
    pub raw_bps: f64,
    pub telemetry_bps: f64,
    pub learning_artifact_bytes: f64,
    pub learning_bps: f64,
    pub map_artifact_bytes: f64,
    pub map_bps: f64,
    pub vehicle: WorkloadRates<f64>,
    pub fleet: WorkloadRates<f64>,
    pub fleet_mbps: f64,
}

pub fn model_breakdown(model: &VehicleModel<f64>, fleet_size: u64, lambda: f64, window_seconds: f64) -> Result<ModelBreakdown> {
    let vehicle = model.vehicle_rate(lambda, fleet_size, window_seconds)?;
    let fleet = model.fleet_rate(fleet_size, lambda, window_seconds)?;
    Ok(ModelBreakdown {
        map_mode: model.map_mode(),
        fleet_size,
        lambda,
        window_seconds,
        per_modality: model.sensors().iter().map(|s| ModalityRate { modality: s.modality.clone(), raw_bps: s.raw_rate() }).collect(),
        raw_bps: model.vehicle_raw_rate(),
        telemetry_bps: vehicle.telemetry_bps,
        learning_artifact_bytes: model.learning_artifact_size(),
        learning_bps: vehicle.learning_bps,
        map_artifact_bytes: model.map_artifact_size(),
        map_bps: vehicle.map_bps,
        fleet_mbps: fleet.total_bps * 8.0 / 1e6,
        vehicle,
        fleet,
    })
}

impl fmt::Display for ModelBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map_mode = {}", self.map_mode)?;
        writeln!(f, "fleet_size N = {}", self.fleet_size)?;
        writeln!(f, "lambda_L = {} events/vehicle/s", self.lambda)?;
        writeln!(f, "map_window = {} s", self.window_seconds)?;
        for m in &self.per_modality {
            writeln!(f, "R_s[{}] = {} B/s", m.modality, m.raw_bps)?;
        }
        writeln!(f, "R_sv = {} B/s", self.raw_bps)?;
        writeln!(f, "R_T = {} B/s", self.telemetry_bps)?;
        writeln!(f, "S_L = {} B", self.learning_artifact_bytes)?;
        writeln!(f, "R_L = {} B/s", self.learning_bps)?;
        writeln!(f, "S_M = {} B", self.map_artifact_bytes)?;
        writeln!(f, "R_M = {} B/s", self.map_bps)?;
        writeln!(f, "R_v = {} B/s", self.vehicle.total_bps)?;
        writeln!(
            f,
            "R_fleet = {} B/s (telemetry {} + learning {} + map {})",
            self.fleet.total_bps, self.fleet.telemetry_bps, self.fleet.learning_bps, self.fleet.map_bps
        )?;
        writeln!(f, "R_fleet_mbps = {} Mbps", self.fleet_mbps)
    }
}
