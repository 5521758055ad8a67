//! Expected-value attribution of offload bytes to individual trace samples.

use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::error::Result;
use crate::intensity::IntensityProfile;
use crate::workload::{MapMode, VehicleModel};

/// Bytes split by data category.
#[derive(Debug, Default, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    pub telemetry: f64,
    pub learning: f64,
    pub map: f64,
}

impl Components {
    pub fn total(&self) -> f64 {
        self.telemetry + self.learning + self.map
    }
}

impl Add for Components {
    type Output = Components;

    fn add(self, o: Components) -> Components {
        Components { telemetry: self.telemetry + o.telemetry, learning: self.learning + o.learning, map: self.map + o.map }
    }
}

impl AddAssign for Components {
    fn add_assign(&mut self, o: Components) {
        *self = *self + o;
    }
}

/// Per-sample expected offload of one vehicle.
///
/// Each sample stands for `sample_period_s` seconds of operation: telemetry at
/// the telemetry rate, learning at `intensity(t) * artifact size`, and map
/// updates at the per-vehicle rate. The map term always uses the per-vehicle
/// reading, since a fleet-coupled map rate has no meaning for a single sample.
#[derive(Debug, Clone)]
pub struct Attribution {
    telemetry_bps: f64,
    learning_artifact_bytes: f64,
    map_bps: f64,
    profile: IntensityProfile<f64>,
    sample_period_s: f64,
}

impl Attribution {
    pub const MAP_MODE: MapMode = MapMode::PerVehicle;

    pub fn new(model: &VehicleModel<f64>, profile: IntensityProfile<f64>, window_seconds: f64, sample_period_s: f64) -> Result<Self> {
        crate::workload::check_positive(sample_period_s, "sample_period_s")?;
        Ok(Attribution {
            telemetry_bps: model.telemetry_rate(),
            learning_artifact_bytes: model.learning_artifact_size(),
            map_bps: model.map_rate_in_mode(Self::MAP_MODE, 1, window_seconds)?,
            profile,
            sample_period_s,
        })
    }

    pub fn sample_period_s(&self) -> f64 {
        self.sample_period_s
    }

    pub fn profile(&self) -> &IntensityProfile<f64> {
        &self.profile
    }

    /// Expected bytes offloaded over one sample period starting at `t`.
    pub fn sample_bytes(&self, t: f64) -> Result<Components> {
        let dt = self.sample_period_s;
        Ok(Components {
            telemetry: self.telemetry_bps * dt,
            learning: self.profile.rate_at(t)? * self.learning_artifact_bytes * dt,
            map: self.map_bps * dt,
        })
    }
}
