//! Per-vehicle and fleet-level expected offloading rates.
//!
//! Rates are bytes per second, sizes are bytes. The learning intensity is in
//! events per vehicle per second and the map-artifact probability applies per
//! observation window.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One sensor modality mounted on every vehicle of the fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec<T> {
    pub modality: String,
    /// Sensors of this modality per vehicle.
    pub count: u32,
    pub frequency_hz: T,
    /// Encoded bytes per measurement.
    pub sample_bytes: T,
    /// Share of the raw stream sent continuously as telemetry.
    pub telemetry_fraction: T,
    /// Share of the raw stream retained in a fleet-learning segment.
    pub learning_fraction: T,
    /// Compression ratio applied to the retained learning data.
    pub learning_compression: T,
}

impl<T: Scalar> SensorSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let name = &self.modality;
        if name.is_empty() {
            return Err(Error::parameter("sensor modality label is empty"));
        }
        non_negative(self.frequency_hz, &format!("{name}.frequency_hz"))?;
        non_negative(self.sample_bytes, &format!("{name}.sample_bytes"))?;
        unit_interval(self.telemetry_fraction, &format!("{name}.telemetry_fraction"))?;
        unit_interval(self.learning_fraction, &format!("{name}.learning_fraction"))?;
        unit_interval(self.learning_compression, &format!("{name}.learning_compression"))?;
        Ok(())
    }

    /// Raw generation rate of this modality: count × frequency × sample size.
    pub fn raw_rate(&self) -> T {
        T::of_u64(u64::from(self.count)) * self.frequency_hz * self.sample_bytes
    }
}

/// Which reading of the fleet factor in the map-update rate is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapMode {
    /// Literal form: the per-vehicle map term already carries the fleet size,
    /// so the fleet-level map term grows with N².
    #[serde(alias = "paper-fidelity")]
    Paper,
    /// Per-vehicle contribution only; fleet-level map load is linear in N.
    #[default]
    PerVehicle,
}

impl MapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MapMode::Paper => "paper",
            MapMode::PerVehicle => "per-vehicle",
        }
    }
}

impl fmt::Display for MapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper-fidelity" => Ok(MapMode::Paper),
            "per-vehicle" => Ok(MapMode::PerVehicle),
            other => Err(Error::config(format!("unknown map mode {other:?} (expected paper or per-vehicle)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapPolicy<T> {
    /// Probability that a vehicle produces a map artifact in one window.
    pub artifact_probability: T,
    pub features_per_artifact: u32,
    pub bytes_per_feature: T,
    #[serde(default)]
    pub mode: MapMode,
}

impl<T: Scalar> MapPolicy<T> {
    pub fn validate(&self) -> Result<()> {
        unit_interval(self.artifact_probability, "map_policy.artifact_probability")?;
        non_negative(self.bytes_per_feature, "map_policy.bytes_per_feature")
    }
}

/// Full per-vehicle parameterization.
///
/// Sensors are kept sorted by modality label so every sum over modalities is
/// evaluated in the same order regardless of how the configuration lists them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VehicleModelDoc<T>", into = "VehicleModelDoc<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct VehicleModel<T> {
    sensors: Vec<SensorSpec<T>>,
    learning_segment_seconds: T,
    map_policy: MapPolicy<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleModelDoc<T> {
    #[serde(default)]
    sensors: Vec<SensorSpec<T>>,
    learning_segment_seconds: T,
    map_policy: MapPolicy<T>,
}

impl<T: Scalar> TryFrom<VehicleModelDoc<T>> for VehicleModel<T> {
    type Error = Error;

    fn try_from(doc: VehicleModelDoc<T>) -> Result<Self> {
        VehicleModel::new(doc.sensors, doc.learning_segment_seconds, doc.map_policy)
    }
}

impl<T: Scalar> From<VehicleModel<T>> for VehicleModelDoc<T> {
    fn from(m: VehicleModel<T>) -> Self {
        VehicleModelDoc { sensors: m.sensors, learning_segment_seconds: m.learning_segment_seconds, map_policy: m.map_policy }
    }
}

impl<T: Scalar> VehicleModel<T> {
    pub fn new(mut sensors: Vec<SensorSpec<T>>, learning_segment_seconds: T, map_policy: MapPolicy<T>) -> Result<Self> {
        for s in &sensors {
            s.validate()?;
        }
        sensors.sort_by(|a, b| a.modality.cmp(&b.modality));
        if let Some(w) = sensors.windows(2).find(|w| w[0].modality == w[1].modality) {
            return Err(Error::parameter(format!("duplicate sensor modality {:?}", w[0].modality)));
        }
        non_negative(learning_segment_seconds, "learning_segment_seconds")?;
        map_policy.validate()?;
        Ok(VehicleModel { sensors, learning_segment_seconds, map_policy })
    }

    pub fn sensors(&self) -> &[SensorSpec<T>] {
        &self.sensors
    }

    pub fn learning_segment_seconds(&self) -> T {
        self.learning_segment_seconds
    }

    pub fn map_policy(&self) -> &MapPolicy<T> {
        &self.map_policy
    }

    pub fn map_mode(&self) -> MapMode {
        self.map_policy.mode
    }

    /// Same model with a different map mode.
    pub fn with_map_mode(mut self, mode: MapMode) -> Self {
        self.map_policy.mode = mode;
        self
    }

    /// Aggregate raw sensor generation rate of one vehicle.
    pub fn vehicle_raw_rate(&self) -> T {
        self.sensors.iter().map(SensorSpec::raw_rate).sum()
    }

    /// Continuous telemetry offload rate of one vehicle.
    pub fn telemetry_rate(&self) -> T {
        self.sensors.iter().map(|s| s.telemetry_fraction * s.raw_rate()).sum()
    }

    /// Expected size of one fleet-learning artifact.
    pub fn learning_artifact_size(&self) -> T {
        let per_second: T = self.sensors.iter().map(|s| s.learning_compression * s.learning_fraction * s.raw_rate()).sum();
        self.learning_segment_seconds * per_second
    }

    /// Expected learning offload rate at intensity `lambda` (events/vehicle/s).
    pub fn learning_rate(&self, lambda: T) -> Result<T> {
        non_negative(lambda, "learning intensity")?;
        Ok(lambda * self.learning_artifact_size())
    }

    pub fn map_artifact_size(&self) -> T {
        T::of_u64(u64::from(self.map_policy.features_per_artifact)) * self.map_policy.bytes_per_feature
    }

    /// Map-update rate attributed to one vehicle under the configured mode.
    ///
    /// `Paper` multiplies by `fleet_size`; `PerVehicle` ignores it.
    pub fn map_rate(&self, fleet_size: u64, window_seconds: T) -> Result<T> {
        self.map_rate_in_mode(self.map_policy.mode, fleet_size, window_seconds)
    }

    pub fn map_rate_in_mode(&self, mode: MapMode, fleet_size: u64, window_seconds: T) -> Result<T> {
        positive(window_seconds, "window_seconds")?;
        let per_vehicle = self.map_policy.artifact_probability * self.map_artifact_size() / window_seconds;
        Ok(match mode {
            MapMode::Paper => T::of_u64(fleet_size) * per_vehicle,
            MapMode::PerVehicle => per_vehicle,
        })
    }

    /// Expected uplink rate of a single vehicle, by component.
    pub fn vehicle_rate(&self, lambda: T, fleet_size: u64, window_seconds: T) -> Result<WorkloadRates<T>> {
        Ok(WorkloadRates::from_components(
            self.telemetry_rate(),
            self.learning_rate(lambda)?,
            self.map_rate(fleet_size, window_seconds)?,
            self.map_policy.mode,
        ))
    }

    /// Aggregate rate of `fleet_size` identical vehicles.
    pub fn fleet_rate(&self, fleet_size: u64, lambda: T, window_seconds: T) -> Result<WorkloadRates<T>> {
        Ok(self.vehicle_rate(lambda, fleet_size, window_seconds)?.scaled(T::of_u64(fleet_size)))
    }
}

/// Offloading rates split by data category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadRates<T> {
    pub telemetry_bps: T,
    pub learning_bps: T,
    pub map_bps: T,
    pub total_bps: T,
    pub map_mode: MapMode,
}

impl<T: Scalar> WorkloadRates<T> {
    pub fn from_components(telemetry_bps: T, learning_bps: T, map_bps: T, map_mode: MapMode) -> Self {
        WorkloadRates { telemetry_bps, learning_bps, map_bps, total_bps: telemetry_bps + learning_bps + map_bps, map_mode }
    }

    /// Componentwise multiplication; the total is scaled directly so that
    /// `scaled(n).total_bps == n * total_bps` holds exactly.
    pub fn scaled(&self, factor: T) -> Self {
        WorkloadRates {
            telemetry_bps: factor * self.telemetry_bps,
            learning_bps: factor * self.learning_bps,
            map_bps: factor * self.map_bps,
            total_bps: factor * self.total_bps,
            map_mode: self.map_mode,
        }
    }
}

pub(crate) fn non_negative<T: Scalar>(v: T, what: &str) -> Result<()> {
    if v.is_finite() && v >= T::zero() {
        Ok(())
    } else {
        Err(Error::parameter(format!("{what} must be finite and >= 0, got {v}")))
    }
}

pub(crate) fn positive<T: Scalar>(v: T, what: &str) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::parameter(format!("{what} must be finite and > 0, got {v}")))
    }
}

pub(crate) fn unit_interval<T: Scalar>(v: T, what: &str) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::parameter(format!("{what} must lie in [0, 1], got {v}")))
    }
}
