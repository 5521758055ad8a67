//! Analytic offloading model and its Monte Carlo cross-check.

mod model;
mod monte_carlo;

pub use model::{MapMode, MapPolicy, SensorSpec, VehicleModel, WorkloadRates};
pub use monte_carlo::{monte_carlo_workload, monte_carlo_workload_serial, MonteCarloOutcome, MonteCarloParams};

use serde::de::DeserializeOwned;

pub(crate) use model::positive as check_positive;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Source of the bundled reference parameterization
/// (13 cameras, 4 lidars, 6 radars at 10 Hz).
pub const REFERENCE_MODEL_TOML: &str = include_str!("../../fixtures/table2.toml");

/// Default observation window for map-artifact probabilities, seconds.
pub const DEFAULT_WINDOW_SECONDS: f64 = 3600.0;

/// Parses a vehicle model from a TOML document.
pub fn parse_vehicle_model<T>(text: &str) -> Result<VehicleModel<T>>
where
    T: Scalar + DeserializeOwned,
{
    toml::from_str(text).map_err(|e| Error::config(format!("vehicle model: {}", e.message())))
}

/// The bundled reference parameterization.
pub fn reference_model<T>() -> VehicleModel<T>
where
    T: Scalar + DeserializeOwned,
{
    parse_vehicle_model(REFERENCE_MODEL_TOML).expect("bundled reference model is valid")
}
