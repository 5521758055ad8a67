//! Trace-driven edge-to-cloud offloading workload generator for autonomous
//! vehicle fleets.
//!
//! The analytic model ([`workload`]) turns sensor and policy parameters into
//! expected telemetry, fleet-learning and map-update rates. Mobility traces
//! ([`trace`]) decide where and when those rates are produced; [`spatial`]
//! attributes them to access points and [`report`] drives the end-to-end runs
//! behind the `fleetload` command.

pub mod attribution;
pub mod error;
pub mod hash;
pub mod intensity;
pub mod report;
pub mod scalar;
pub mod spatial;
pub mod stats;
pub mod synth;
pub mod trace;
pub mod workload;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use trace::{BinGrid, Region, TraceSample};
pub use workload::{MapMode, MonteCarloParams};

/// Double-precision instantiations used by the trace-driven pipeline.
pub type SensorSpec = workload::SensorSpec<f64>;
pub type MapPolicy = workload::MapPolicy<f64>;
pub type VehicleModel = workload::VehicleModel<f64>;
pub type WorkloadRates = workload::WorkloadRates<f64>;
pub type MonteCarloOutcome = workload::MonteCarloOutcome<f64>;
pub type IntensityProfile = intensity::IntensityProfile<f64>;

/// Single-precision instantiations.
pub type VehicleModelF32 = workload::VehicleModel<f32>;
pub type WorkloadRatesF32 = workload::WorkloadRates<f32>;
pub type IntensityProfileF32 = intensity::IntensityProfile<f32>;
