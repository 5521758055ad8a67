//! Event-level simulation of a fleet, used to cross-check the analytic rates.
//!
//! Telemetry accrues deterministically. Learning events are a Poisson process
//! per vehicle; map artifacts are Bernoulli trials per observation window.
//! Each vehicle and component draws from its own substream, and only integer
//! event counts are merged, so serial and parallel runs are bit-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use super::model::{non_negative, positive, MapMode, VehicleModel};
use crate::error::{Error, Result};
use crate::hash::substream;
use crate::scalar::Scalar;

const LEARNING: u64 = 1;
const MAP: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloParams<T> {
    pub fleet_size: u64,
    /// Learning events per vehicle per second.
    pub lambda: T,
    pub horizon_seconds: T,
    /// Length of one map-artifact Bernoulli window.
    pub window_seconds: T,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloOutcome<T> {
    pub telemetry_bytes: T,
    pub learning_bytes: T,
    pub map_bytes: T,
    pub total_bytes: T,
    pub learning_events: u64,
    pub map_artifacts: u64,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Counts {
    learning: u64,
    map: u64,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts { learning: self.learning + other.learning, map: self.map + other.map }
    }
}

struct Sampler<T> {
    learning_mean: f64,
    /// (trials per window, probability) for each window in the horizon.
    windows: Vec<(u64, f64)>,
    seed: u64,
    _t: std::marker::PhantomData<T>,
}

impl<T: Scalar> Sampler<T> {
    fn new(model: &VehicleModel<T>, p: &MonteCarloParams<T>) -> Result<Self> {
        positive(p.horizon_seconds, "horizon_seconds")?;
        positive(p.window_seconds, "window_seconds")?;
        non_negative(p.lambda, "learning intensity")?;

        let horizon = p.horizon_seconds.to_f64_lossy();
        let window = p.window_seconds.to_f64_lossy();
        let prob = model.map_policy().artifact_probability.to_f64_lossy();
        // Under the literal reading each vehicle carries N trials per window.
        let trials = match model.map_mode() {
            MapMode::Paper => p.fleet_size,
            MapMode::PerVehicle => 1,
        };
        let full = (horizon / window).floor();
        let mut windows = vec![(trials, prob); full as usize];
        let rest = horizon - full * window;
        if rest > 0.0 {
            windows.push((trials, prob * rest / window));
        }
        Ok(Sampler { learning_mean: p.lambda.to_f64_lossy() * horizon, windows, seed: p.seed, _t: std::marker::PhantomData })
    }

    fn vehicle(&self, index: u64) -> Result<Counts> {
        let mut counts = Counts::default();
        if self.learning_mean > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(substream(self.seed, &[index, LEARNING]));
            let dist = Poisson::new(self.learning_mean).map_err(|e| Error::parameter(format!("learning event mean: {e}")))?;
            counts.learning = dist.sample(&mut rng) as u64;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(substream(self.seed, &[index, MAP]));
        for &(trials, prob) in &self.windows {
            if prob > 0.0 && trials > 0 {
                let dist = Binomial::new(trials, prob.min(1.0)).map_err(|e| Error::parameter(format!("map trial: {e}")))?;
                counts.map += dist.sample(&mut rng);
            }
        }
        Ok(counts)
    }

    fn outcome(&self, model: &VehicleModel<T>, p: &MonteCarloParams<T>, c: Counts) -> MonteCarloOutcome<T> {
        let telemetry = T::of_u64(p.fleet_size) * (model.telemetry_rate() * p.horizon_seconds);
        let learning = T::of_u64(c.learning) * model.learning_artifact_size();
        let map = T::of_u64(c.map) * model.map_artifact_size();
        MonteCarloOutcome {
            telemetry_bytes: telemetry,
            learning_bytes: learning,
            map_bytes: map,
            total_bytes: telemetry + learning + map,
            learning_events: c.learning,
            map_artifacts: c.map,
        }
    }
}

/// Simulates the fleet over `horizon_seconds`, vehicles processed in parallel.
pub fn monte_carlo_workload<T: Scalar>(model: &VehicleModel<T>, params: &MonteCarloParams<T>) -> Result<MonteCarloOutcome<T>> {
    let sampler = Sampler::new(model, params)?;
    let counts = (0..params.fleet_size).into_par_iter().map(|v| sampler.vehicle(v)).try_reduce(Counts::default, |a, b| Ok(a.merge(b)))?;
    Ok(sampler.outcome(model, params, counts))
}

/// Single-threaded variant; produces the same result as [`monte_carlo_workload`].
pub fn monte_carlo_workload_serial<T: Scalar>(model: &VehicleModel<T>, params: &MonteCarloParams<T>) -> Result<MonteCarloOutcome<T>> {
    let sampler = Sampler::new(model, params)?;
    let mut counts = Counts::default();
    for v in 0..params.fleet_size {
        counts = counts.merge(sampler.vehicle(v)?);
    }
    Ok(sampler.outcome(model, params, counts))
}
