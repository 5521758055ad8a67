//! Time-varying fleet-learning intensity.
//!
//! A profile is piecewise constant over half-open intervals
//! `[breakpoints[i], breakpoints[i + 1])`, in learning events per vehicle per
//! second. Profiles built from hourly counts keep only the diurnal shape of the
//! counts; the absolute level comes from the configured mean rate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const HOURS_PER_DAY: usize = 24;

/// Default mean learning intensity, events per vehicle per second.
pub const DEFAULT_MEAN_RATE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityProfile<T> {
    breakpoints: Vec<T>,
    rates: Vec<T>,
    wraparound: bool,
}

impl<T: Scalar> IntensityProfile<T> {
    /// Builds a profile from explicit breakpoints and per-interval rates.
    pub fn from_pieces(breakpoints: Vec<T>, rates: Vec<T>, wraparound: bool) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::parameter("intensity profile needs at least two breakpoints"));
        }
        if rates.len() + 1 != breakpoints.len() {
            return Err(Error::parameter(format!("intensity profile has {} breakpoints but {} rates", breakpoints.len(), rates.len())));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parameter("intensity breakpoints must be finite and strictly ascending"));
        }
        if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r >= T::zero())) {
            return Err(Error::parameter(format!("intensity rate must be finite and >= 0, got {r}")));
        }
        Ok(IntensityProfile { breakpoints, rates, wraparound })
    }

    /// Diurnal profile over `[0, 86400)` shaped like `hourly_counts` with a
    /// time average of `mean_rate`. Wraparound is enabled.
    pub fn from_hourly_counts(hourly_counts: &[T], mean_rate: T) -> Result<Self> {
        if hourly_counts.len() != HOURS_PER_DAY {
            return Err(Error::parameter(format!("expected {HOURS_PER_DAY} hourly counts, got {}", hourly_counts.len())));
        }
        if let Some(c) = hourly_counts.iter().find(|c| !(c.is_finite() && **c >= T::zero())) {
            return Err(Error::parameter(format!("hourly count must be finite and >= 0, got {c}")));
        }
        if !(mean_rate.is_finite() && mean_rate > T::zero()) {
            return Err(Error::parameter(format!("mean learning rate must be > 0, got {mean_rate}")));
        }
        let total: T = hourly_counts.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::parameter("hourly counts are all zero; profile shape is undefined"));
        }
        let mean = total / T::of(HOURS_PER_DAY as f64);
        let rates = hourly_counts.iter().map(|&c| mean_rate * c / mean).collect();
        let hour = T::of(3600.0);
        let breakpoints = (0..=HOURS_PER_DAY).map(|h| T::of(h as f64) * hour).collect();
        Self::from_pieces(breakpoints, rates, true)
    }

    /// Constant rate over one day, with wraparound.
    pub fn flat(rate: T) -> Result<Self> {
        Self::from_pieces(vec![T::zero(), T::of(SECONDS_PER_DAY)], vec![rate], true)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn rates(&self) -> &[T] {
        &self.rates
    }

    pub fn wraparound(&self) -> bool {
        self.wraparound
    }

    pub fn start(&self) -> T {
        self.breakpoints[0]
    }

    pub fn end(&self) -> T {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn span(&self) -> T {
        self.end() - self.start()
    }

    /// Rate of the interval containing `t`.
    pub fn rate_at(&self, t: T) -> Result<T> {
        let start = self.start();
        let t = if t >= start && t < self.end() {
            t
        } else if self.wraparound && t.is_finite() {
            let span = self.span();
            let mut off = (t - start) % span;
            if off < T::zero() {
                off = off + span;
            }
            // A tiny negative remainder can round up to exactly `span`.
            if off >= span {
                off = T::zero();
            }
            start + off
        } else {
            return Err(Error::Range(format!("t = {t} outside intensity profile [{start}, {})", self.end())));
        };
        let idx = self.breakpoints.partition_point(|&b| b <= t) - 1;
        Ok(self.rates[idx.min(self.rates.len() - 1)])
    }

    /// Integral of the rate over the profile span.
    pub fn integral(&self) -> T {
        self.rates.iter().zip(self.breakpoints.windows(2)).map(|(&r, w)| r * (w[1] - w[0])).sum()
    }

    pub fn time_average(&self) -> T {
        self.integral() / self.span()
    }
}
