use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::{IntensityProfile, DEFAULT_MEAN_RATE};
use crate::trace::{BinGrid, LocalProjection, Region};
use crate::workload::{parse_vehicle_model, reference_model, MapMode, VehicleModel, DEFAULT_WINDOW_SECONDS};

use super::io;

/// Fractions used by `sweep` when the configuration lists none.
pub const DEFAULT_SWEEP_FRACTIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

/// Everything a run needs, loaded from one TOML document.
///
/// Relative paths are resolved against the directory of the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Fleet size used by the analytic breakdown.
    #[serde(default = "default_fleet_size")]
    pub fleet_size: u64,
    #[serde(default = "default_window")]
    pub window_seconds: f64,
    /// Time-averaged learning intensity, events per vehicle per second.
    #[serde(default = "default_mean_rate")]
    pub mean_learning_rate: f64,
    /// Time represented by one trace sample.
    #[serde(default = "default_sample_period")]
    pub sample_period_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penetration: Option<Vec<f64>>,
    /// Overrides the map mode of the vehicle model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_mode: Option<MapMode>,
    /// Trace, region and AP coordinates are longitude/latitude degrees.
    #[serde(default)]
    pub geographic: bool,
    #[serde(default = "default_bins")]
    pub bins: BinGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle: Option<VehicleModel<f64>>,
    #[serde(default, skip_serializing_if = "IntensityConfig::is_empty")]
    pub intensity: IntensityConfig,
    #[serde(default)]
    pub paths: Paths,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityConfig {
    /// 24 hour-of-day event counts; only their shape is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hourly_counts: Option<Vec<f64>>,
    /// Explicit piecewise-constant profile (`rates.len() + 1` breakpoints).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wraparound: Option<bool>,
}

impl IntensityConfig {
    fn is_empty(&self) -> bool {
        *self == IntensityConfig::default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aps: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hourly_counts: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<PathBuf>,
    /// Vehicle model document, used when `[vehicle]` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_fleet_size() -> u64 {
    100
}
fn default_window() -> f64 {
    DEFAULT_WINDOW_SECONDS
}
fn default_mean_rate() -> f64 {
    DEFAULT_MEAN_RATE
}
fn default_sample_period() -> f64 {
    1.0
}
fn default_bins() -> BinGrid {
    BinGrid::new(0.0, 3600.0, 24).expect("valid default grid")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            fleet_size: default_fleet_size(),
            window_seconds: default_window(),
            mean_learning_rate: default_mean_rate(),
            sample_period_s: default_sample_period(),
            penetration: None,
            map_mode: None,
            geographic: false,
            bins: default_bins(),
            region: None,
            vehicle: None,
            intensity: IntensityConfig::default(),
            paths: Paths::default(),
        }
    }
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trace: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub bin_seconds: Option<f64>,
    pub penetration: Option<Vec<f64>>,
    pub map_mode: Option<MapMode>,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::config(e.message().trim().to_string()))?;
        cfg.paths.resolve(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        crate::workload::check_positive(self.window_seconds, "window_seconds")?;
        crate::workload::check_positive(self.mean_learning_rate, "mean_learning_rate")?;
        crate::workload::check_positive(self.sample_period_s, "sample_period_s")?;
        if let Some(fr) = &self.penetration {
            if fr.is_empty() {
                return Err(Error::config("penetration list is empty"));
            }
            if let Some(f) = fr.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                return Err(Error::config(format!("penetration fraction {f} outside [0, 1]")));
            }
        }
        if self.geographic && self.region.is_none() {
            return Err(Error::config("geographic coordinates need a region to anchor the projection"));
        }
        if self.vehicle.is_some() && self.paths.vehicle.is_some() {
            return Err(Error::config("give either [vehicle] or paths.vehicle, not both"));
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(t) = &o.trace {
            self.paths.trace = Some(t.clone());
        }
        if let Some(d) = &o.out {
            self.paths.out = Some(d.clone());
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(w) = o.bin_seconds {
            // Keep the covered span, rounding the bin count up.
            let span = self.bins.end_s() - self.bins.start_s();
            let count = (span / w - 1e-9).ceil().max(1.0) as usize;
            self.bins = BinGrid::new(self.bins.start_s(), w, count)?;
        }
        if let Some(p) = &o.penetration {
            self.penetration = Some(p.clone());
        }
        if let Some(m) = o.map_mode {
            self.map_mode = Some(m);
        }
        self.validate()
    }

    /// Vehicle model with the map-mode override applied.
    pub fn vehicle_model(&self) -> Result<VehicleModel<f64>> {
        let model = match (&self.vehicle, &self.paths.vehicle) {
            (Some(m), _) => m.clone(),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_vehicle_model(&text).map_err(|e| match e {
                    Error::Config(m) => Error::config(format!("{}: {m}", path.display())),
                    other => other,
                })?
            }
            (None, None) => reference_model(),
        };
        Ok(match self.map_mode {
            Some(mode) => model.with_map_mode(mode),
            None => model,
        })
    }

    pub fn intensity_profile(&self) -> Result<IntensityProfile<f64>> {
        let ic = &self.intensity;
        let sources = [ic.hourly_counts.is_some(), ic.breakpoints.is_some() || ic.rates.is_some(), self.paths.hourly_counts.is_some()];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return Err(Error::config("give one intensity source: hourly_counts, breakpoints/rates, or paths.hourly_counts"));
        }
        if let Some(path) = &self.paths.hourly_counts {
            let counts = io::load_hourly_counts(path)?;
            return IntensityProfile::from_hourly_counts(&counts, self.mean_learning_rate);
        }
        if let Some(counts) = &ic.hourly_counts {
            return IntensityProfile::from_hourly_counts(counts, self.mean_learning_rate);
        }
        match (&ic.breakpoints, &ic.rates) {
            (Some(b), Some(r)) => IntensityProfile::from_pieces(b.clone(), r.clone(), ic.wraparound.unwrap_or(true)),
            (None, None) => IntensityProfile::flat(self.mean_learning_rate),
            _ => Err(Error::config("intensity breakpoints and rates must be given together")),
        }
    }

    pub fn generate_fractions(&self) -> Vec<f64> {
        self.penetration.clone().unwrap_or_else(|| vec![1.0])
    }

    pub fn sweep_fractions(&self) -> Vec<f64> {
        self.penetration.clone().unwrap_or_else(|| DEFAULT_SWEEP_FRACTIONS.to_vec())
    }

    /// Projection for geographic runs, centred on the region.
    pub fn projection(&self) -> Option<LocalProjection> {
        if !self.geographic {
            return None;
        }
        self.region.as_ref().map(|r| {
            let (lon, lat) = r.centroid();
            LocalProjection::new(lon, lat)
        })
    }

    /// Region in planar coordinates.
    pub fn planar_region(&self) -> Result<Option<Region>> {
        match (&self.region, self.projection()) {
            (Some(r), Some(p)) => Ok(Some(r.map_points(|x, y| p.project(x, y))?)),
            (r, _) => Ok(r.clone()),
        }
    }

    pub fn require_trace(&self) -> Result<&Path> {
        self.paths.trace.as_deref().ok_or_else(|| Error::config("no trace path (set paths.trace or --trace)"))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("serializing config: {e}")))
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        for p in [&mut self.trace, &mut self.aps, &mut self.hourly_counts, &mut self.baseline, &mut self.vehicle, &mut self.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}
