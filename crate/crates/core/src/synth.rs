//! Deterministic synthetic traces for demos and tests.
//!
//! Each vehicle makes one trip. Departure hours follow a 24-entry weight
//! vector; origins and destinations are drawn from a mixture of a dense
//! downtown cluster and the uniform city extent, which makes spatial load
//! deliberately uneven.

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::hash::substream;
use crate::trace::TraceSample;

/// Weekday-like departure weights with morning and evening peaks.
pub const DIURNAL_WEIGHTS: [f64; 24] =
    [1.0, 0.6, 0.4, 0.4, 0.6, 1.5, 4.0, 8.0, 9.0, 6.0, 5.0, 5.0, 5.5, 5.5, 5.0, 6.0, 7.5, 9.0, 8.0, 5.5, 4.0, 3.0, 2.0, 1.5];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub vehicles: usize,
    pub seed: u64,
    pub sample_period_s: f64,
    pub min_trip_s: f64,
    pub max_trip_s: f64,
    pub speed_mps: f64,
    /// City extent `[0, width] x [0, height]`, metres.
    pub width: f64,
    pub height: f64,
    pub downtown: (f64, f64),
    pub downtown_sigma: f64,
    /// Probability that a trip endpoint lies in the downtown cluster.
    pub downtown_share: f64,
    pub departure_weights: [f64; 24],
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            vehicles: 200,
            seed: 1,
            sample_period_s: 30.0,
            min_trip_s: 300.0,
            max_trip_s: 1500.0,
            speed_mps: 9.0,
            width: 6000.0,
            height: 4000.0,
            downtown: (1500.0, 2500.0),
            downtown_sigma: 500.0,
            downtown_share: 0.6,
            departure_weights: DIURNAL_WEIGHTS,
        }
    }
}

/// Samples sorted by time, then vehicle id, within `[0, 86400)`.
pub fn generate(cfg: &SynthConfig) -> Result<Vec<TraceSample>> {
    if !(cfg.sample_period_s > 0.0 && cfg.min_trip_s > 0.0 && cfg.max_trip_s >= cfg.min_trip_s) {
        return Err(Error::parameter("synthetic trace needs positive sample period and trip lengths"));
    }
    let hours = WeightedIndex::new(cfg.departure_weights).map_err(|e| Error::parameter(format!("departure weights: {e}")))?;
    let spread = Normal::new(0.0, cfg.downtown_sigma).map_err(|e| Error::parameter(format!("downtown sigma: {e}")))?;
    let width = (cfg.vehicles.max(1) - 1).to_string().len();
    let mut out = Vec::new();
    for v in 0..cfg.vehicles {
        let mut rng = ChaCha8Rng::seed_from_u64(substream(cfg.seed, &[v as u64]));
        let endpoint = |rng: &mut ChaCha8Rng| -> (f64, f64) {
            if rng.random::<f64>() < cfg.downtown_share {
                let x = (cfg.downtown.0 + spread.sample(rng)).clamp(0.0, cfg.width);
                let y = (cfg.downtown.1 + spread.sample(rng)).clamp(0.0, cfg.height);
                (x, y)
            } else {
                (rng.random_range(0.0..=cfg.width), rng.random_range(0.0..=cfg.height))
            }
        };
        let from = endpoint(&mut rng);
        let to = endpoint(&mut rng);
        let hour = hours.sample(&mut rng) as f64;
        let depart = ((hour * 3600.0 + rng.random_range(0.0..3600.0)) / cfg.sample_period_s).floor() * cfg.sample_period_s;
        let duration = rng.random_range(cfg.min_trip_s..=cfg.max_trip_s);
        let steps = (duration / cfg.sample_period_s).round().max(1.0) as usize;
        let (dx, dy) = (to.0 - from.0, to.1 - from.1);
        let dist = (dx * dx + dy * dy).sqrt();
        let id = format!("veh{v:0width$}");
        for k in 0..steps {
            let t = depart + k as f64 * cfg.sample_period_s;
            if t >= 86_400.0 {
                break;
            }
            let travelled = (k as f64 * cfg.sample_period_s * cfg.speed_mps).min(dist);
            let f = if dist > 0.0 { travelled / dist } else { 0.0 };
            let moving = travelled < dist;
            out.push(TraceSample {
                vehicle_id: id.clone(),
                time_s: t,
                x: ((from.0 + f * dx) * 100.0).round() / 100.0,
                y: ((from.1 + f * dy) * 100.0).round() / 100.0,
                speed_mps: Some(if moving { cfg.speed_mps } else { 0.0 }),
            });
        }
    }
    out.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then_with(|| a.vehicle_id.cmp(&b.vehicle_id)));
    Ok(out)
}

fn fmt_speed(s: Option<f64>) -> String {
    s.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes samples in the CSV trace format.
pub fn write_trace_csv<W: Write>(samples: &[TraceSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::config(format!("writing trace: {e}"));
    w.write_record(["time_s", "vehicle_id", "x", "y", "speed_mps"]).map_err(err)?;
    for s in samples {
        w.write_record([s.time_s.to_string(), s.vehicle_id.clone(), s.x.to_string(), s.y.to_string(), fmt_speed(s.speed_mps)])
            .map_err(err)?;
    }
    w.flush().map_err(|e| Error::config(format!("writing trace: {e}")))
}

/// Writes time-sorted samples as FCD markup, one `timestep` per distinct time.
pub fn write_trace_fcd<W: Write>(samples: &[TraceSample], mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::config(format!("writing trace: {e}"));
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").map_err(io)?;
    writeln!(out, "<fcd-export>").map_err(io)?;
    let mut i = 0;
    while i < samples.len() {
        let t = samples[i].time_s;
        writeln!(out, "    <timestep time=\"{t:.2}\">").map_err(io)?;
        while i < samples.len() && samples[i].time_s == t {
            let s = &samples[i];
            write!(out, "        <vehicle id=\"{}\" x=\"{}\" y=\"{}\"", xml_escape(&s.vehicle_id), s.x, s.y).map_err(io)?;
            if let Some(v) = s.speed_mps {
                write!(out, " speed=\"{v}\"").map_err(io)?;
            }
            writeln!(out, "/>").map_err(io)?;
            i += 1;
        }
        writeln!(out, "    </timestep>").map_err(io)?;
    }
    writeln!(out, "</fcd-export>").map_err(io)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('"', "&quot;")
}
