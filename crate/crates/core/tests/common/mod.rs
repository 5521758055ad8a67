//! Independent recomputations used as test oracles. Nothing here calls the
//! library's parsing, filtering or attribution code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

#[derive(Debug, Clone)]
pub struct Row {
    pub t: f64,
    pub id: String,
    pub x: f64,
    pub y: f64,
}

/// Reads a CSV trace by splitting lines by hand.
pub fn read_trace(rel: &str) -> Vec<Row> {
    let text = std::fs::read_to_string(fixture(rel)).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Row { t: f[0].parse().unwrap(), id: f[1].to_string(), x: f[2].parse().unwrap(), y: f[3].parse().unwrap() }
        })
        .collect()
}

pub fn read_aps(rel: &str) -> Vec<(String, f64, f64)> {
    let text = std::fs::read_to_string(fixture(rel)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

pub fn read_hourly(rel: &str) -> [f64; 24] {
    let text = std::fs::read_to_string(fixture(rel)).unwrap();
    let mut out = [0.0; 24];
    for l in text.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        out[f[0].parse::<usize>().unwrap()] = f[1].parse().unwrap();
    }
    out
}

/// Brute-force nearest AP with the lexicographic tie rule.
pub fn nearest(aps: &[(String, f64, f64)], x: f64, y: f64) -> String {
    let mut best: Option<(f64, &str)> = None;
    for (id, ax, ay) in aps {
        let d = ((ax - x).powi(2) + (ay - y).powi(2)).sqrt();
        best = match best {
            None => Some((d, id)),
            Some((bd, bid)) if d < bd || (d == bd && id.as_str() < bid) => Some((d, id)),
            keep => keep,
        };
    }
    best.unwrap().1.to_string()
}

/// Reference vehicle constants written out by hand.
pub const TELEMETRY_BPS: f64 = 0.002 * 13.0 * 10.0 * 200_000.0 + 0.001 * 4.0 * 10.0 * 300_000.0 + 0.003 * 6.0 * 10.0 * 2_000.0;
pub const LEARNING_ARTIFACT_B: f64 = 5.0 * 0.1 * 0.1 * (13.0 * 10.0 * 200_000.0 + 4.0 * 10.0 * 300_000.0 + 6.0 * 10.0 * 2_000.0);
pub const MAP_ARTIFACT_B: f64 = 50.0 * 200.0;

/// Expected bytes of one sample: telemetry + lambda(t) * S_L + p_M * S_M / window, times dt.
pub fn sample_bytes(counts: &[f64; 24], mean_rate: f64, window: f64, dt: f64, t: f64) -> f64 {
    let mean: f64 = counts.iter().sum::<f64>() / 24.0;
    let hour = ((t % 86_400.0) / 3600.0).floor() as usize;
    let lambda = mean_rate * counts[hour] / mean;
    (TELEMETRY_BPS + lambda * LEARNING_ARTIFACT_B + 0.05 * MAP_ARTIFACT_B / window) * dt
}

/// Mini-city region: x in [0, 5200], y in [0, 4000].
pub fn in_minicity_region(r: &Row) -> bool {
    r.x >= 0.0 && r.x <= 5200.0 && r.y >= 0.0 && r.y <= 4000.0
}

/// Distinct vehicles per hourly bin.
pub fn distinct_per_bin(rows: &[Row], bin: f64, count: usize) -> Vec<u64> {
    let mut sets: BTreeMap<usize, HashSet<&str>> = BTreeMap::new();
    for r in rows {
        let b = (r.t / bin).floor() as usize;
        if r.t >= 0.0 && b < count {
            sets.entry(b).or_default().insert(&r.id);
        }
    }
    (0..count).map(|b| sets.get(&b).map_or(0, |s| s.len() as u64)).collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= rel * scale
}
