//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use fleetload::intensity::IntensityProfile;
use fleetload::report::{run_fraction, run_generate, run_sweep, RunConfig, RunContext};
use fleetload::spatial::{accumulate_ap_workload, accumulate_ap_workload_parallel, assign_nearest_ap, AccessPoint};
use fleetload::synth::{self, SynthConfig};
use fleetload::trace::{filter_region, open_trace, BinGrid};
use fleetload::workload::{monte_carlo_workload, monte_carlo_workload_serial, reference_model};
use fleetload::{MonteCarloParams, TraceSample, VehicleModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn minicity() -> PathBuf {
    fixtures().join("minicity/config.toml")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fleetload"))
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> std::result::Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// FNV-1a over seed LE bytes then id bytes, SplitMix64 finalizer, top 53 bits.
fn oracle_selected(seed: u64, id: &str, fraction: f64) -> bool {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        h = (h ^ u64::from(*b)).wrapping_mul(0x100_0000_01b3);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    ((z >> 11) as f64 / (1u64 << 53) as f64) < fraction
}

fn model_output() -> Check {
    let start = Instant::now();
    let out = bin().arg("model").arg("--config").arg(minicity()).output().map_err(err)?;
    let elapsed = start.elapsed();
    ensure(out.status.success(), format!("model exited with {}", out.status))?;
    let text = String::from_utf8(out.stdout).map_err(err)?;
    let values: HashMap<&str, f64> = text
        .lines()
        .filter_map(|l| {
            let (k, v) = l.split_once(" = ")?;
            Some((k, v.split_whitespace().next()?.parse().ok()?))
        })
        .collect();
    let expected = [("R_sv", 38_120_000.0), ("R_T", 64_360.0), ("S_L", 1_906_000.0), ("S_M", 10_000.0)];
    let mut worst = 0.0f64;
    for (key, want) in expected {
        let got = *values.get(key).ok_or(format!("{key} missing from output"))?;
        let e = rel_err(got, want);
        ensure(e <= 1e-9, format!("{key} = {got}, expected {want}"))?;
        worst = worst.max(e);
    }
    within(elapsed, 1.0)?;
    Ok(format!("max rel err {worst:.1e}, {:.3} s", elapsed.as_secs_f64()))
}

fn penetration_linearity(dir: &Path) -> Check {
    let start = Instant::now();
    let trace = dir.join("city10k.csv");
    let samples =
        synth::generate(&SynthConfig { vehicles: 10_000, seed: 11, sample_period_s: 60.0, ..SynthConfig::default() }).map_err(err)?;
    synth::write_trace_csv(&samples, BufWriter::new(File::create(&trace).map_err(err)?)).map_err(err)?;
    let mut cfg = RunConfig { seed: 5, sample_period_s: 60.0, penetration: Some(vec![0.2, 0.4, 0.6, 0.8, 1.0]), ..RunConfig::default() };
    cfg.paths.trace = Some(trace);
    let runs = run_sweep(&cfg).map_err(err)?;
    let elapsed = start.elapsed();

    let per_sample = runs[4].series.total_bytes() / runs[4].series.samples as f64;
    let mut worst = 0.0f64;
    let mut prev = 0.0;
    for r in &runs {
        let f = r.filters.fraction;
        let count = samples.iter().filter(|s| oracle_selected(cfg.seed, &s.vehicle_id, f)).count() as u64;
        ensure(count == r.series.samples, format!("fraction {f}: {} samples, oracle {count}", r.series.samples))?;
        let e = rel_err(r.series.total_bytes(), per_sample * count as f64);
        worst = worst.max(e);
        ensure(e <= 1e-12, format!("fraction {f}: residual {e:.2e}"))?;
        ensure(r.series.total_bytes() >= prev, format!("fraction {f}: total decreased"))?;
        prev = r.series.total_bytes();
    }
    within(elapsed, 30.0)?;
    Ok(format!("{} samples, max residual {worst:.1e}, {:.2} s", samples.len(), elapsed.as_secs_f64()))
}

fn monte_carlo_oracle() -> Check {
    let start = Instant::now();
    let model: VehicleModel = reference_model();
    let (fleet, lambda, horizon, window) = (1000u64, 1e-4, 3600.0, 3600.0);
    let expected = model.fleet_rate(fleet, lambda, window).map_err(err)?.total_bps * horizon;
    let telemetry = fleet as f64 * model.telemetry_rate() * horizon;
    let seeds = 40u64;
    let mut totals = Vec::new();
    for seed in 0..seeds {
        let params = MonteCarloParams { fleet_size: fleet, lambda, horizon_seconds: horizon, window_seconds: window, seed };
        let o = monte_carlo_workload(&model, &params).map_err(err)?;
        ensure(o.telemetry_bytes == telemetry, format!("seed {seed}: telemetry {} != {telemetry}", o.telemetry_bytes))?;
        totals.push(o.total_bytes);
    }
    let n = totals.len() as f64;
    let mean = totals.iter().sum::<f64>() / n;
    let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let z = (mean - expected) / se;
    let elapsed = start.elapsed();
    ensure(z.abs() <= 3.0, format!("mean {mean} vs expected {expected}: {z:.2} SE"))?;
    within(elapsed, 60.0)?;
    Ok(format!("{seeds} seeds, mean off by {z:+.2} SE, telemetry exact, {:.2} s", elapsed.as_secs_f64()))
}

fn brute_nearest(aps: &[AccessPoint], x: f64, y: f64) -> &str {
    let mut best = &aps[0];
    let mut best_d = f64::INFINITY;
    for ap in aps {
        let d = (ap.x - x).hypot(ap.y - y);
        if d < best_d || (d == best_d && ap.ap_id < best.ap_id) {
            best = ap;
            best_d = d;
        }
    }
    &best.ap_id
}

fn conservation_on(cfg: &RunConfig, aps: &[AccessPoint]) -> std::result::Result<(usize, f64), String> {
    let ctx = RunContext::new(cfg).map_err(err)?;
    let series = run_fraction(&ctx, 1.0).map_err(err)?.series;
    let stream = || -> std::result::Result<Vec<TraceSample>, String> {
        let s = open_trace(cfg.paths.trace.as_ref().unwrap()).map_err(err)?;
        match &ctx.region {
            Some(r) => filter_region(s, r.clone()).collect::<Result<_, _>>().map_err(err),
            None => s.collect::<Result<_, _>>().map_err(err),
        }
    };
    let samples = stream()?;
    let table = accumulate_ap_workload(samples.iter().cloned().map(Ok), aps, &ctx.attribution, cfg.bins).map_err(err)?;
    let mut worst = 0.0f64;
    for (b, (sum, reg)) in table.bin_sums().iter().zip(series.totals()).enumerate() {
        let e = rel_err(sum.total(), reg);
        worst = worst.max(e);
        ensure(e <= 1e-9, format!("bin {b}: AP sum {} vs regional {reg}", sum.total()))?;
    }
    for s in &samples {
        let got = assign_nearest_ap(s, aps).map_err(err)?;
        let want = brute_nearest(aps, s.x, s.y);
        ensure(got == want, format!("{} at t={}: assigned {got}, nearest {want}", s.vehicle_id, s.time_s))?;
    }
    Ok((samples.len(), worst))
}

fn spatial_conservation() -> Check {
    let start = Instant::now();
    let cfg = RunConfig::load(&minicity()).map_err(err)?;
    let aps = fleetload::report::load_planar_aps(&cfg).map_err(err)?;
    let (n1, e1) = conservation_on(&cfg, &aps)?;

    let mut small = RunConfig::default();
    small.paths.trace = Some(fixtures().join("fcd_small.xml"));
    small.bins = BinGrid::new(0.0, 1.0, 3).map_err(err)?;
    let small_aps = vec![AccessPoint::new("w", 0.0, 0.0), AccessPoint::new("e", 300.0, 40.0), AccessPoint::new("m", 150.0, 30.0)];
    let (n2, e2) = conservation_on(&small, &small_aps)?;
    let elapsed = start.elapsed();
    within(elapsed, 10.0)?;
    Ok(format!("{} samples checked, max rel err {:.1e}, {:.2} s", n1 + n2, e1.max(e2), elapsed.as_secs_f64()))
}

fn intensity_normalization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 2000;
    let mut worst_avg = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for i in 0..trials {
        let mut counts: Vec<f64> =
            (0..24).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..5000.0f64).floor() }).collect();
        if counts.iter().all(|&c| c == 0.0) {
            counts[rng.random_range(0..24)] = 1.0;
        }
        let mean_rate = 10f64.powf(rng.random_range(-7.0..-1.0));
        let p = IntensityProfile::from_hourly_counts(&counts, mean_rate).map_err(err)?;
        let e = rel_err(p.time_average(), mean_rate);
        worst_avg = worst_avg.max(e);
        ensure(e <= 1e-9, format!("trial {i}: average {} vs {mean_rate}", p.time_average()))?;
        let (hmax, cmax) = counts.iter().copied().enumerate().fold((0, 0.0), |a, (h, c)| if c > a.1 { (h, c) } else { a });
        let rmax = p.rate_at(hmax as f64 * 3600.0 + 1800.0).map_err(err)?;
        for (h, &c) in counts.iter().enumerate() {
            let r = p.rate_at(h as f64 * 3600.0 + rng.random_range(0.0..3600.0)).map_err(err)?;
            let d = (r / rmax - c / cmax).abs();
            worst_ratio = worst_ratio.max(d);
            ensure(d <= 1e-9, format!("trial {i} hour {h}: ratio {} vs {}", r / rmax, c / cmax))?;
        }
    }
    Ok(format!("{trials} count vectors, max avg err {worst_avg:.1e}, max ratio err {worst_ratio:.1e}"))
}

fn read_dir_bytes(dir: &Path) -> std::result::Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).map_err(err)? {
        let e = e.map_err(err)?;
        out.insert(e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(err)?);
    }
    Ok(out)
}

fn determinism(dir: &Path) -> Check {
    let mut files = 0;
    for cmd in ["generate", "sweep", "ap-load", "compare"] {
        let mut outputs = Vec::new();
        let out = dir.join(cmd);
        for _ in 0..2 {
            let _ = std::fs::remove_dir_all(&out);
            let status = bin().args([cmd, "--config"]).arg(minicity()).arg("--out").arg(&out).output().map_err(err)?;
            ensure(status.status.success(), format!("{cmd} failed: {}", String::from_utf8_lossy(&status.stderr)))?;
            outputs.push(read_dir_bytes(&out)?);
        }
        ensure(outputs[0] == outputs[1], format!("{cmd}: outputs differ between runs"))?;
        ensure(outputs[0].keys().any(|k| k.ends_with(".csv")), format!("{cmd}: no CSV written"))?;
        files += outputs[0].len();
    }

    let cfg = RunConfig::load(&minicity()).map_err(err)?;
    let serial = run_generate(&cfg).map_err(err)?;
    let parallel = run_sweep(&cfg).map_err(err)?;
    let mut worst = 0.0f64;
    for (s, p) in serial.iter().zip(&parallel) {
        for (a, b) in s.series.totals().iter().zip(p.series.totals()) {
            worst = worst.max(rel_err(*a, b));
        }
    }
    let ctx = RunContext::new(&cfg).map_err(err)?;
    let aps = fleetload::report::load_planar_aps(&cfg).map_err(err)?;
    let samples: Vec<TraceSample> = open_trace(cfg.paths.trace.as_ref().unwrap()).map_err(err)?.collect::<Result<_, _>>().map_err(err)?;
    let t_serial = accumulate_ap_workload(samples.iter().cloned().map(Ok), &aps, &ctx.attribution, cfg.bins).map_err(err)?;
    let t_par = accumulate_ap_workload_parallel(&samples, &aps, &ctx.attribution, cfg.bins, 257).map_err(err)?;
    for ap in 0..aps.len() {
        for (a, b) in t_serial.ap_row(ap).iter().zip(t_par.ap_row(ap)) {
            worst = worst.max(rel_err(a.total(), b.total()));
        }
    }
    let model: VehicleModel = reference_model();
    let params = MonteCarloParams { fleet_size: 500, lambda: 1e-3, horizon_seconds: 7200.0, window_seconds: 3600.0, seed: 3 };
    let mc_equal = monte_carlo_workload(&model, &params).map_err(err)? == monte_carlo_workload_serial(&model, &params).map_err(err)?;
    ensure(mc_equal, "Monte Carlo parallel and serial outcomes differ")?;
    ensure(worst <= 1e-9, format!("parallel vs serial rel err {worst:.2e}"))?;
    Ok(format!("{files} output files identical across runs, parallel/serial max rel err {worst:.1e}"))
}

fn demo(dir: &Path) -> Check {
    let out = dir.join("demo");
    for cmd in ["generate", "ap-load"] {
        let o = bin().args([cmd, "--config"]).arg(minicity()).args(["--penetration", "1.0", "--out"]).arg(&out).output().map_err(err)?;
        ensure(o.status.success(), format!("{cmd} failed: {}", String::from_utf8_lossy(&o.stderr)))?;
    }
    let mut rdr = csv::Reader::from_path(out.join("series_p1.000.csv")).map_err(err)?;
    let totals: Vec<f64> =
        rdr.records().map(|r| r.map_err(err).and_then(|r| r[5].parse::<f64>().map_err(err))).collect::<Result<_, _>>()?;
    ensure(totals.len() == 24, format!("expected 24 hourly bins, got {}", totals.len()))?;
    let peak = totals.iter().cloned().fold(f64::MIN, f64::max);
    let trough = totals.iter().cloned().fold(f64::MAX, f64::min);
    ensure(peak > 1.5 * trough, format!("peak {peak} not above 1.5x trough {trough}"))?;

    let mut per_ap: BTreeMap<String, f64> = BTreeMap::new();
    let mut rdr = csv::Reader::from_path(out.join("ap_load_p1.000.csv")).map_err(err)?;
    for r in rdr.records() {
        let r = r.map_err(err)?;
        *per_ap.entry(r[0].to_string()).or_default() += r[5].parse::<f64>().map_err(err)?;
    }
    let v: Vec<f64> = per_ap.values().copied().collect();
    let n = v.len() as f64;
    let mu = v.iter().sum::<f64>() / n;
    let gini = v.iter().flat_map(|a| v.iter().map(move |b| (a - b).abs())).sum::<f64>() / (2.0 * n * n * mu);
    ensure(gini > 0.0, "Gini across APs is zero")?;
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("ap-load.json")).map_err(err)?).map_err(err)?;
    let reported = json.pointer("/runs/0/hotspots/gini").and_then(|g| g.as_f64()).ok_or("gini missing from ap-load.json")?;
    ensure(rel_err(reported, gini) <= 1e-9, format!("reported Gini {reported} vs recomputed {gini}"))?;
    let aps_seen: HashSet<&String> = per_ap.keys().collect();
    Ok(format!("peak {peak:.3e} B, trough {trough:.3e} B, Gini {gini:.3} over {} APs", aps_seen.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let checks: Vec<Criterion> = vec![
        ("1 worked-model reproduction", Box::new(model_output)),
        ("2 penetration linearity", Box::new(|| penetration_linearity(dir.path()))),
        ("3 Monte Carlo oracle equivalence", Box::new(monte_carlo_oracle)),
        ("4 spatial conservation", Box::new(spatial_conservation)),
        ("5 intensity normalization", Box::new(intensity_normalization)),
        ("6 determinism", Box::new(|| determinism(dir.path()))),
        ("7 mini-city demo shape", Box::new(|| demo(dir.path()))),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
