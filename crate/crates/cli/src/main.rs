use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fleetload::report::{self, Overrides, RunConfig};
use fleetload::synth::{self, SynthConfig};
use fleetload::{Error, MapMode, Result};

#[derive(Parser)]
#[command(name = "fleetload", version, about = "Autonomous-vehicle edge offloading workload generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic rate breakdown for the configured vehicle model.
    Model(Common),
    /// Per-bin regional workload series for each penetration fraction.
    Generate(Common),
    /// Penetration sweep (fractions run in parallel) with a summary table.
    Sweep(Common),
    /// Per-access-point workload tables and hotspot statistics.
    ApLoad(Common),
    /// Compare an AV rate series against a baseline rate series.
    Compare {
        #[command(flatten)]
        common: Common,
        /// AV rate series (`bin_start_s,mbps`); generated from the trace when omitted.
        #[arg(long)]
        av: Option<PathBuf>,
        /// Baseline rate series (`bin_start_s,mbps`).
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Write a deterministic synthetic mini-city trace.
    Synth {
        #[arg(long, default_value_t = 200)]
        vehicles: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 30.0)]
        sample_period: f64,
        #[arg(long, value_enum, default_value_t = TraceFormatArg::Csv)]
        format: TraceFormatArg,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormatArg {
    Csv,
    Fcd,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapModeArg {
    Paper,
    PerVehicle,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bin_seconds: Option<f64>,
    /// Comma-separated fractions, e.g. `0.2,0.6,1.0`.
    #[arg(long, value_delimiter = ',')]
    penetration: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    map_mode: Option<MapModeArg>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            trace: self.trace.clone(),
            out: self.out.clone(),
            seed: self.seed,
            bin_seconds: self.bin_seconds,
            penetration: self.penetration.clone(),
            map_mode: self.map_mode.map(|m| match m {
                MapModeArg::Paper => MapMode::Paper,
                MapModeArg::PerVehicle => MapMode::PerVehicle,
            }),
        })?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Model(common) => {
            let cfg = common.load()?;
            let breakdown = report::run_model(&cfg)?;
            print!("{breakdown}");
            if cfg.paths.out.is_some() {
                let out = report::prepare_out_dir(&cfg)?;
                report::write_model_outputs(&out, &breakdown)?;
            }
        }
        Command::Generate(common) => {
            let cfg = common.load()?;
            let runs = report::run_generate(&cfg)?;
            let out = report::prepare_out_dir(&cfg)?;
            report::write_series_outputs(&out, "generate", &cfg, &runs)?;
            for r in &runs {
                println!(
                    "fraction {}: {} vehicles, {} samples, {} bytes",
                    r.filters.fraction,
                    r.filters.vehicles_selected,
                    r.series.samples,
                    r.series.total_bytes()
                );
            }
        }
        Command::Sweep(common) => {
            let cfg = common.load()?;
            let runs = report::run_sweep(&cfg)?;
            let out = report::prepare_out_dir(&cfg)?;
            report::write_series_outputs(&out, "sweep", &cfg, &runs)?;
            let summary = report::write_sweep_summary(&out, &runs)?;
            println!("wrote {}", summary.display());
        }
        Command::ApLoad(common) => {
            let cfg = common.load()?;
            let runs = report::run_ap_load(&cfg)?;
            let out = report::prepare_out_dir(&cfg)?;
            report::write_ap_outputs(&out, &cfg, &runs)?;
            for r in &runs {
                let h = &r.hotspots;
                println!(
                    "fraction {}: gini {:.4}, max {} B ({}), min {} B",
                    r.filters.fraction,
                    h.gini,
                    h.max_bytes,
                    h.per_ap.first().map_or("-", |a| a.ap_id.as_str()),
                    h.min_bytes
                );
            }
        }
        Command::Compare { common, av, baseline } => {
            let mut cfg = common.load()?;
            if let Some(b) = baseline {
                cfg.paths.baseline = Some(b);
            }
            let report = report::run_compare(&cfg, av.as_deref())?;
            let out = report::prepare_out_dir(&cfg)?;
            report::write_compare_outputs(&out, &report)?;
            println!("correlation {}, peak ratio {}, mean ratio {}", report.correlation, report.peak_ratio, report.mean_ratio);
            for note in &report.notes {
                println!("note: {note}");
            }
        }
        Command::Synth { vehicles, seed, sample_period, format, out } => {
            let samples = synth::generate(&SynthConfig { vehicles, seed, sample_period_s: sample_period, ..SynthConfig::default() })?;
            let file = BufWriter::new(File::create(&out).map_err(|e| Error::io(&out, e))?);
            match format {
                TraceFormatArg::Csv => synth::write_trace_csv(&samples, file)?,
                TraceFormatArg::Fcd => synth::write_trace_fcd(&samples, file)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
