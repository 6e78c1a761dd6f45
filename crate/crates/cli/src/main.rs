//! Command-line driver: sweeps, channel matrices, impulse responses, and
//! map metrics, all emitted as deterministic CSV.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vlcsim_core::{
    channel_matrix, coverage_metrics, fmt_sig, impulse_response, parse_scenario, sweep_plane,
    GridSpec, PowerMap, Result, Scenario, ScenarioPreset, SimError, DEFAULT_BIN_WIDTH_S,
    DEFAULT_PATCH_SIZE_M,
};

#[derive(Parser)]
#[command(
    name = "vlcsim",
    version,
    about = "Indoor visible-light communication link simulator",
    long_about = "Simulates Lambertian LED emitters and photodetectors in a rectangular room:\n\
                  received-power maps over the working plane, MIMO channel matrices,\n\
                  and first-order ray-traced impulse responses. All outputs are CSV and\n\
                  deterministic: identical inputs produce byte-identical files."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the built-in scenario presets
    Scenarios {
        #[command(subcommand)]
        action: ScenariosAction,
    },
    /// Sweep received power over the working-plane grid
    PowerMap {
        #[command(flatten)]
        source: Source,
        /// Grid resolution as NXxNY (default 81x81)
        #[arg(long, value_parser = parse_grid)]
        grid: Option<GridSpec>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the LED-to-detector channel gain matrix
    ChannelMatrix {
        #[command(flatten)]
        source: Source,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the single-bounce impulse response for one (tx, rx) pair
    ImpulseResponse {
        #[command(flatten)]
        source: Source,
        /// Transmitter (LED) index
        #[arg(long)]
        tx: usize,
        /// Receiver (detector) index
        #[arg(long)]
        rx: usize,
        /// Surface patch side in meters (default 0.05)
        #[arg(long)]
        patch: Option<f64>,
        /// Delay bin width in nanoseconds (default 0.2)
        #[arg(long)]
        bin: Option<f64>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coverage metrics from a previously written power map
    Metrics {
        /// Power-map CSV written by `power-map`
        #[arg(long)]
        map: PathBuf,
        /// Relative threshold below the peak, dB (default 3)
        #[arg(long = "threshold-db")]
        threshold_db: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ScenariosAction {
    /// Print the built-in presets
    List,
}

/// Scenario source: exactly one of a preset name or a scenario file.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in preset name, e.g. table1:4deg
    #[arg(long)]
    preset: Option<String>,
    /// Scenario JSON file
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<Scenario> {
        if let Some(name) = &self.preset {
            let preset = ScenarioPreset::by_name(name)?;
            return vlcsim_core::preset_scenario(&preset);
        }
        let path = self.scenario.as_ref().expect("clap enforces the group");
        let text = fs::read_to_string(path)
            .map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
        parse_scenario(&text)
    }
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let (nx, ny) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NXxNY, got `{s}`"))?;
    let nx: usize = nx.parse().map_err(|_| format!("bad grid width `{nx}`"))?;
    let ny: usize = ny.parse().map_err(|_| format!("bad grid height `{ny}`"))?;
    GridSpec::new(nx, ny).map_err(|e| e.to_string())
}

/// Write to the file when given, stdout otherwise.
fn deliver(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn fmt_metric(v: f64) -> String {
    if v.is_finite() {
        fmt_sig(v)
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Scenarios {
            action: ScenariosAction::List,
        } => {
            for preset in ScenarioPreset::TABLE1 {
                println!(
                    "{}  led_spacing_m={}  irradiance_angle_deg={}  detector_spacing_m={}",
                    preset.name(),
                    preset.led_spacing,
                    preset.irradiance_angle_deg,
                    preset.detector_spacing
                );
            }
            Ok(())
        }
        Command::PowerMap { source, grid, out } => {
            let scenario = source.load()?;
            let grid = grid.unwrap_or_default();
            let map = sweep_plane(&scenario, &grid)?;
            deliver(out.as_ref(), &map.to_csv_string())
        }
        Command::ChannelMatrix { source, out } => {
            let scenario = source.load()?;
            let matrix = channel_matrix(&scenario.leds, &scenario.pds)?;
            deliver(out.as_ref(), &matrix.to_csv_string())
        }
        Command::ImpulseResponse {
            source,
            tx,
            rx,
            patch,
            bin,
            out,
        } => {
            let scenario = source.load()?;
            let patch = patch.unwrap_or(DEFAULT_PATCH_SIZE_M);
            let bin_s = bin.map(|ns| ns * 1e-9).unwrap_or(DEFAULT_BIN_WIDTH_S);
            let ir = impulse_response(&scenario, tx, rx, patch, bin_s)?;
            deliver(out.as_ref(), &ir.to_csv_string())
        }
        Command::Metrics { map, threshold_db } => {
            let text = fs::read_to_string(&map)
                .map_err(|e| SimError::Io(format!("{}: {e}", map.display())))?;
            let map = PowerMap::read_csv(&text)?;
            let metrics = coverage_metrics(&map, threshold_db.unwrap_or(3.0))?;
            println!("peak_w,{}", fmt_metric(metrics.peak_w));
            println!("peak_dbm,{}", fmt_metric(metrics.peak_dbm));
            println!("min_w,{}", fmt_metric(metrics.min_w));
            println!("dynamic_range_db,{}", fmt_metric(metrics.dynamic_range_db));
            println!("covered_fraction,{}", fmt_metric(metrics.covered_fraction));
            println!("all_zero,{}", metrics.all_zero);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
