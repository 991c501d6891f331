use std::path::PathBuf;
use std::process::ExitCode;

use beamnet::io::config::{ButlerJob, FocalRatioChoice, Mode, PatternJob, RotmanJob, RunConfig};
use beamnet::io::{self, DataFormat, Formats, FrequencyUnit, OutputOptions};
use beamnet::pattern::AmplitudeConvention;
use beamnet::rotman::{optimize_focal_ratio_with, ErrorMetric, OptimizerOptions, RotmanDesignParams};
use beamnet::substrate::Substrate;
use beamnet::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "beamnet",
    version,
    about = "Butler matrix and Rotman lens beamforming network design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    /// Comma-separated list of csv, svg, touchstone, report (or all).
    #[arg(long, default_value = "all")]
    formats: String,
    /// Amplitude convention for dB weights: field or appendixA.
    #[arg(long, default_value = "field")]
    convention: String,
    /// Pattern grid as start,stop,step in degrees.
    #[arg(long, default_value = "1,360,1")]
    grid: String,
    /// Floor (dB) applied to exported patterns.
    #[arg(long, default_value_t = beamnet::pattern::DEFAULT_FLOOR_DB, allow_hyphen_values = true)]
    floor: f64,
    /// Touchstone data format: db, ma or ri.
    #[arg(long, default_value = "ma")]
    touchstone_format: String,
}

impl OutputArgs {
    fn options(&self) -> Result<OutputOptions> {
        let grid: Vec<f64> = self
            .grid
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad grid value {s:?}")))
            })
            .collect::<Result<_>>()?;
        let [a, b, c] = grid[..] else {
            return Err(Error::Config("grid needs start,stop,step".into()));
        };
        let mut o = OutputOptions {
            dir: self.out.clone(),
            formats: Formats::parse(&self.formats)?,
            floor_db: self.floor,
            convention: AmplitudeConvention::parse(&self.convention)?,
            grid: (a, b, c),
            ..Default::default()
        };
        o.touchstone.format = parse_format(&self.touchstone_format)?;
        Ok(o)
    }
}

#[derive(Args)]
struct LensArgs {
    /// Starting design: 4x4 or 8x8.
    #[arg(long, default_value = "4x4")]
    preset: String,
    /// Off-axis focal length F in mm.
    #[arg(long)]
    focal_length_mm: Option<f64>,
    #[arg(long)]
    frequency_ghz: Option<f64>,
    /// Substrate preset: FR4-0.8 or TLC30-1.3.
    #[arg(long)]
    substrate: Option<String>,
}

impl LensArgs {
    fn params(&self) -> Result<RotmanDesignParams> {
        let mut p = RotmanDesignParams::preset(&self.preset)?;
        if let Some(f) = self.focal_length_mm {
            p.off_axis_focal_length = f * 1e-3;
        }
        if let Some(f) = self.frequency_ghz {
            p.frequency = f * 1e9;
        }
        if let Some(s) = &self.substrate {
            p.substrate = Substrate::preset(s)?;
        }
        Ok(p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Assemble an ideal N x N Butler matrix.
    DesignButler {
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 3.15)]
        frequency_ghz: f64,
        #[arg(long, default_value = "FR4-0.8")]
        substrate: String,
        /// Element spacing in wavelengths for the beam patterns.
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Synthesize a Rotman lens.
    DesignRotman {
        #[command(flatten)]
        lens: LensArgs,
        /// Focal ratio g; overrides the preset.
        #[arg(long, conflicts_with = "optimize")]
        focal_ratio: Option<f64>,
        /// Tune g over [1.01, 2] before synthesis.
        #[arg(long)]
        optimize: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for the focal ratio with the smallest phase error.
    OptimizeG {
        #[command(flatten)]
        lens: LensArgs,
        #[arg(long, default_value_t = 1.01)]
        g_min: f64,
        #[arg(long, default_value_t = 2.0)]
        g_max: f64,
        /// max or rms.
        #[arg(long, default_value = "max")]
        metric: String,
    },
    /// Array factor of a measured per-port table.
    Pattern {
        input: PathBuf,
        /// Element spacing in wavelengths.
        #[arg(long)]
        spacing: f64,
        /// Reference direction in degrees.
        #[arg(long, default_value_t = 90.0)]
        theta_zero: f64,
        /// Unit of the table's frequency column.
        #[arg(long, default_value = "MHz")]
        frequency_unit: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rewrite a Touchstone file in another unit or format.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value = "ma")]
        format: String,
        #[arg(long, default_value = "GHz")]
        unit: String,
    },
    /// Execute a configuration file.
    Run { config: PathBuf },
}

fn parse_format(s: &str) -> Result<DataFormat> {
    DataFormat::parse(s).ok_or_else(|| Error::Config(format!("unknown Touchstone format {s:?}")))
}

fn parse_unit(s: &str) -> Result<FrequencyUnit> {
    FrequencyUnit::parse(s).ok_or_else(|| Error::Config(format!("unknown frequency unit {s:?}")))
}

fn config(mode: Mode, output: OutputOptions) -> RunConfig {
    RunConfig {
        mode,
        output,
        butler: ButlerJob::default(),
        rotman: RotmanJob::default(),
        pattern: None,
        sweep: None,
    }
}

fn report(summary: &io::RunSummary) {
    for f in &summary.files {
        println!("{}", f.display());
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::DesignButler {
            order,
            frequency_ghz,
            substrate,
            spacing,
            output,
        } => {
            let mut c = config(Mode::Butler, output.options()?);
            c.butler = ButlerJob {
                order,
                frequency: frequency_ghz * 1e9,
                substrate: Substrate::preset(&substrate)?,
                spacing_wavelengths: spacing,
            };
            report(&io::run(&c)?);
        }
        Command::DesignRotman {
            lens,
            focal_ratio,
            optimize,
            output,
        } => {
            let mut params = lens.params()?;
            if let Some(g) = focal_ratio {
                params.focal_ratio = g;
            }
            let choice = if optimize {
                FocalRatioChoice::Optimize {
                    range: (1.01, 2.0),
                    metric: ErrorMetric::MaxAbs,
                }
            } else {
                FocalRatioChoice::Fixed
            };
            let mut c = config(Mode::Rotman, output.options()?);
            c.rotman = RotmanJob {
                params,
                focal_ratio: choice,
            };
            report(&io::run(&c)?);
        }
        Command::OptimizeG {
            lens,
            g_min,
            g_max,
            metric,
        } => {
            let metric = match metric.to_ascii_lowercase().as_str() {
                "max" => ErrorMetric::MaxAbs,
                "rms" => ErrorMetric::Rms,
                other => return Err(Error::Config(format!("unknown metric {other:?}"))),
            };
            let o = optimize_focal_ratio_with(
                &lens.params()?,
                (g_min, g_max),
                OptimizerOptions {
                    metric,
                    ..Default::default()
                },
            )?;
            println!("g* = {}", io::format::num(o.g_star));
            println!("objective = {} m", io::format::num(o.objective));
        }
        Command::Pattern {
            input,
            spacing,
            theta_zero,
            frequency_unit,
            output,
        } => {
            let mut c = config(Mode::Pattern, output.options()?);
            c.pattern = Some(PatternJob {
                input,
                frequency_unit: parse_unit(&frequency_unit)?,
                spacing_wavelengths: spacing,
                steer_reference: theta_zero,
            });
            report(&io::run(&c)?);
        }
        Command::Convert {
            input,
            output,
            format,
            unit,
        } => {
            let points = io::import_touchstone_sweep(&input)?;
            let options = io::TouchstoneOptions {
                unit: parse_unit(&unit)?,
                format: parse_format(&format)?,
            };
            io::export_touchstone_with(&points, &output, options)?;
        }
        Command::Run { config } => report(&io::run(&RunConfig::load(&config)?)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = e.category();
            eprintln!("error[{}]: {e}", cat.as_str());
            ExitCode::from(cat.exit_code() as u8)
        }
    }
}
