use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CalibrateArgs, SimulateArgs, SynthesizeArgs, TraceArgs};
use crate::config::RunConfig;
use crate::error::CliError;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  internal error
  2  validation error (bad flags, config or trace file contents)
  3  no strategy found
  4  insufficient data
  5  I/O error
  6  invalid plan";

#[derive(Debug, Parser)]
#[command(
    name = "needle-steer",
    version,
    about = "Plan bevel-tip needle insertions by synthesizing winning strategies of a reachability game",
    after_help = EXIT_CODES
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a motion plan and write the trace as CSV.
    Simulate {
        /// Rotation steps, e.g. `20` or `20,45`; empty for none.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        plan: String,
        /// Target point `x:y` drawn as a window in the SVG (repeatable).
        #[arg(long = "target", allow_hyphen_values = true)]
        targets: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg_out: Option<PathBuf>,
    },
    /// Estimate insertion angle and arc direction from a trace prefix.
    Calibrate {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize all winning motion plans for targets or a target trace.
    Synthesize {
        #[arg(long, conflicts_with = "targets")]
        trace: Option<PathBuf>,
        /// Target point `x:y` in scaled units (repeatable, in order).
        #[arg(long = "target", allow_hyphen_values = true)]
        targets: Vec<String>,
        /// Also select the plan passing closest to the final target.
        #[arg(long)]
        optimal: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg_out: Option<PathBuf>,
    },
    /// Fit a strategy to an observed trace and report errors.
    Fit {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count synthesized plans over deviations and target counts.
    Sweep {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Configuration overrides; each flag mirrors the config key of the same
/// name and is applied after `--config`.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Insertion speed, µm/s.
    #[arg(long, global = true)]
    pub velocity: Option<String>,
    /// Time step, ms.
    #[arg(long, global = true)]
    pub dt_ms: Option<String>,
    /// Arc radius, µm.
    #[arg(long, global = true)]
    pub radius: Option<String>,
    #[arg(long, global = true)]
    pub rotation_dwell: Option<String>,
    /// Integer units per mm.
    #[arg(long, global = true)]
    pub scale: Option<String>,
    #[arg(long, global = true)]
    pub bevel_angle: Option<String>,
    #[arg(long, global = true)]
    pub motor_step: Option<String>,
    #[arg(long, global = true)]
    pub max_rotations: Option<String>,
    /// Number of feed steps.
    #[arg(long, global = true)]
    pub horizon: Option<String>,
    #[arg(long, global = true)]
    pub prune: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub y0: Option<String>,
    /// Initial heading, degrees.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta0: Option<String>,
    /// Initial arc direction: +1, -1 or both.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dir: Option<String>,
    /// Window half-width in scaled units (comma list for sweep).
    #[arg(long, global = true)]
    pub dev: Option<String>,
    /// Deviation search bounds `lo:hi`.
    #[arg(long, global = true)]
    pub dev_bounds: Option<String>,
    /// Number of target points (comma list for sweep).
    #[arg(long, global = true)]
    pub points: Option<String>,
    /// Exact number of required rotations.
    #[arg(long, global = true)]
    pub rotations: Option<String>,
    /// RNG seed; mandatory with --noise.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Uniform noise bound per coordinate, scaled units.
    #[arg(long, global = true)]
    pub noise: Option<String>,
    /// Calibration angle grid extent, degrees.
    #[arg(long, global = true)]
    pub angle_max: Option<String>,
    /// Calibration angle grid pitch, degrees.
    #[arg(long, global = true)]
    pub angle_pitch: Option<String>,
    /// Calibration prefix length, mm.
    #[arg(long, global = true)]
    pub prefix_mm: Option<String>,
    /// Synthesis worker threads.
    #[arg(long, global = true)]
    pub workers: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> [(&'static str, &Option<String>); 24] {
        [
            ("velocity", &self.velocity),
            ("dt_ms", &self.dt_ms),
            ("radius", &self.radius),
            ("rotation_dwell", &self.rotation_dwell),
            ("scale", &self.scale),
            ("bevel_angle", &self.bevel_angle),
            ("motor_step", &self.motor_step),
            ("max_rotations", &self.max_rotations),
            ("horizon", &self.horizon),
            ("prune", &self.prune),
            ("x0", &self.x0),
            ("y0", &self.y0),
            ("theta0", &self.theta0),
            ("dir", &self.dir),
            ("dev", &self.dev),
            ("dev_bounds", &self.dev_bounds),
            ("points", &self.points),
            ("rotations", &self.rotations),
            ("seed", &self.seed),
            ("noise", &self.noise),
            ("angle_max", &self.angle_max),
            ("angle_pitch", &self.angle_pitch),
            ("prefix_mm", &self.prefix_mm),
            ("workers", &self.workers),
        ]
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = cli.overrides.resolve()?;
    match cli.command {
        Command::Simulate {
            plan,
            targets,
            out,
            svg_out,
        } => commands::simulate(
            &cfg,
            &SimulateArgs {
                plan,
                targets,
                out,
                svg_out,
            },
        ),
        Command::Calibrate { trace, out } => commands::calibrate(&cfg, &CalibrateArgs { trace, out }),
        Command::Synthesize {
            trace,
            targets,
            optimal,
            out,
            svg_out,
        } => commands::synthesize(
            &cfg,
            &SynthesizeArgs {
                trace,
                targets,
                optimal,
                out,
                svg_out,
            },
        ),
        Command::Fit { trace, out } => commands::fit(&cfg, &TraceArgs { trace, out }),
        Command::Sweep { trace, out } => commands::sweep(&cfg, &TraceArgs { trace, out }),
    }
}
