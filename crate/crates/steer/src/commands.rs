//! Subcommand implementations. Each returns the text destined for stdout;
//! files named by `--out` / `--svg-out` are written only after every
//! computation has succeeded.

use std::path::{Path, PathBuf};

use needle_core::calibration::CalibrationRequest;
use needle_core::eval::{fit_trace_with, plan_count_sweep_with};
use needle_core::game::Game;
use needle_core::synthesis::closest_approach_sq;
use needle_core::trace::select_targets;
use needle_core::{
    estimate_insertion, generate_trace, optimal_plan, simulate_plan, Direction, FitOptions, GameConfig, MotionPlan,
    Noise, ObservationTrace, Point, StrategySet, SynthesisRequest, TargetSpec,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::parallel::synthesize_parallel;
use crate::report::{self, GridInfo};
use crate::svg::{self, Plot, Polyline};
use crate::traceio;

pub const DEFAULT_HORIZON: u32 = 100;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Parses `k1[,k2]`; an empty string is the rotation-free plan.
pub fn parse_plan(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::InvalidPlan(format!("invalid plan: bad rotation step `{s}`")))
        })
        .collect()
}

/// Parses `x:y` in scaled units.
pub fn parse_target(text: &str) -> Result<Point, CliError> {
    let bad = || CliError::Validation(format!("target must be x:y in scaled units, got `{text}`"));
    let (x, y) = text.split_once(':').ok_or_else(bad)?;
    Ok(Point::new(
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn prefix_steps(cfg: &RunConfig) -> u32 {
    let units = cfg.prefix_mm * f64::from(cfg.kinematics.scale);
    (units / cfg.kinematics.step_length()).ceil() as u32
}

pub struct SimulateArgs {
    pub plan: String,
    pub targets: Vec<String>,
    pub out: Option<PathBuf>,
    pub svg_out: Option<PathBuf>,
}

pub fn simulate(cfg: &RunConfig, args: &SimulateArgs) -> Result<String, CliError> {
    cfg.validate()?;
    let horizon = cfg.horizon.unwrap_or(DEFAULT_HORIZON);
    let steps = parse_plan(&args.plan)?;
    let plan = MotionPlan::new(cfg.pose(cfg.single_dir()?), &steps)?;
    plan.validate(horizon, cfg.max_rotations)?;
    let noise = if cfg.noise > 0 {
        Noise::new(cfg.noise, cfg.require_seed()?)
    } else {
        Noise::NONE
    };
    let trace = generate_trace(&plan, &cfg.kinematics, horizon, noise)?;
    let csv = traceio::format_trace(&trace);

    let svg = if args.svg_out.is_some() {
        let dev = if args.targets.is_empty() { 0 } else { cfg.single_dev()? };
        let windows = args
            .targets
            .iter()
            .map(|t| parse_target(t).map(|p| TargetSpec::new(p.x, p.y, dev)))
            .collect::<Result<Vec<_>, _>>()?;
        let points: Vec<Point> = trace.points().iter().map(|p| p.position()).collect();
        let markers = plan.rotation_steps().iter().map(|&k| points[k as usize]).collect();
        Some(svg::render(&Plot {
            lines: vec![Polyline {
                points: &points,
                stroke: "steelblue",
                width: 1.5,
            }],
            markers,
            windows,
        }))
    } else {
        None
    };

    if let (Some(path), Some(svg)) = (&args.svg_out, &svg) {
        write_file(path, svg)?;
    }
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

pub struct CalibrateArgs {
    pub trace: PathBuf,
    pub out: Option<PathBuf>,
}

pub fn calibrate(cfg: &RunConfig, args: &CalibrateArgs) -> Result<String, CliError> {
    cfg.validate()?;
    let trace = traceio::load_trace(&args.trace)?;
    let first = trace.first().step;
    let prefix = trace.window(first, first + prefix_steps(cfg))?;
    let grid = cfg.angle_grid()?;
    let info = GridInfo {
        pitch_deg: cfg.angle_pitch_deg,
        max_deg: cfg.angle_max_deg,
        size: grid.len(),
    };
    let mut req = CalibrationRequest::new(prefix, cfg.kinematics);
    req.angle_grid = grid;
    let points = req.prefix.len();
    let res = estimate_insertion(&req)?;
    let record = report::calibration_record(&res, points, &info);
    if let Some(path) = &args.out {
        write_file(path, &record)?;
    }
    Ok(record)
}

pub struct SynthesizeArgs {
    pub trace: Option<PathBuf>,
    pub targets: Vec<String>,
    pub optimal: bool,
    pub out: Option<PathBuf>,
    pub svg_out: Option<PathBuf>,
}

fn requests(cfg: &RunConfig, args: &SynthesizeArgs) -> Result<Vec<SynthesisRequest>, CliError> {
    let dev = cfg.single_dev()?;
    let dirs = cfg.dir.directions();
    let start = cfg.pose(dirs[0]).state().position();
    let (targets, trace_span) = match (&args.trace, args.targets.is_empty()) {
        (Some(_), false) => return Err(CliError::Validation("give either --trace or --target, not both".into())),
        (None, true) => return Err(CliError::Validation("synthesize needs --target or --trace".into())),
        (None, false) => {
            let targets = args
                .targets
                .iter()
                .map(|t| parse_target(t).map(|p| TargetSpec::new(p.x, p.y, dev)))
                .collect::<Result<Vec<_>, _>>()?;
            (targets, None)
        }
        (Some(path), true) => {
            let trace = traceio::load_trace(path)?;
            let trace = trace.window(trace.first().step, trace.last().step)?;
            let mut targets = select_targets(&trace, cfg.single_points()?, Some(start))?;
            for t in &mut targets {
                t.dev = dev;
            }
            (targets, Some(trace.span()))
        }
    };
    let horizon = cfg.horizon.or(trace_span).unwrap_or(DEFAULT_HORIZON);
    Ok(dirs
        .into_iter()
        .map(|d| {
            let mut game = GameConfig::new(targets.clone(), horizon, cfg.kinematics);
            game.max_rotations = cfg.max_rotations;
            game.prune = cfg.prune;
            let mut req = SynthesisRequest::new(game, cfg.pose(d));
            req.required_rotations = cfg.rotations;
            req
        })
        .collect())
}

/// Optimal plan across sets: closest approach, then canonical order, then
/// the positive direction.
fn optimal_across(sets: &[StrategySet]) -> Result<MotionPlan, CliError> {
    let mut best: Option<(i128, MotionPlan)> = None;
    for set in sets.iter().filter(|s| !s.is_empty()) {
        let plan = optimal_plan(set)?;
        let d = closest_approach_sq(&Game::new(set.request.game.clone())?, &plan)?;
        let better = match &best {
            None => true,
            Some((bd, bp)) => {
                d < *bd
                    || (d == *bd
                        && plan
                            .canonical_cmp(bp)
                            .then(plan.initial.dir.cmp(&bp.initial.dir))
                            .is_lt())
            }
        };
        if better {
            best = Some((d, plan));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| CliError::NoStrategy("no strategy".into()))
}

fn fan_svg(sets: &[StrategySet], optimal: Option<&MotionPlan>) -> Result<String, CliError> {
    let mut runs: Vec<(Vec<Point>, bool)> = Vec::new();
    for set in sets {
        let game = Game::new(set.request.game.clone())?;
        for plan in &set.plans {
            let (_, visited) = game.play(plan)?;
            let pts = visited.iter().map(|g| g.needle.position()).collect();
            runs.push((pts, Some(plan) == optimal));
        }
    }
    let mut markers = Vec::new();
    if let Some(best) = optimal {
        let horizon = sets[0].request.game.horizon;
        let states = simulate_plan(best, &sets[0].request.game.kinematics, horizon)?;
        markers = best
            .rotation_steps()
            .iter()
            .map(|&k| states[k as usize].position())
            .collect();
    }
    let lines = runs
        .iter()
        .map(|(pts, best)| Polyline {
            points: pts,
            stroke: if *best { "crimson" } else { "steelblue" },
            width: if *best { 2.0 } else { 0.8 },
        })
        .collect();
    Ok(svg::render(&Plot {
        lines,
        markers,
        windows: sets[0].request.game.targets.clone(),
    }))
}

pub fn synthesize(cfg: &RunConfig, args: &SynthesizeArgs) -> Result<String, CliError> {
    cfg.validate()?;
    let reqs = requests(cfg, args)?;
    let sets = reqs
        .iter()
        .map(|r| synthesize_parallel(r, cfg.workers))
        .collect::<Result<Vec<_>, _>>()?;
    if sets.iter().all(StrategySet::is_empty) {
        return Err(CliError::NoStrategy("no strategy reaches the targets".into()));
    }
    let optimal = if args.optimal {
        Some(optimal_across(&sets)?)
    } else {
        None
    };
    let file = report::strategy_file(&sets, optimal.as_ref())?;
    let svg = match &args.svg_out {
        Some(_) => Some(fan_svg(&sets, optimal.as_ref())?),
        None => None,
    };
    if let (Some(path), Some(svg)) = (&args.svg_out, &svg) {
        write_file(path, svg)?;
    }
    match &args.out {
        Some(path) => {
            write_file(path, &file)?;
            let count: usize = sets.iter().map(StrategySet::len).sum();
            Ok(format!("plans={count}\n"))
        }
        None => Ok(file),
    }
}

pub struct TraceArgs {
    pub trace: PathBuf,
    pub out: Option<PathBuf>,
}

pub fn fit(cfg: &RunConfig, args: &TraceArgs) -> Result<String, CliError> {
    cfg.validate()?;
    let trace: ObservationTrace = traceio::load_trace(&args.trace)?;
    let opts = FitOptions {
        kinematics: cfg.kinematics,
        n_points: cfg.single_points()?,
        dev_bounds: cfg.dev_bounds,
        prefix_length: cfg.prefix_mm * f64::from(cfg.kinematics.scale),
        angle_grid: cfg.angle_grid()?,
        directions: vec![Direction::Positive, Direction::Negative],
        max_rotations: cfg.max_rotations,
    };
    let workers = cfg.workers;
    let report = fit_trace_with(&trace, &opts, |r| synthesize_parallel(r, workers))?;
    let record = report::fit_record(&report);
    if let Some(path) = &args.out {
        write_file(path, &record)?;
    }
    Ok(record)
}

pub fn sweep(cfg: &RunConfig, args: &TraceArgs) -> Result<String, CliError> {
    cfg.validate()?;
    let trace = traceio::load_trace(&args.trace)?;
    let workers = cfg.workers;
    let initial = cfg.pose(cfg.single_dir()?);
    let cells = plan_count_sweep_with(&trace, initial, &cfg.dev, &cfg.points, &cfg.kinematics, |r| {
        let mut r = r.clone();
        r.game.max_rotations = cfg.max_rotations;
        r.game.prune = cfg.prune;
        synthesize_parallel(&r, workers)
    })?;
    let table = report::sweep_table(&cells);
    if let Some(path) = &args.out {
        write_file(path, &table)?;
    }
    Ok(table)
}
