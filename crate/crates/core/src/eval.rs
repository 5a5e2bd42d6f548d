//! Trace fitting and plan-count sweeps.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::calibration::{
    default_angle_grid, estimate_insertion, initial_state, CalibrationRequest, CalibrationResult,
};
use crate::error::{Error, Result};
use crate::game::GameConfig;
use crate::kinematics::{Direction, KinematicsConfig};
use crate::plan::{MotionPlan, Pose, MAX_ROTATIONS};
use crate::synthesis::{min_dev_search_with, optimal_plan, StrategySet, SynthesisRequest};
use crate::trace::{select_targets, ObservationTrace};

/// Step-paired Euclidean error between a plan and an observation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deviation {
    pub avg: f64,
    pub max: f64,
}

/// Error of `plan` against `obs`, whose step indices count feeds from the
/// plan's initial pose. The plan is simulated for `horizon` feeds.
pub fn deviation_metrics(
    plan: &MotionPlan,
    cfg: &KinematicsConfig,
    obs: &ObservationTrace,
    horizon: u32,
) -> Result<Deviation> {
    let last = obs.last().step;
    if last > horizon {
        return Err(Error::Coverage {
            observed: last,
            horizon,
        });
    }
    let states = crate::kinematics::simulate_plan(plan, cfg, horizon)?;
    let (mut max, mut sum) = (0.0f64, 0.0f64);
    for p in obs.points() {
        let d = states[p.step as usize].position().distance(p.position());
        max = max.max(d);
        sum += d;
    }
    Ok(Deviation {
        avg: sum / obs.len() as f64,
        max,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub kinematics: KinematicsConfig,
    /// Target points selected from the post-calibration remainder.
    pub n_points: usize,
    pub dev_bounds: (i64, i64),
    /// Feed length used for calibration, micrometers.
    pub prefix_length: f64,
    pub angle_grid: Vec<f64>,
    pub directions: Vec<Direction>,
    pub max_rotations: u8,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            kinematics: KinematicsConfig::default(),
            n_points: 5,
            dev_bounds: (0, 5_000),
            prefix_length: 5_000.0,
            angle_grid: default_angle_grid(),
            directions: alloc::vec![Direction::Positive, Direction::Negative],
            max_rotations: MAX_ROTATIONS,
        }
    }
}

impl FitOptions {
    /// Feeds needed to cover the calibration prefix.
    pub fn prefix_steps(&self) -> u32 {
        libm::ceil(self.prefix_length / self.kinematics.step_length()) as u32
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub trace_label: String,
    pub theta0: f64,
    pub dev_used: i64,
    pub n_points: usize,
    pub actual_rotations: Vec<u32>,
    pub identified_rotations: Vec<u32>,
    pub avg_error: f64,
    pub max_error: f64,
    /// Size of the strategy set at `dev_used`.
    pub plan_count: usize,
    /// Observation step at which calibration handed over to synthesis.
    pub handover_step: u32,
    pub calibration: CalibrationResult,
    /// Winning plan in hand-over coordinates (steps relative to the
    /// hand-over).
    pub plan: MotionPlan,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FitError {
    /// Calibration succeeded but no plan fits within the deviation bounds.
    NoStrategy {
        calibration: CalibrationResult,
    },
    Other(Error),
}

impl From<Error> for FitError {
    fn from(e: Error) -> Self {
        FitError::Other(e)
    }
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::NoStrategy { calibration } => write!(
                f,
                "no strategy within deviation bounds (calibrated theta0={:.6} rad, dir={})",
                calibration.theta0,
                calibration.dir0.as_i32()
            ),
            FitError::Other(e) => fmt::Display::fmt(e, f),
        }
    }
}

impl core::error::Error for FitError {}

/// Full offline fitting pipeline: calibrate on the leading prefix, select
/// targets from the remainder, search the smallest deviation with a winning
/// plan, pick the optimal plan and measure its error on the remainder.
pub fn fit_trace_with<F>(
    obs: &ObservationTrace,
    opts: &FitOptions,
    synth: F,
) -> core::result::Result<FitReport, FitError>
where
    F: FnMut(&SynthesisRequest) -> Result<StrategySet>,
{
    opts.kinematics.validate()?;
    let start = obs.first().step;
    let prefix_steps = opts.prefix_steps();
    let handover = obs
        .points()
        .iter()
        .take_while(|p| p.step - start <= prefix_steps)
        .last()
        .expect("first point is always inside the prefix")
        .step;
    if handover - start < prefix_steps {
        return Err(Error::InsufficientData("trace does not cover the calibration prefix").into());
    }
    let prefix = obs.window(start, handover)?;
    let calibration = estimate_insertion(&CalibrationRequest {
        prefix,
        angle_grid: opts.angle_grid.clone(),
        directions: opts.directions.clone(),
        kinematics: opts.kinematics,
        fit_radius: false,
        radius_grid: Vec::new(),
    })?;
    let init = initial_state(&calibration);

    let remainder = obs.window(handover, obs.last().step)?;
    if remainder.len() < 2 {
        return Err(Error::InsufficientData("nothing observed after the calibration prefix").into());
    }
    let targets = select_targets(&remainder, opts.n_points, Some(init.position()))?;
    let horizon = remainder.span();
    let mut game = GameConfig::new(targets, horizon, opts.kinematics);
    game.max_rotations = opts.max_rotations;
    let req = SynthesisRequest::new(game, Pose::from(&init));

    let (dev, set) = match min_dev_search_with(&req, opts.dev_bounds.0, opts.dev_bounds.1, synth) {
        Ok(found) => found,
        Err(Error::NoStrategy) => return Err(FitError::NoStrategy { calibration }),
        Err(e) => return Err(e.into()),
    };
    let plan = optimal_plan(&set)?;
    let deviation = deviation_metrics(&plan, &opts.kinematics, &remainder, horizon)?;
    Ok(FitReport {
        trace_label: obs.meta.label.clone().unwrap_or_default(),
        theta0: calibration.theta0,
        dev_used: dev,
        n_points: opts.n_points,
        actual_rotations: obs.meta.actual_rotation_steps.clone(),
        identified_rotations: plan.rotation_steps().iter().map(|k| k + handover).collect(),
        avg_error: deviation.avg,
        max_error: deviation.max,
        plan_count: set.len(),
        handover_step: handover,
        calibration,
        plan,
    })
}

pub fn fit_trace(obs: &ObservationTrace, opts: &FitOptions) -> core::result::Result<FitReport, FitError> {
    fit_trace_with(obs, opts, crate::synthesis::synthesize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepCell {
    pub dev: i64,
    pub n_points: usize,
    pub plan_count: usize,
}

/// Plan counts for every `(dev, n_points)` combination, targets drawn from
/// `trace` (its steps counting feeds from `initial`). Cells are ordered by
/// `n_points`, then `dev`, each in the given order.
pub fn plan_count_sweep_with<F>(
    trace: &ObservationTrace,
    initial: Pose,
    devs: &[i64],
    n_points: &[usize],
    kinematics: &KinematicsConfig,
    mut synth: F,
) -> Result<Vec<SweepCell>>
where
    F: FnMut(&SynthesisRequest) -> Result<StrategySet>,
{
    if devs.is_empty() || n_points.is_empty() {
        return Err(Error::Config("sweep needs at least one deviation and one point count"));
    }
    let trace = trace.window(trace.first().step, trace.last().step)?;
    let horizon = trace.span();
    let start = initial.state().position();
    let mut cells = Vec::with_capacity(devs.len() * n_points.len());
    for &n in n_points {
        let targets = select_targets(&trace, n, Some(start))?;
        let base = SynthesisRequest::new(GameConfig::new(targets, horizon, *kinematics), initial);
        for &dev in devs {
            let set = synth(&base.with_dev(dev))?;
            cells.push(SweepCell {
                dev,
                n_points: n,
                plan_count: set.len(),
            });
        }
    }
    Ok(cells)
}

pub fn plan_count_sweep(
    trace: &ObservationTrace,
    initial: Pose,
    devs: &[i64],
    n_points: &[usize],
    kinematics: &KinematicsConfig,
) -> Result<Vec<SweepCell>> {
    plan_count_sweep_with(trace, initial, devs, n_points, kinematics, crate::synthesis::synthesize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::degrees;
    use crate::trace::{generate_trace, Noise, TraceMeta, TracePoint};
    use alloc::vec;

    fn origin(theta: f64) -> Pose {
        Pose::new(0.0, 0.0, theta, Direction::Positive)
    }

    fn generated(steps: &[u32], horizon: u32, noise: Noise) -> ObservationTrace {
        let plan = MotionPlan::new(origin(degrees(3.6)), steps).unwrap();
        generate_trace(&plan, &KinematicsConfig::default(), horizon, noise).unwrap()
    }

    #[test]
    fn metrics_for_exact_offset_and_outlier() {
        let cfg = KinematicsConfig::default();
        let plan = MotionPlan::new(origin(0.0), &[40]).unwrap();
        let clean = generate_trace(&plan, &cfg, 99, Noise::NONE).unwrap();
        assert_eq!(
            deviation_metrics(&plan, &cfg, &clean, 99).unwrap(),
            Deviation { avg: 0.0, max: 0.0 }
        );

        let shifted: Vec<TracePoint> = clean
            .points()
            .iter()
            .map(|p| TracePoint::new(p.step, p.x, p.y + 1_000))
            .collect();
        let shifted = ObservationTrace::new(shifted, TraceMeta::default()).unwrap();
        assert_eq!(
            deviation_metrics(&plan, &cfg, &shifted, 99).unwrap(),
            Deviation {
                avg: 1_000.0,
                max: 1_000.0
            }
        );

        let mut pts = clean.points().to_vec();
        pts[57].x += 2_000;
        let outlier = ObservationTrace::new(pts, TraceMeta::default()).unwrap();
        let d = deviation_metrics(&plan, &cfg, &outlier, 99).unwrap();
        assert_eq!(d.max, 2_000.0);
        assert!((d.avg - 20.0).abs() < 1e-12);

        assert_eq!(
            deviation_metrics(&plan, &cfg, &clean, 98),
            Err(Error::Coverage {
                observed: 99,
                horizon: 98
            })
        );
    }

    #[test]
    fn noiseless_fit_recovers_rotation() {
        let obs = generated(&[30], 100, Noise::NONE);
        let report = fit_trace(&obs, &FitOptions::default()).unwrap();
        assert_eq!(report.identified_rotations, vec![30]);
        assert_eq!(report.actual_rotations, vec![30]);
        assert_eq!(report.max_error, 0.0);
        assert_eq!(report.avg_error, 0.0);
        assert_eq!(report.theta0, degrees(3.6));
        assert_eq!(report.handover_step, 8);
    }

    #[test]
    fn report_errors_are_reproducible_from_the_plan() {
        let obs = generated(&[25, 61], 100, Noise::new(300, 11));
        let r = fit_trace(&obs, &FitOptions::default()).unwrap();
        let remainder = obs.window(r.handover_step, obs.last().step).unwrap();
        let d = deviation_metrics(&r.plan, &KinematicsConfig::default(), &remainder, remainder.span()).unwrap();
        assert_eq!((d.avg, d.max), (r.avg_error, r.max_error));
        assert!(r.max_error >= r.avg_error && r.avg_error >= 0.0);
    }

    #[test]
    fn short_trace_is_insufficient() {
        let obs = generated(&[], 6, Noise::NONE);
        assert!(matches!(
            fit_trace(&obs, &FitOptions::default()),
            Err(FitError::Other(Error::InsufficientData(_)))
        ));
    }

    #[test]
    fn no_strategy_carries_calibration() {
        let mut pts = generated(&[], 60, Noise::NONE).points().to_vec();
        pts.last_mut().unwrap().y += 30_000;
        let obs = ObservationTrace::new(pts, TraceMeta::default()).unwrap();
        let opts = FitOptions {
            dev_bounds: (0, 100),
            ..Default::default()
        };
        match fit_trace(&obs, &opts) {
            Err(FitError::NoStrategy { calibration }) => assert_eq!(calibration.theta0, degrees(3.6)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_trends() {
        let obs = generated(&[20, 45], 70, Noise::NONE);
        let devs = [20, 50, 200];
        let nps = [1, 3, 5];
        let cells = plan_count_sweep(&obs, origin(degrees(3.6)), &devs, &nps, &KinematicsConfig::default()).unwrap();
        assert_eq!(cells.len(), 9);
        assert!(cells.iter().all(|c| c.plan_count >= 1));
        for row in cells.chunks(3) {
            assert!(row.windows(2).all(|w| w[0].plan_count <= w[1].plan_count));
        }
        for d in 0..3 {
            let col: Vec<usize> = (0..3).map(|n| cells[n * 3 + d].plan_count).collect();
            assert!(col.windows(2).all(|w| w[0] >= w[1]), "{col:?}");
        }
    }
}
