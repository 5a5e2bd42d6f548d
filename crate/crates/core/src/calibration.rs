//! Insertion-angle estimation from a rotation-free prefix.
//!
//! Every candidate `(theta, dir[, radius])` is simulated as a plain arc
//! from the first observed point; the candidate with the smallest maximum
//! step-paired residual wins.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinematics::{Direction, KinematicsConfig, NeedleState};
use crate::trace::ObservationTrace;
use crate::units::Point;

pub fn degrees(deg: f64) -> f64 {
    deg * (PI / 180.0)
}

/// Symmetric angle grid `k * pitch` for `|k * pitch| <= max`, in radians.
pub fn angle_grid(max_deg: f64, pitch_deg: f64) -> Result<Vec<f64>> {
    if !(pitch_deg.is_finite() && pitch_deg > 0.0 && max_deg.is_finite() && max_deg >= 0.0) {
        return Err(Error::Config(
            "angle grid needs a positive pitch and non-negative extent",
        ));
    }
    // Small epsilon so that e.g. 18 / 1.8 counts as 10 cells.
    let cells = libm::floor(max_deg / pitch_deg + 1e-9) as i64;
    Ok((-cells..=cells).map(|k| degrees(k as f64 * pitch_deg)).collect())
}

/// -18° to +18° in steps of 1.8°.
pub fn default_angle_grid() -> Vec<f64> {
    angle_grid(18.0, 1.8).expect("valid default grid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRequest {
    pub prefix: ObservationTrace,
    pub angle_grid: Vec<f64>,
    pub directions: Vec<Direction>,
    pub kinematics: KinematicsConfig,
    pub fit_radius: bool,
    pub radius_grid: Vec<f64>,
}

impl CalibrationRequest {
    pub fn new(prefix: ObservationTrace, kinematics: KinematicsConfig) -> Self {
        Self {
            prefix,
            angle_grid: default_angle_grid(),
            directions: alloc::vec![Direction::Positive, Direction::Negative],
            kinematics,
            fit_radius: false,
            radius_grid: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationResult {
    pub theta0: f64,
    pub dir0: Direction,
    pub origin: Point,
    pub radius_used: f64,
    pub residual_max: f64,
    pub residual_avg: f64,
    /// Last observed prefix point and its step offset from the first.
    pub last_point: Point,
    pub prefix_steps: u32,
    /// Fitted arc state at the last prefix step.
    pub fitted_end: NeedleState,
}

struct Candidate {
    theta: f64,
    dir: Direction,
    radius: f64,
    max: f64,
    avg: f64,
    end: NeedleState,
}

impl Candidate {
    fn rank(&self, other: &Self) -> Ordering {
        self.max
            .total_cmp(&other.max)
            .then(self.avg.total_cmp(&other.avg))
            .then(self.theta.abs().total_cmp(&other.theta.abs()))
            .then(self.dir.cmp(&other.dir))
    }
}

/// Grid search for the insertion angle and arc direction (and optionally
/// the radius) that best explain a rotation-free prefix.
pub fn estimate_insertion(req: &CalibrationRequest) -> Result<CalibrationResult> {
    let prefix = &req.prefix;
    if prefix.len() < 2 {
        return Err(Error::InsufficientData(
            "calibration needs at least two observed points",
        ));
    }
    if req.angle_grid.is_empty() || req.directions.is_empty() {
        return Err(Error::Config("calibration candidate grids must be non-empty"));
    }
    if req.angle_grid.iter().any(|a| !a.is_finite()) {
        return Err(Error::Config("candidate angles must be finite"));
    }
    let radii: Vec<f64> = if req.fit_radius {
        if req.radius_grid.is_empty() {
            return Err(Error::Config("radius fitting needs a non-empty radius grid"));
        }
        req.radius_grid.clone()
    } else {
        alloc::vec![req.kinematics.radius]
    };

    let start = prefix.first();
    let origin = start.position();
    let span = prefix.span();
    let mut best: Option<Candidate> = None;
    for &radius in &radii {
        let stepper = KinematicsConfig {
            radius,
            ..req.kinematics
        }
        .stepper()?;
        for &theta in &req.angle_grid {
            for &dir in &req.directions {
                let mut state = NeedleState::new(origin.x as f64, origin.y as f64, theta, dir);
                let (mut max, mut sum) = (0.0f64, 0.0f64);
                let mut at = 0;
                for p in prefix.points() {
                    while at < p.step - start.step {
                        state = stepper.step(&state);
                        at += 1;
                    }
                    let r = state.position().distance(p.position());
                    max = max.max(r);
                    sum += r;
                }
                debug_assert_eq!(at, span);
                let cand = Candidate {
                    theta,
                    dir,
                    radius,
                    max,
                    avg: sum / prefix.len() as f64,
                    end: state,
                };
                // Strict improvement keeps the earliest radius on full ties.
                if best.as_ref().is_none_or(|b| cand.rank(b).is_lt()) {
                    best = Some(cand);
                }
            }
        }
    }
    let best = best.expect("non-empty grids");
    Ok(CalibrationResult {
        theta0: best.theta,
        dir0: best.dir,
        origin,
        radius_used: best.radius,
        residual_max: best.max,
        residual_avg: best.avg,
        last_point: prefix.last().position(),
        prefix_steps: span,
        fitted_end: best.end,
    })
}

/// Hand-over state for synthesis: the fitted arc state at the last prefix
/// step with the rotation count and step counter reset. The position is
/// snapped to the last observed point whenever the two differ in fixed
/// point, so the state always sits on the observation.
pub fn initial_state(res: &CalibrationResult) -> NeedleState {
    let mut state = res.fitted_end;
    if state.position() != res.last_point {
        state.x = res.last_point.x as f64;
        state.y = res.last_point.y as f64;
    }
    state.rotations_used = 0;
    state.step_index = 0;
    state
}
