//! Circular-arc motion of a bevel-tip needle in the plane.
//!
//! Each feed advances the tip by arc length `s = v * dt` along a circle of
//! the configured radius; the turning sense is given by [`Direction`].
//! Rotating the shaft flips the direction without moving the tip.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::plan::{MotionPlan, MAX_ROTATIONS};
use crate::units::{round_to_fixed, Point};

/// Arc turning sense: `Positive` turns counter-clockwise (+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Positive,
    Negative,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Positive => Direction::Negative,
            Direction::Negative => Direction::Positive,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Self> {
        match sign {
            1 => Some(Direction::Positive),
            -1 => Some(Direction::Negative),
            _ => None,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Direction::Positive => 1,
            Direction::Negative => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicsConfig {
    /// Insertion speed, micrometers per second.
    pub velocity: f64,
    /// Time step, milliseconds.
    pub dt_ms: f64,
    /// Arc radius, micrometers.
    pub radius: f64,
    /// Time steps consumed by one rotation.
    pub rotation_dwell: u32,
    /// Integer units per millimeter.
    pub scale: u32,
    /// Bevel angle in degrees (metadata only).
    pub bevel_angle_deg: f64,
    /// Rotation motor step in degrees (metadata only).
    pub motor_step_deg: f64,
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        Self {
            velocity: 700.0,
            dt_ms: 1000.0,
            radius: 50_000.0,
            rotation_dwell: 0,
            scale: 1000,
            bevel_angle_deg: 45.0,
            motor_step_deg: 1.8,
        }
    }
}

impl KinematicsConfig {
    /// Arc length of one feed, micrometers.
    pub fn step_length(&self) -> f64 {
        self.velocity * self.dt_ms / 1000.0
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.radius
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.velocity) {
            return Err(Error::Config("velocity must be positive"));
        }
        if !positive(self.dt_ms) {
            return Err(Error::Config("time step must be positive"));
        }
        if !positive(self.radius) {
            return Err(Error::Config("radius must be positive"));
        }
        if self.scale == 0 {
            return Err(Error::Config("scale must be positive"));
        }
        let s = self.step_length();
        if !positive(s) {
            return Err(Error::Config("step length must be positive"));
        }
        // At most one radian of turning per feed.
        if s > self.radius {
            return Err(Error::Config(
                "step length must be much smaller than the arc circumference",
            ));
        }
        Ok(())
    }

    pub fn stepper(&self) -> Result<Stepper> {
        self.validate()?;
        Ok(Stepper::new(self))
    }
}

/// Physical needle state. Positions are kept in floating point (scaled
/// units) and quantized by [`NeedleState::position`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeedleState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub dir: Direction,
    pub rotations_used: u8,
    pub step_index: u32,
}

impl NeedleState {
    pub fn new(x: f64, y: f64, theta: f64, dir: Direction) -> Self {
        Self {
            x,
            y,
            theta,
            dir,
            rotations_used: 0,
            step_index: 0,
        }
    }

    /// Fixed-point tip position, rounded half away from zero.
    pub fn position(&self) -> Point {
        // Positions far outside i64 cannot arise from a validated config and
        // a finite horizon; saturate rather than fail.
        let q = |v: f64| round_to_fixed(v).unwrap_or(if v < 0.0 { i64::MIN } else { i64::MAX });
        Point::new(q(self.x), q(self.y))
    }
}

/// Precomputed per-feed arc geometry for a validated configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stepper {
    turn: f64,
    half_turn: f64,
    chord: f64,
    step_length: f64,
    dwell: u32,
}

impl Stepper {
    fn new(cfg: &KinematicsConfig) -> Self {
        let s = cfg.step_length();
        let turn = s / cfg.radius;
        let half_turn = s / (2.0 * cfg.radius);
        Self {
            turn,
            half_turn,
            chord: 2.0 * cfg.radius * libm::sin(half_turn),
            step_length: s,
            dwell: cfg.rotation_dwell,
        }
    }

    /// Heading change per feed (unsigned).
    pub fn turn(&self) -> f64 {
        self.turn
    }

    pub fn chord(&self) -> f64 {
        self.chord
    }

    pub fn step_length(&self) -> f64 {
        self.step_length
    }

    /// Advances one feed along the current arc.
    ///
    /// The displacement is the chord of the traversed arc, taken along the
    /// mean heading; this equals `(sin θ' - sin θ, cos θ - cos θ') / (dir κ)`
    /// without the cancellation of the difference form.
    pub fn step(&self, state: &NeedleState) -> NeedleState {
        let sign = state.dir.sign();
        let mid = state.theta + sign * self.half_turn;
        NeedleState {
            x: state.x + self.chord * libm::cos(mid),
            y: state.y + self.chord * libm::sin(mid),
            theta: state.theta + sign * self.turn,
            step_index: state.step_index + 1,
            ..*state
        }
    }

    pub fn flip(&self, state: &NeedleState, max_rotations: u8) -> Result<NeedleState> {
        if state.rotations_used >= max_rotations {
            return Err(Error::PlanInfeasible);
        }
        Ok(NeedleState {
            dir: state.dir.flipped(),
            rotations_used: state.rotations_used + 1,
            step_index: state.step_index + self.dwell,
            ..*state
        })
    }
}

/// Applies one feed step.
pub fn arc_step(state: &NeedleState, cfg: &KinematicsConfig) -> Result<NeedleState> {
    Ok(cfg.stepper()?.step(state))
}

/// Flips the bevel, consuming one unit of the rotation budget.
pub fn flip_direction(state: &NeedleState, cfg: &KinematicsConfig, max_rotations: u8) -> Result<NeedleState> {
    cfg.stepper()?.flip(state, max_rotations)
}

/// Simulates `plan` for `horizon` feeds, returning `horizon + 1` states.
///
/// The flip for rotation index `k` happens immediately before the feed that
/// leads from `trace[k]` to `trace[k + 1]`.
pub fn simulate_plan(plan: &MotionPlan, cfg: &KinematicsConfig, horizon: u32) -> Result<Vec<NeedleState>> {
    let stepper = cfg.stepper()?;
    plan.validate(horizon, MAX_ROTATIONS)?;
    Ok(stepper.simulate(plan, horizon))
}

impl Stepper {
    pub(crate) fn simulate(&self, plan: &MotionPlan, horizon: u32) -> Vec<NeedleState> {
        let mut trace = Vec::with_capacity(horizon as usize + 1);
        let mut state = plan.initial.state();
        trace.push(state);
        for k in 0..horizon {
            if plan.rotates_at(k) {
                // Validated plans never exceed the budget.
                state = self.flip(&state, MAX_ROTATIONS).expect("validated plan");
            }
            state = self.step(&state);
            trace.push(state);
        }
        trace
    }
}
