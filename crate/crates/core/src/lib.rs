//! Planar bevel-tip needle steering as a discretized reachability game.
//!
//! The needle tip follows circular arcs of fixed curvature; rotating the
//! shaft flips the arc direction. A motion plan is the set of (at most two)
//! feed steps before which the bevel is flipped. This crate holds the pure,
//! allocation-light machinery:
//!
//! - [`kinematics`]: closed-form arc steps, direction flips, plan simulation.
//! - [`game`]: the phase automaton with ordered target windows.
//! - [`synthesis`]: exhaustive enumeration of winning plans.
//! - [`calibration`]: insertion-angle estimation from a rotation-free prefix.
//! - [`trace`]: observation traces, target selection, synthetic generation.
//! - [`eval`]: trace fitting and plan-count sweeps.
//!
//! Positions cross module boundaries as fixed-point integers (see
//! [`units`]); the kinematics keep full floating precision internally and
//! only quantize on export.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod calibration;
pub mod error;
pub mod eval;
pub mod game;
pub mod kinematics;
pub mod plan;
pub mod synthesis;
pub mod trace;
pub mod units;

pub use calibration::{estimate_insertion, initial_state, CalibrationRequest, CalibrationResult};
pub use error::{Error, Result};
pub use eval::{deviation_metrics, fit_trace, plan_count_sweep, FitError, FitOptions, FitReport, SweepCell};
pub use game::{classify_run, in_window, Action, Game, GameConfig, GameState, Outcome, Phase, TargetSpec};
pub use kinematics::{arc_step, flip_direction, simulate_plan, Direction, KinematicsConfig, NeedleState, Stepper};
pub use plan::{MotionPlan, Pose, MAX_ROTATIONS};
pub use synthesis::{min_dev_search, optimal_plan, synthesize, StrategySet, SynthesisRequest};
pub use trace::{generate_trace, select_targets, Noise, ObservationTrace, TraceMeta, TracePoint};
pub use units::{Point, Units};
