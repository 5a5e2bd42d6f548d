//! The discretized reachability game.
//!
//! Each step the controller either rotates the bevel (at most once per feed
//! and within the rotation budget) or lets the environment feed the needle.
//! After a feed the tip is checked against the ordered target windows;
//! consuming the last window wins, running out of feeds loses.

use alloc::vec::Vec;
use arrayvec::ArrayVec;

use crate::error::{Error, Result};
use crate::kinematics::{KinematicsConfig, NeedleState, Stepper};
use crate::plan::{MotionPlan, MAX_ROTATIONS};
use crate::units::Point;

/// Target point with an inclusive square window of half-width `dev`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TargetSpec {
    pub x: i64,
    pub y: i64,
    pub dev: i64,
}

impl TargetSpec {
    pub const fn new(x: i64, y: i64, dev: i64) -> Self {
        Self { x, y, dev }
    }

    pub fn center(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Inclusive window test on fixed-point coordinates.
pub fn in_window(pos: Point, target: &TargetSpec) -> bool {
    pos.x >= target.x - target.dev
        && pos.x <= target.x + target.dev
        && pos.y >= target.y - target.dev
        && pos.y <= target.y + target.dev
}

/// Automaton locations. The payload is the number of rotations performed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Controller chooses between rotating and feeding.
    Decide(u8),
    /// Feed in progress.
    Wait,
    /// Bevel rotation in progress.
    Turn(u8),
    Fail,
    /// Last target reached with the given rotation count.
    Reached(u8),
    Success(u8),
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Fail | Phase::Success(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Rotate,
    /// Uncontrollable feed. Homogeneous tissue adds no disturbance.
    Step,
}

/// Terminal result of playing a plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success(u8),
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig {
    pub targets: Vec<TargetSpec>,
    pub max_rotations: u8,
    /// Number of feeds available.
    pub horizon: u32,
    pub kinematics: KinematicsConfig,
    /// Fail early once the current window is out of reach. Never changes
    /// outcomes, only cuts work.
    pub prune: bool,
}

impl GameConfig {
    pub fn new(targets: Vec<TargetSpec>, horizon: u32, kinematics: KinematicsConfig) -> Self {
        Self {
            targets,
            max_rotations: MAX_ROTATIONS,
            horizon,
            kinematics,
            prune: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Config("target list is empty"));
        }
        if self.targets.iter().any(|t| t.dev < 0) {
            return Err(Error::Config("target deviation must be non-negative"));
        }
        if self.max_rotations > MAX_ROTATIONS {
            return Err(Error::Config("at most two rotations are allowed"));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive"));
        }
        self.kinematics.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameState {
    pub phase: Phase,
    pub needle: NeedleState,
    pub next_target: usize,
    /// Feeds performed so far.
    pub feeds: u32,
    turned_this_step: bool,
}

impl GameState {
    pub fn new(needle: NeedleState) -> Self {
        Self {
            phase: Phase::Decide(needle.rotations_used),
            needle,
            next_target: 0,
            feeds: 0,
            turned_this_step: false,
        }
    }
}

/// A validated game with precomputed kinematics.
#[derive(Clone, Debug)]
pub struct Game {
    cfg: GameConfig,
    stepper: Stepper,
}

impl Game {
    pub fn new(cfg: GameConfig) -> Result<Self> {
        cfg.validate()?;
        let stepper = cfg.kinematics.stepper()?;
        Ok(Self { cfg, stepper })
    }

    pub fn config(&self) -> &GameConfig {
        &self.cfg
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }

    pub fn can_rotate(&self, gs: &GameState) -> bool {
        matches!(gs.phase, Phase::Decide(_))
            && !gs.turned_this_step
            && gs.needle.rotations_used < self.cfg.max_rotations
    }

    /// Plays one action from a `Decide` phase and resolves the intermediate
    /// locations. Returns the resulting state (in `Decide`, `Fail` or
    /// `Success`) and the locations passed on the way.
    pub fn advance_traced(&self, gs: &GameState, action: Action) -> Result<(GameState, ArrayVec<Phase, 3>)> {
        if !matches!(gs.phase, Phase::Decide(_)) {
            return Err(Error::IllegalAction("game already decided"));
        }
        let mut path = ArrayVec::new();
        let mut next = *gs;
        match action {
            Action::Rotate => {
                if gs.turned_this_step {
                    return Err(Error::IllegalAction("already rotated before this feed"));
                }
                if gs.needle.rotations_used >= self.cfg.max_rotations {
                    return Err(Error::IllegalAction("rotation budget exhausted"));
                }
                next.needle = self
                    .stepper
                    .flip(&gs.needle, self.cfg.max_rotations)
                    .map_err(|_| Error::IllegalAction("rotation budget exhausted"))?;
                next.turned_this_step = true;
                path.push(Phase::Turn(next.needle.rotations_used));
                next.phase = Phase::Decide(next.needle.rotations_used);
            }
            Action::Step => {
                path.push(Phase::Wait);
                next.needle = self.stepper.step(&gs.needle);
                next.feeds += 1;
                next.turned_this_step = false;
                let pos = next.needle.position();
                let targets = &self.cfg.targets;
                while next.next_target < targets.len() && in_window(pos, &targets[next.next_target]) {
                    next.next_target += 1;
                }
                let rotations = next.needle.rotations_used;
                next.phase = if next.next_target == targets.len() {
                    path.push(Phase::Reached(rotations));
                    Phase::Success(rotations)
                } else if next.feeds >= self.cfg.horizon || (self.cfg.prune && self.out_of_reach(&next)) {
                    Phase::Fail
                } else {
                    Phase::Decide(rotations)
                };
            }
        }
        path.push(next.phase);
        Ok((next, path))
    }

    pub fn advance(&self, gs: &GameState, action: Action) -> Result<GameState> {
        self.advance_traced(gs, action).map(|(s, _)| s)
    }

    /// Conservative reachability bound: the tip moves at most one arc length
    /// per feed, and the fixed-point rounding adds at most half a unit.
    fn out_of_reach(&self, gs: &GameState) -> bool {
        let target = &self.cfg.targets[gs.next_target];
        let remaining = f64::from(self.cfg.horizon - gs.feeds);
        let gap_x = (gs.needle.x - target.x as f64).abs();
        let gap_y = (gs.needle.y - target.y as f64).abs();
        let gap = gap_x.max(gap_y) - target.dev as f64;
        gap > remaining * self.stepper.step_length() + 1.0
    }

    /// Plays `plan` to a terminal phase, returning every state visited after
    /// each feed (the first entry is the initial state).
    pub fn play(&self, plan: &MotionPlan) -> Result<(Outcome, Vec<GameState>)> {
        plan.validate(self.cfg.horizon, self.cfg.max_rotations)?;
        let mut gs = GameState::new(plan.initial.state());
        let mut visited = alloc::vec![gs];
        loop {
            match gs.phase {
                Phase::Success(x) => return Ok((Outcome::Success(x), visited)),
                Phase::Fail => return Ok((Outcome::Fail, visited)),
                _ => {}
            }
            if plan.rotates_at(gs.feeds) {
                gs = self.advance(&gs, Action::Rotate)?;
            }
            gs = self.advance(&gs, Action::Step)?;
            visited.push(gs);
        }
    }
}

/// Free-function form of [`Game::advance`].
pub fn advance(gs: &GameState, action: Action, cfg: &GameConfig) -> Result<GameState> {
    Game::new(cfg.clone())?.advance(gs, action)
}

/// Deterministic outcome of playing `plan` under `cfg`.
pub fn classify_run(plan: &MotionPlan, cfg: &GameConfig) -> Result<Outcome> {
    Game::new(cfg.clone())?.play(plan).map(|(o, _)| o)
}
