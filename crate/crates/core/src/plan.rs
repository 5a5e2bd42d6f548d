use arrayvec::ArrayVec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kinematics::{Direction, NeedleState};

/// Upper bound on bevel rotations per insertion.
pub const MAX_ROTATIONS: u8 = 2;

/// Initial needle pose: position in scaled units (fractional values allowed),
/// heading in radians and arc direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub dir: Direction,
}

impl Pose {
    pub const fn new(x: f64, y: f64, theta: f64, dir: Direction) -> Self {
        Self { x, y, theta, dir }
    }

    pub fn state(&self) -> NeedleState {
        NeedleState::new(self.x, self.y, self.theta, self.dir)
    }
}

impl From<&NeedleState> for Pose {
    fn from(s: &NeedleState) -> Self {
        Self::new(s.x, s.y, s.theta, s.dir)
    }
}

/// One deterministic control sequence: feed continuously, flipping the bevel
/// immediately before each listed step.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionPlan {
    rotation_steps: ArrayVec<u32, { MAX_ROTATIONS as usize }>,
    pub initial: Pose,
}

impl MotionPlan {
    pub fn new(initial: Pose, rotation_steps: &[u32]) -> Result<Self> {
        if rotation_steps.len() > MAX_ROTATIONS as usize {
            return Err(Error::InvalidPlan("more than two rotations"));
        }
        if rotation_steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPlan("rotation steps not strictly increasing"));
        }
        Ok(Self {
            rotation_steps: rotation_steps.iter().copied().collect(),
            initial,
        })
    }

    pub fn straight(initial: Pose) -> Self {
        Self {
            rotation_steps: ArrayVec::new(),
            initial,
        }
    }

    pub fn rotation_steps(&self) -> &[u32] {
        &self.rotation_steps
    }

    pub fn rotation_count(&self) -> u8 {
        self.rotation_steps.len() as u8
    }

    pub fn rotates_at(&self, step: u32) -> bool {
        self.rotation_steps.contains(&step)
    }

    /// Checks the plan against a horizon and rotation budget.
    pub fn validate(&self, horizon: u32, max_rotations: u8) -> Result<()> {
        if self.rotation_count() > max_rotations {
            return Err(Error::InvalidPlan("rotation count exceeds budget"));
        }
        if self.rotation_steps.iter().any(|&k| k >= horizon) {
            return Err(Error::InvalidPlan("rotation step beyond horizon"));
        }
        Ok(())
    }

    /// Canonical order: fewer rotations first, then lexicographic indices.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.rotation_count()
            .cmp(&other.rotation_count())
            .then_with(|| self.rotation_steps.as_slice().cmp(other.rotation_steps.as_slice()))
    }

    pub(crate) fn with_pushed(&self, step: u32) -> Self {
        let mut next = self.clone();
        next.rotation_steps.push(step);
        next
    }
}
