//! Fixed-point scaling between millimeters and integer units.
//!
//! With the default scale of 1000 units per millimeter one unit is one
//! micrometer, which is the unit used for every exported position.

use crate::error::{Error, Result};

/// Integer units per millimeter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Units {
    scale: u32,
}

impl Units {
    pub const DEFAULT_SCALE: u32 = 1000;

    pub fn new(scale: u32) -> Result<Self> {
        if scale == 0 {
            return Err(Error::Config("scale must be positive"));
        }
        Ok(Self { scale })
    }

    pub fn scale(self) -> u32 {
        self.scale
    }

    /// Converts millimeters to fixed-point, rounding half away from zero.
    pub fn to_fixed(self, mm: f64) -> Result<i64> {
        round_to_fixed(mm * f64::from(self.scale))
    }

    pub fn from_fixed(self, value: i64) -> f64 {
        value as f64 / f64::from(self.scale)
    }
}

impl Default for Units {
    fn default() -> Self {
        Self {
            scale: Self::DEFAULT_SCALE,
        }
    }
}

/// Rounds an already-scaled value half away from zero.
pub fn round_to_fixed(scaled: f64) -> Result<i64> {
    // i64::MAX as f64 rounds up to 2^63, which is itself out of range.
    const LIMIT: f64 = 9_223_372_036_854_775_808.0;
    let rounded = libm::round(scaled);
    if !rounded.is_finite() || !(-LIMIT..LIMIT).contains(&rounded) {
        return Err(Error::Range);
    }
    Ok(rounded as i64)
}

/// Fixed-point position in scaled units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn distance_sq(self, other: Point) -> i128 {
        let dx = i128::from(self.x - other.x);
        let dy = i128::from(self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::sqrt(self.distance_sq(other) as f64)
    }

    /// Chebyshev (max-coordinate) distance.
    pub fn chebyshev(self, other: Point) -> i64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}
