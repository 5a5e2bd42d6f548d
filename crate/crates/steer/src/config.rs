//! Flat `key = value` run configuration.
//!
//! Every key can also be given as a command-line flag of the same name
//! (underscores become dashes); flags are applied after the file.

use std::path::Path;

use needle_core::calibration::{angle_grid, degrees};
use needle_core::{Direction, KinematicsConfig, Pose, MAX_ROTATIONS};

use crate::error::CliError;

/// Initial arc direction; `Both` runs synthesis for each direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirChoice {
    One(Direction),
    Both,
}

impl DirChoice {
    pub fn directions(self) -> Vec<Direction> {
        match self {
            DirChoice::One(d) => vec![d],
            DirChoice::Both => vec![Direction::Positive, Direction::Negative],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub kinematics: KinematicsConfig,
    pub max_rotations: u8,
    /// Feeds to simulate or synthesize over; `None` derives it from the
    /// trace when one is given.
    pub horizon: Option<u32>,
    pub prune: bool,
    pub x0: f64,
    pub y0: f64,
    pub theta0_deg: f64,
    pub dir: DirChoice,
    pub dev: Vec<i64>,
    pub dev_bounds: (i64, i64),
    pub points: Vec<usize>,
    pub rotations: Option<u8>,
    pub seed: Option<u64>,
    pub noise: i64,
    pub angle_max_deg: f64,
    pub angle_pitch_deg: f64,
    pub prefix_mm: f64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kinematics: KinematicsConfig::default(),
            max_rotations: MAX_ROTATIONS,
            horizon: None,
            prune: true,
            x0: 0.0,
            y0: 0.0,
            theta0_deg: 0.0,
            dir: DirChoice::One(Direction::Positive),
            dev: vec![350],
            dev_bounds: (0, 5_000),
            points: vec![5],
            rotations: None,
            seed: None,
            noise: 0,
            angle_max_deg: 18.0,
            angle_pitch_deg: 1.8,
            prefix_mm: 5.0,
            workers: 1,
        }
    }
}

pub const KEYS: &[&str] = &[
    "velocity",
    "dt_ms",
    "radius",
    "rotation_dwell",
    "scale",
    "bevel_angle",
    "motor_step",
    "max_rotations",
    "horizon",
    "prune",
    "x0",
    "y0",
    "theta0",
    "dir",
    "dev",
    "dev_bounds",
    "points",
    "rotations",
    "seed",
    "noise",
    "angle_max",
    "angle_pitch",
    "prefix_mm",
    "workers",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::Validation(format!("`{key}` needs at least one value")));
    }
    Ok(items)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let k = &mut self.kinematics;
        match key {
            "velocity" => k.velocity = parse(key, value)?,
            "dt_ms" => k.dt_ms = parse(key, value)?,
            "radius" => k.radius = parse(key, value)?,
            "rotation_dwell" => k.rotation_dwell = parse(key, value)?,
            "scale" => k.scale = parse(key, value)?,
            "bevel_angle" => k.bevel_angle_deg = parse(key, value)?,
            "motor_step" => k.motor_step_deg = parse(key, value)?,
            "max_rotations" => self.max_rotations = parse(key, value)?,
            "horizon" => self.horizon = Some(parse(key, value)?),
            "prune" => self.prune = parse(key, value)?,
            "x0" => self.x0 = parse(key, value)?,
            "y0" => self.y0 = parse(key, value)?,
            "theta0" => self.theta0_deg = parse(key, value)?,
            "dir" => {
                self.dir = match value.trim() {
                    "+1" | "1" => DirChoice::One(Direction::Positive),
                    "-1" => DirChoice::One(Direction::Negative),
                    "both" => DirChoice::Both,
                    _ => {
                        return Err(CliError::Validation(format!(
                            "`dir` must be +1, -1 or both, got `{value}`"
                        )))
                    }
                }
            }
            "dev" => self.dev = parse_list(key, value)?,
            "dev_bounds" => {
                let (lo, hi) = value
                    .split_once(':')
                    .ok_or_else(|| CliError::Validation(format!("`dev_bounds` must be lo:hi, got `{value}`")))?;
                self.dev_bounds = (parse(key, lo)?, parse(key, hi)?);
            }
            "points" => self.points = parse_list(key, value)?,
            "rotations" => self.rotations = Some(parse(key, value)?),
            "seed" => self.seed = Some(parse(key, value)?),
            "noise" => self.noise = parse(key, value)?,
            "angle_max" => self.angle_max_deg = parse(key, value)?,
            "angle_pitch" => self.angle_pitch_deg = parse(key, value)?,
            "prefix_mm" => self.prefix_mm = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            _ => return Err(CliError::Validation(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Validation(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Re-checks every module-level invariant.
    pub fn validate(&self) -> Result<(), CliError> {
        self.kinematics.validate()?;
        let fail = |m: &str| Err(CliError::Validation(m.to_string()));
        if self.max_rotations > MAX_ROTATIONS {
            return fail("max_rotations must be at most 2");
        }
        if self.horizon == Some(0) {
            return fail("horizon must be positive");
        }
        if let Some(n) = self.rotations {
            if n > self.max_rotations {
                return fail("rotations exceeds max_rotations");
            }
        }
        if self.dev.iter().any(|&d| d < 0) {
            return fail("dev must be non-negative");
        }
        if self.dev_bounds.0 < 0 || self.dev_bounds.0 > self.dev_bounds.1 {
            return fail("dev_bounds must satisfy 0 <= lo <= hi");
        }
        if self.points.contains(&0) {
            return fail("points must be positive");
        }
        if self.noise < 0 {
            return fail("noise must be non-negative");
        }
        if !(self.x0.is_finite() && self.y0.is_finite() && self.theta0_deg.is_finite()) {
            return fail("initial pose must be finite");
        }
        if !(self.prefix_mm.is_finite() && self.prefix_mm > 0.0) {
            return fail("prefix_mm must be positive");
        }
        if self.workers == 0 {
            return fail("workers must be positive");
        }
        self.angle_grid()?;
        Ok(())
    }

    pub fn angle_grid(&self) -> Result<Vec<f64>, CliError> {
        Ok(angle_grid(self.angle_max_deg, self.angle_pitch_deg)?)
    }

    pub fn pose(&self, dir: Direction) -> Pose {
        Pose::new(self.x0, self.y0, degrees(self.theta0_deg), dir)
    }

    /// The single configured direction, rejecting `both`.
    pub fn single_dir(&self) -> Result<Direction, CliError> {
        match self.dir {
            DirChoice::One(d) => Ok(d),
            DirChoice::Both => Err(CliError::Validation(
                "`dir = both` is only supported by synthesize".into(),
            )),
        }
    }

    pub fn single_dev(&self) -> Result<i64, CliError> {
        match self.dev.as_slice() {
            [d] => Ok(*d),
            _ => Err(CliError::Validation("expected a single `dev` value".into())),
        }
    }

    pub fn single_points(&self) -> Result<usize, CliError> {
        match self.points.as_slice() {
            [n] => Ok(*n),
            _ => Err(CliError::Validation("expected a single `points` value".into())),
        }
    }

    /// Seed for stochastic commands; mandatory whenever noise is requested.
    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Validation("`seed` is mandatory when `noise` is non-zero".into()))
    }
}
