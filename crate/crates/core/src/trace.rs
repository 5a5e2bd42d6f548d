//! Observation traces and synthetic trace generation.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::TargetSpec;
use crate::kinematics::{simulate_plan, KinematicsConfig};
use crate::plan::MotionPlan;
use crate::units::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TracePoint {
    pub step: u32,
    pub x: i64,
    pub y: i64,
}

impl TracePoint {
    pub const fn new(step: u32, x: i64, y: i64) -> Self {
        Self { step, x, y }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceMeta {
    /// Ground-truth rotation steps, when known.
    pub actual_rotation_steps: Vec<u32>,
    pub label: Option<String>,
}

/// Recorded tip positions with strictly increasing step indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationTrace {
    points: Vec<TracePoint>,
    pub meta: TraceMeta,
}

impl ObservationTrace {
    pub fn new(points: Vec<TracePoint>, meta: TraceMeta) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Trace("trace is empty"));
        }
        if points.windows(2).any(|w| w[0].step >= w[1].step) {
            return Err(Error::Trace("step indices must be strictly increasing"));
        }
        Ok(Self { points, meta })
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> &TracePoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TracePoint {
        self.points.last().expect("non-empty trace")
    }

    /// Steps spanned from the first to the last point.
    pub fn span(&self) -> u32 {
        self.last().step - self.first().step
    }

    /// Sub-trace of points with `from <= step <= to`, re-indexed so that
    /// `from` becomes step 0. Metadata rotations are shifted and filtered.
    pub fn window(&self, from: u32, to: u32) -> Result<Self> {
        let points: Vec<TracePoint> = self
            .points
            .iter()
            .filter(|p| p.step >= from && p.step <= to)
            .map(|p| TracePoint::new(p.step - from, p.x, p.y))
            .collect();
        let meta = TraceMeta {
            actual_rotation_steps: self
                .meta
                .actual_rotation_steps
                .iter()
                .filter(|&&k| k >= from && k <= to)
                .map(|k| k - from)
                .collect(),
            label: self.meta.label.clone(),
        };
        Self::new(points, meta)
    }
}

/// Indices of `n_points` approximately equally spaced samples of a trace
/// of length `len`, always including the final index.
pub fn target_indices(len: usize, n_points: usize) -> Result<Vec<usize>> {
    if n_points == 0 || n_points > len {
        return Err(Error::Config("target count must be between 1 and the trace length"));
    }
    if n_points == 1 {
        return Ok(alloc::vec![len - 1]);
    }
    let span = (len - 1) as u64;
    let denom = (n_points - 1) as u64;
    // round(i * span / denom), half away from zero, in integers.
    Ok((0..n_points as u64)
        .map(|i| ((2 * i * span + denom) / (2 * denom)) as usize)
        .collect())
}

/// Selects `n_points` equally spaced trace points as targets with window
/// half-width 0. The first selected point is dropped when it coincides
/// with `initial`, since it is satisfied trivially.
pub fn select_targets(trace: &ObservationTrace, n_points: usize, initial: Option<Point>) -> Result<Vec<TargetSpec>> {
    let indices = target_indices(trace.len(), n_points)?;
    let mut targets: Vec<TargetSpec> = indices
        .iter()
        .map(|&i| {
            let p = trace.points()[i];
            TargetSpec::new(p.x, p.y, 0)
        })
        .collect();
    if targets.len() > 1 && initial == Some(targets[0].center()) {
        targets.remove(0);
    }
    Ok(targets)
}

/// Seeded, bounded uniform noise in scaled units per coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Noise {
    pub bound: i64,
    pub seed: u64,
}

impl Noise {
    pub const NONE: Noise = Noise { bound: 0, seed: 0 };

    pub fn new(bound: i64, seed: u64) -> Self {
        Self { bound, seed }
    }
}

/// Simulates `plan` and records every state as an observation, optionally
/// perturbed by uniform noise in `[-bound, bound]` on each coordinate.
pub fn generate_trace(
    plan: &MotionPlan,
    cfg: &KinematicsConfig,
    horizon: u32,
    noise: Noise,
) -> Result<ObservationTrace> {
    if noise.bound < 0 {
        return Err(Error::Config("noise bound must be non-negative"));
    }
    let states = simulate_plan(plan, cfg, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let points = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = s.position();
            if noise.bound == 0 {
                TracePoint::new(i as u32, p.x, p.y)
            } else {
                let dx = rng.gen_range(-noise.bound..=noise.bound);
                let dy = rng.gen_range(-noise.bound..=noise.bound);
                TracePoint::new(i as u32, p.x + dx, p.y + dy)
            }
        })
        .collect();
    let meta = TraceMeta {
        actual_rotation_steps: plan.rotation_steps().to_vec(),
        label: None,
    };
    ObservationTrace::new(points, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::Direction;
    use crate::plan::Pose;
    use alloc::vec;

    fn plan(steps: &[u32]) -> MotionPlan {
        MotionPlan::new(Pose::new(0.0, 0.0, 0.0, Direction::Positive), steps).unwrap()
    }

    fn line(len: u32) -> ObservationTrace {
        let pts = (0..len).map(|i| TracePoint::new(i, 700 * i as i64, 0)).collect();
        ObservationTrace::new(pts, TraceMeta::default()).unwrap()
    }

    #[test]
    fn trace_invariants() {
        assert!(ObservationTrace::new(vec![], TraceMeta::default()).is_err());
        let dup = vec![TracePoint::new(0, 0, 0), TracePoint::new(0, 1, 1)];
        assert!(ObservationTrace::new(dup, TraceMeta::default()).is_err());
    }

    #[test]
    fn target_index_formula() {
        assert_eq!(target_indices(101, 5).unwrap(), vec![0, 25, 50, 75, 100]);
        assert_eq!(target_indices(101, 1).unwrap(), vec![100]);
        assert_eq!(target_indices(4, 4).unwrap(), vec![0, 1, 2, 3]);
        // 10 * 2 / 4 = 5, 10 * 1 / 4 = 2.5 -> 3, 10 * 3 / 4 = 7.5 -> 8
        assert_eq!(target_indices(11, 5).unwrap(), vec![0, 3, 5, 8, 10]);
        assert!(target_indices(3, 4).is_err());
        assert!(target_indices(3, 0).is_err());
    }

    #[test]
    fn select_targets_drops_trivial_first_point() {
        let t = line(101);
        let single = select_targets(&t, 1, Some(Point::new(0, 0))).unwrap();
        assert_eq!(single, vec![TargetSpec::new(70_000, 0, 0)]);
        let all = select_targets(&t, 101, None).unwrap();
        assert_eq!(all.len(), 101);
        let dropped = select_targets(&t, 5, Some(Point::new(0, 0))).unwrap();
        assert_eq!(
            dropped.iter().map(|t| t.x).collect::<Vec<_>>(),
            vec![17_500, 35_000, 52_500, 70_000]
        );
    }

    #[test]
    fn noiseless_generation_matches_simulation() {
        let p = plan(&[20, 50]);
        let cfg = KinematicsConfig::default();
        let t = generate_trace(&p, &cfg, 80, Noise::NONE).unwrap();
        let states = simulate_plan(&p, &cfg, 80).unwrap();
        assert_eq!(t.len(), 81);
        for (pt, s) in t.points().iter().zip(&states) {
            assert_eq!(pt.position(), s.position());
        }
        assert_eq!(t.meta.actual_rotation_steps, vec![20, 50]);
    }

    #[test]
    fn noise_is_seeded_and_bounded() {
        let p = plan(&[33]);
        let cfg = KinematicsConfig::default();
        let clean = generate_trace(&p, &cfg, 100, Noise::NONE).unwrap();
        let a = generate_trace(&p, &cfg, 100, Noise::new(500, 7)).unwrap();
        let b = generate_trace(&p, &cfg, 100, Noise::new(500, 7)).unwrap();
        let c = generate_trace(&p, &cfg, 100, Noise::new(500, 8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .points()
            .iter()
            .zip(clean.points())
            .all(|(n, c)| n.position().chebyshev(c.position()) <= 500));
        assert!(a
            .points()
            .iter()
            .zip(clean.points())
            .any(|(n, c)| n.position() != c.position()));
    }

    #[test]
    fn window_reindexes() {
        let mut t = line(20);
        t.meta.actual_rotation_steps = vec![3, 12];
        let w = t.window(8, 19).unwrap();
        assert_eq!(w.first().step, 0);
        assert_eq!(w.first().x, 5_600);
        assert_eq!(w.span(), 11);
        assert_eq!(w.meta.actual_rotation_steps, vec![4]);
    }
}
