//! Exhaustive synthesis of winning motion plans.
//!
//! With at most two rotations the plan space is the set of index pairs
//! below the horizon, so the full (permissive) strategy is computed by
//! walking the game tree forward: at every `Decide` phase both the rotate
//! and the feed branch are explored. Work is split by the first rotation
//! index so that partitions can be evaluated independently and merged.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{Action, Game, GameConfig, GameState, Phase, TargetSpec};
use crate::plan::{MotionPlan, Pose};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisRequest {
    pub game: GameConfig,
    /// Exact number of rotations demanded; `None` accepts any count up to
    /// the budget.
    pub required_rotations: Option<u8>,
    pub initial: Pose,
}

impl SynthesisRequest {
    pub fn new(game: GameConfig, initial: Pose) -> Self {
        Self {
            game,
            required_rotations: None,
            initial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        if let Some(n) = self.required_rotations {
            if n > self.game.max_rotations {
                return Err(Error::Config("required rotations exceed the budget"));
            }
        }
        if !(self.initial.x.is_finite() && self.initial.y.is_finite() && self.initial.theta.is_finite()) {
            return Err(Error::Config("initial pose must be finite"));
        }
        Ok(())
    }

    /// Same request with every target window set to half-width `dev`.
    pub fn with_dev(&self, dev: i64) -> Self {
        let mut req = self.clone();
        for t in &mut req.game.targets {
            t.dev = dev;
        }
        req
    }

    /// Number of independent work units: one per first-rotation index plus
    /// the rotation-free run.
    pub fn work_units(&self) -> usize {
        self.game.horizon as usize + 1
    }
}

/// All winning plans of a request, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySet {
    pub plans: Vec<MotionPlan>,
    pub request: SynthesisRequest,
}

impl StrategySet {
    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn contains_steps(&self, steps: &[u32]) -> bool {
        self.plans.iter().any(|p| p.rotation_steps() == steps)
    }

    pub fn final_target(&self) -> &TargetSpec {
        self.request.game.targets.last().expect("validated request has targets")
    }

    /// Merges partition results into a canonical set.
    pub fn from_partitions(request: SynthesisRequest, parts: impl IntoIterator<Item = Vec<MotionPlan>>) -> Self {
        let mut plans: Vec<MotionPlan> = parts.into_iter().flatten().collect();
        plans.sort_by(|a, b| a.canonical_cmp(b));
        plans.dedup_by(|a, b| a.rotation_steps() == b.rotation_steps());
        Self { plans, request }
    }
}

struct Explorer<'a> {
    game: &'a Game,
    required: Option<u8>,
    initial: Pose,
}

impl Explorer<'_> {
    fn accepts(&self, rotations: u8) -> bool {
        self.required.is_none_or(|n| n == rotations)
    }

    fn may_rotate(&self, gs: &GameState) -> bool {
        self.game.can_rotate(gs) && self.required.is_none_or(|n| gs.needle.rotations_used < n)
    }

    /// Explores every continuation of `gs`, whose rotations so far are those
    /// of `plan`.
    fn explore(&self, mut gs: GameState, plan: MotionPlan, out: &mut Vec<MotionPlan>) {
        loop {
            match gs.phase {
                Phase::Success(x) => {
                    if self.accepts(x) {
                        out.push(plan);
                    }
                    return;
                }
                Phase::Fail => return,
                _ => {}
            }
            if self.may_rotate(&gs) {
                let turned = self.game.advance(&gs, Action::Rotate).expect("rotation enabled");
                self.explore(turned, plan.with_pushed(gs.feeds), out);
            }
            gs = self.game.advance(&gs, Action::Step).expect("decide phase");
        }
    }

    /// Work unit `u < horizon` is "first rotation before feed `u`"; unit
    /// `horizon` is the rotation-free run.
    fn run_units(&self, mut owns: impl FnMut(usize) -> bool, out: &mut Vec<MotionPlan>) {
        let horizon = self.game.config().horizon as usize;
        let mut gs = GameState::new(self.initial.state());
        let root = MotionPlan::straight(self.initial);
        loop {
            match gs.phase {
                Phase::Success(0) => {
                    if owns(horizon) && self.accepts(0) {
                        out.push(root);
                    }
                    return;
                }
                Phase::Success(_) | Phase::Fail => return,
                _ => {}
            }
            let unit = gs.feeds as usize;
            if owns(unit) && self.may_rotate(&gs) {
                let turned = self.game.advance(&gs, Action::Rotate).expect("rotation enabled");
                self.explore(turned, root.with_pushed(gs.feeds), out);
            }
            gs = self.game.advance(&gs, Action::Step).expect("decide phase");
        }
    }
}

/// Winning plans from the work units `u` with `u % parts == part`, in
/// discovery order.
pub fn synthesize_partition(req: &SynthesisRequest, part: usize, parts: usize) -> Result<Vec<MotionPlan>> {
    if parts == 0 || part >= parts {
        return Err(Error::Config("partition index out of range"));
    }
    req.validate()?;
    let game = Game::new(req.game.clone())?;
    let explorer = Explorer {
        game: &game,
        required: req.required_rotations,
        initial: req.initial,
    };
    let mut out = Vec::new();
    explorer.run_units(|u| u % parts == part, &mut out);
    Ok(out)
}

/// Every plan with at most `max_rotations` flips (exactly
/// `required_rotations` when set) whose run reaches all target windows in
/// order. An empty set is a valid answer.
pub fn synthesize(req: &SynthesisRequest) -> Result<StrategySet> {
    let plans = synthesize_partition(req, 0, 1)?;
    Ok(StrategySet::from_partitions(req.clone(), [plans]))
}

/// Squared distance from the final target center to the closest state of
/// the plan's trace over the full horizon.
pub fn closest_approach_sq(game: &Game, plan: &MotionPlan) -> Result<i128> {
    let cfg = game.config();
    let target = cfg
        .targets
        .last()
        .ok_or(Error::Config("target list is empty"))?
        .center();
    plan.validate(cfg.horizon, cfg.max_rotations)?;
    Ok(game
        .stepper()
        .simulate(plan, cfg.horizon)
        .iter()
        .map(|s| s.position().distance_sq(target))
        .min()
        .expect("trace has an initial state"))
}

/// The plan passing closest to the final target; ties go to fewer
/// rotations, then to lexicographically smaller indices.
pub fn optimal_plan(set: &StrategySet) -> Result<MotionPlan> {
    if set.is_empty() {
        return Err(Error::NoStrategy);
    }
    let game = Game::new(set.request.game.clone())?;
    let mut best: Option<(i128, &MotionPlan)> = None;
    for plan in &set.plans {
        let d = closest_approach_sq(&game, plan)?;
        let better = match best {
            None => true,
            Some((bd, bp)) => d < bd || (d == bd && plan.canonical_cmp(bp).is_lt()),
        };
        if better {
            best = Some((d, plan));
        }
    }
    Ok(best.expect("non-empty set").1.clone())
}

/// Smallest window half-width in `[lo, hi]` admitting a winning plan,
/// searched by bisection with the given synthesizer.
pub fn min_dev_search_with<F>(req: &SynthesisRequest, lo: i64, hi: i64, mut synth: F) -> Result<(i64, StrategySet)>
where
    F: FnMut(&SynthesisRequest) -> Result<StrategySet>,
{
    if lo < 0 || lo > hi {
        return Err(Error::Config("deviation bounds must satisfy 0 <= lo <= hi"));
    }
    let mut best = synth(&req.with_dev(hi))?;
    if best.is_empty() {
        return Err(Error::NoStrategy);
    }
    let (mut lo, mut hi) = (lo, hi);
    // Invariant: `best` is the non-empty set at `hi`; every dev below `lo`
    // yields an empty set.
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let set = synth(&req.with_dev(mid))?;
        if set.is_empty() {
            lo = mid + 1;
        } else {
            hi = mid;
            best = set;
        }
    }
    Ok((hi, best))
}

pub fn min_dev_search(req: &SynthesisRequest, lo: i64, hi: i64) -> Result<(i64, StrategySet)> {
    min_dev_search_with(req, lo, hi, synthesize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::classify_run;
    use crate::kinematics::{simulate_plan, Direction, KinematicsConfig};
    use alloc::vec;

    const HALF_STEP: i64 = 350;

    fn origin() -> Pose {
        Pose::new(0.0, 0.0, 0.0, Direction::Positive)
    }

    fn endpoint(steps: &[u32], horizon: u32) -> crate::units::Point {
        let plan = MotionPlan::new(origin(), steps).unwrap();
        let trace = simulate_plan(&plan, &KinematicsConfig::default(), horizon).unwrap();
        trace.last().unwrap().position()
    }

    fn request(targets: Vec<TargetSpec>, horizon: u32, required: Option<u8>) -> SynthesisRequest {
        let mut req = SynthesisRequest::new(GameConfig::new(targets, horizon, KinematicsConfig::default()), origin());
        req.required_rotations = required;
        req
    }

    /// Brute-force oracle: classify every plan in the index space.
    fn brute_force(req: &SynthesisRequest) -> Vec<Vec<u32>> {
        let h = req.game.horizon;
        let mut candidates: Vec<Vec<u32>> = vec![vec![]];
        for a in 0..h {
            candidates.push(vec![a]);
            for b in a + 1..h {
                candidates.push(vec![a, b]);
            }
        }
        let mut found: Vec<Vec<u32>> = candidates
            .into_iter()
            .filter(|steps| req.required_rotations.is_none_or(|n| n as usize == steps.len()))
            .filter(|steps| {
                let plan = MotionPlan::new(req.initial, steps).unwrap();
                matches!(classify_run(&plan, &req.game).unwrap(), crate::game::Outcome::Success(x) if x as usize == steps.len())
            })
            .collect();
        found.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        found
    }

    fn steps_of(set: &StrategySet) -> Vec<Vec<u32>> {
        set.plans.iter().map(|p| p.rotation_steps().to_vec()).collect()
    }

    #[test]
    fn generating_plan_is_recovered() {
        let p = endpoint(&[15, 40], 60);
        let req = request(vec![TargetSpec::new(p.x, p.y, HALF_STEP)], 60, Some(2));
        let set = synthesize(&req).unwrap();
        assert!(set.contains_steps(&[15, 40]));
        assert_eq!(steps_of(&set), brute_force(&req));
    }

    #[test]
    fn off_arc_target_has_no_straight_plan() {
        // 5mm off the rotation-free arc at step 40.
        let p = endpoint(&[], 40);
        let req = request(vec![TargetSpec::new(p.x, p.y - 5_000, HALF_STEP)], 60, Some(0));
        let set = synthesize(&req).unwrap();
        assert!(set.is_empty());
        assert!(brute_force(&req).is_empty());
    }

    #[test]
    fn on_arc_target_yields_only_the_empty_plan() {
        let p = endpoint(&[], 30);
        let req = request(vec![TargetSpec::new(p.x, p.y, HALF_STEP)], 60, Some(0));
        let set = synthesize(&req).unwrap();
        assert_eq!(steps_of(&set), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn unconstrained_matches_brute_force_and_is_canonical() {
        let p = endpoint(&[5, 22], 35);
        let req = request(vec![TargetSpec::new(p.x, p.y, 600)], 35, None);
        let set = synthesize(&req).unwrap();
        assert_eq!(steps_of(&set), brute_force(&req));
        assert!(set.plans.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()));
        assert!(set.len() > 1);
    }

    #[test]
    fn partitions_merge_to_the_same_set() {
        let p = endpoint(&[10, 31], 45);
        let req = request(vec![TargetSpec::new(p.x, p.y, 500)], 45, None);
        let whole = synthesize(&req).unwrap();
        for parts in [2usize, 3, 8] {
            let pieces = (0..parts).map(|i| synthesize_partition(&req, i, parts).unwrap());
            assert_eq!(StrategySet::from_partitions(req.clone(), pieces), whole);
        }
        assert!(synthesize_partition(&req, 2, 2).is_err());
    }

    #[test]
    fn configuration_errors() {
        assert!(matches!(synthesize(&request(vec![], 10, None)), Err(Error::Config(_))));
        assert!(matches!(
            synthesize(&request(vec![TargetSpec::new(0, 0, 1)], 0, None)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn optimal_plan_prefers_exact_hits_then_fewer_rotations() {
        let p = endpoint(&[12], 40);
        let req = request(vec![TargetSpec::new(p.x, p.y, 2_000)], 40, None);
        let set = synthesize(&req).unwrap();
        assert!(set.len() > 1);
        let best = optimal_plan(&set).unwrap();
        assert_eq!(best.rotation_steps(), &[12]);

        let single = StrategySet {
            plans: vec![set.plans[3].clone()],
            request: req.clone(),
        };
        assert_eq!(optimal_plan(&single).unwrap(), set.plans[3]);

        let empty = StrategySet {
            plans: vec![],
            request: req,
        };
        assert_eq!(optimal_plan(&empty), Err(Error::NoStrategy));
    }

    #[test]
    fn optimal_plan_tie_goes_to_fewer_rotations() {
        // Both plans share their whole run when the second flip is never
        // reached before success, so their closest approach is identical.
        let p = endpoint(&[12], 40);
        let req = request(vec![TargetSpec::new(p.x, p.y, 0)], 60, None);
        let one = MotionPlan::new(origin(), &[12]).unwrap();
        let two = MotionPlan::new(origin(), &[12, 50]).unwrap();
        let set = StrategySet {
            plans: vec![two.clone(), one.clone()],
            request: req,
        };
        assert_eq!(optimal_plan(&set).unwrap(), one);
    }

    #[test]
    fn min_dev_search_cases() {
        let p = endpoint(&[18], 40);
        let exact = request(vec![TargetSpec::new(p.x, p.y, 0)], 40, None);
        let (dev, set) = min_dev_search(&exact, 0, 1_000).unwrap();
        assert_eq!(dev, 0);
        assert!(set.contains_steps(&[18]));

        let off = request(vec![TargetSpec::new(p.x + 7, p.y + 700_000, 0)], 40, None);
        assert_eq!(min_dev_search(&off, 0, 0).unwrap_err(), Error::NoStrategy);
        assert!(matches!(min_dev_search(&off, 5, 4), Err(Error::Config(_))));
    }

    #[test]
    fn min_dev_search_matches_linear_scan() {
        let p = endpoint(&[], 30);
        let req = request(vec![TargetSpec::new(p.x, p.y + 5, 0)], 30, Some(0));
        let linear = (0..=20)
            .find(|&d| !synthesize(&req.with_dev(d)).unwrap().is_empty())
            .unwrap();
        assert_eq!(linear, 5);
        let (dev, _) = min_dev_search(&req, 0, 20).unwrap();
        assert_eq!(dev, linear);
    }
}
