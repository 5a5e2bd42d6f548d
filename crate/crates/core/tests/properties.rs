use needle_core::calibration::{degrees, CalibrationRequest};
use needle_core::game::{Game, Outcome};
use needle_core::synthesis::synthesize_partition;
use needle_core::trace::target_indices;
use needle_core::*;
use proptest::prelude::*;

fn kin() -> KinematicsConfig {
    KinematicsConfig::default()
}

fn arb_dir() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Positive), Just(Direction::Negative)]
}

/// Rotation indices below `horizon`, 0 to 2 of them, strictly increasing.
fn arb_steps(horizon: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::btree_set(0..horizon, 0..=2).prop_map(|s| s.into_iter().collect())
}

fn arb_plan(horizon: u32) -> impl Strategy<Value = MotionPlan> {
    (-0.3f64..0.3, arb_dir(), arb_steps(horizon))
        .prop_map(|(theta, dir, steps)| MotionPlan::new(Pose::new(0.0, 0.0, theta, dir), &steps).unwrap())
}

/// Greedy in-order window matching over post-step states.
fn visits_in_order(trace: &[NeedleState], targets: &[TargetSpec]) -> bool {
    let mut next = 0;
    for s in &trace[1..] {
        while next < targets.len() && in_window(s.position(), &targets[next]) {
            next += 1;
        }
        if next == targets.len() {
            return true;
        }
    }
    false
}

fn step_sets(set: &StrategySet) -> Vec<Vec<u32>> {
    set.plans.iter().map(|p| p.rotation_steps().to_vec()).collect()
}

fn is_subset(small: &StrategySet, large: &StrategySet) -> bool {
    small.plans.iter().all(|p| large.contains_steps(p.rotation_steps()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_length_is_conserved(plan in arb_plan(80), radius in 20_000.0f64..200_000.0) {
        let cfg = KinematicsConfig { radius, ..kin() };
        let expected = 2.0 * radius * (cfg.step_length() / (2.0 * radius)).sin();
        let trace = simulate_plan(&plan, &cfg, 80).unwrap();
        for w in trace.windows(2) {
            let chord = ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
            prop_assert!((chord - expected).abs() < 1e-6);
            let fixed = w[1].position().distance(w[0].position());
            prop_assert!((fixed - expected).abs() <= std::f64::consts::SQRT_2);
        }
    }

    #[test]
    fn mirrored_start_mirrors_the_trace(plan in arb_plan(120)) {
        let mirrored_init = Pose::new(plan.initial.x, -plan.initial.y, -plan.initial.theta, plan.initial.dir.flipped());
        let mirrored = MotionPlan::new(mirrored_init, plan.rotation_steps()).unwrap();
        let a = simulate_plan(&plan, &kin(), 120).unwrap();
        let b = simulate_plan(&mirrored, &kin(), 120).unwrap();
        for (p, q) in a.iter().zip(&b) {
            let (pp, qp) = (p.position(), q.position());
            prop_assert_eq!(pp.x, qp.x);
            prop_assert_eq!(pp.y, -qp.y);
        }
    }

    #[test]
    fn simulation_is_bit_deterministic(plan in arb_plan(100)) {
        let a = simulate_plan(&plan, &kin(), 100).unwrap();
        let b = simulate_plan(&plan, &kin(), 100).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert_eq!(p.x.to_bits(), q.x.to_bits());
            prop_assert_eq!(p.y.to_bits(), q.y.to_bits());
            prop_assert_eq!(p.theta.to_bits(), q.theta.to_bits());
        }
    }

    #[test]
    fn classify_agrees_with_trace_windows(
        plan in arb_plan(60),
        picks in prop::collection::vec((1usize..=60, -800i64..800, -800i64..800), 1..4),
        dev in 0i64..600,
    ) {
        let clean = simulate_plan(&plan, &kin(), 60).unwrap();
        let mut picks = picks;
        picks.sort_by_key(|p| p.0);
        let targets: Vec<TargetSpec> = picks
            .iter()
            .map(|&(i, dx, dy)| {
                let p = clean[i].position();
                TargetSpec::new(p.x + dx, p.y + dy, dev)
            })
            .collect();
        let mut cfg = GameConfig::new(targets.clone(), 60, kin());
        let pruned = classify_run(&plan, &cfg).unwrap();
        cfg.prune = false;
        let game = Game::new(cfg.clone()).unwrap();
        let (unpruned, visited) = game.play(&plan).unwrap();
        prop_assert_eq!(pruned, unpruned);
        prop_assert_eq!(matches!(unpruned, Outcome::Success(_)), visits_in_order(&clean, &targets));
        prop_assert!(visited.windows(2).all(|w| w[0].next_target <= w[1].next_target));
        if let Outcome::Success(x) = unpruned {
            let last = visited.last().unwrap();
            let flips = plan.rotation_steps().iter().filter(|&&k| k < last.feeds).count();
            prop_assert_eq!(x as usize, flips);
            prop_assert_eq!(last.needle.rotations_used, x);
        }
    }

    #[test]
    fn target_indices_are_increasing_and_end_at_last(len in 1usize..400, frac in 0.0f64..1.0) {
        let n = 1 + ((len - 1) as f64 * frac) as usize;
        let idx = target_indices(len, n).unwrap();
        prop_assert_eq!(idx.len(), n);
        prop_assert_eq!(*idx.last().unwrap(), len - 1);
        prop_assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn generated_metadata_matches_plan(plan in arb_plan(50), bound in 0i64..400, seed in any::<u64>()) {
        let t = generate_trace(&plan, &kin(), 50, Noise::new(bound, seed)).unwrap();
        prop_assert_eq!(t.meta.actual_rotation_steps.as_slice(), plan.rotation_steps());
        prop_assert_eq!(t.len(), 51);
    }

    #[test]
    fn grid_angles_are_recovered_exactly(k in -10i32..=10, dir in arb_dir(), steps in 2u32..20) {
        let theta = degrees(f64::from(k) * 1.8);
        let plan = MotionPlan::straight(Pose::new(1_234.0, -560.0, theta, dir));
        let prefix = generate_trace(&plan, &kin(), steps, Noise::NONE).unwrap();
        let res = estimate_insertion(&CalibrationRequest::new(prefix, kin())).unwrap();
        prop_assert_eq!(res.theta0, theta);
        prop_assert_eq!(res.dir0, dir);
        prop_assert_eq!(res.residual_max, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn own_endpoint_is_always_synthesized(plan in arb_plan(50)) {
        let end = simulate_plan(&plan, &kin(), 50).unwrap()[50].position();
        let mut req = SynthesisRequest::new(GameConfig::new(vec![TargetSpec::new(end.x, end.y, 350)], 50, kin()), plan.initial);
        req.required_rotations = Some(plan.rotation_count());
        let set = synthesize(&req).unwrap();
        prop_assert!(set.contains_steps(plan.rotation_steps()));
    }

    #[test]
    fn plan_sets_grow_with_dev_and_shrink_with_targets(plan in arb_plan(45), d1 in 0i64..250, d2 in 0i64..250) {
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let trace = simulate_plan(&plan, &kin(), 45).unwrap();
        let end = trace[45].position();
        let mid = trace[20].position();
        let single = GameConfig::new(vec![TargetSpec::new(end.x, end.y, 0)], 45, kin());
        let req = SynthesisRequest::new(single, plan.initial);
        let small = synthesize(&req.with_dev(lo)).unwrap();
        let large = synthesize(&req.with_dev(hi)).unwrap();
        prop_assert!(is_subset(&small, &large));

        let mut two = req.clone();
        two.game.targets.insert(0, TargetSpec::new(mid.x, mid.y, 0));
        let narrowed = synthesize(&two.with_dev(hi)).unwrap();
        prop_assert!(is_subset(&narrowed, &large));
    }

    #[test]
    fn partitioning_never_changes_the_set(plan in arb_plan(40), parts in 1usize..9) {
        let end = simulate_plan(&plan, &kin(), 40).unwrap()[40].position();
        let req = SynthesisRequest::new(GameConfig::new(vec![TargetSpec::new(end.x, end.y, 500)], 40, kin()), plan.initial);
        let whole = synthesize(&req).unwrap();
        let split = StrategySet::from_partitions(
            req.clone(),
            (0..parts).map(|i| synthesize_partition(&req, i, parts).unwrap()),
        );
        prop_assert_eq!(step_sets(&whole), step_sets(&split));
    }
}

#[test]
fn axis_aligned_instance_is_mirror_closed() {
    // Insertion at the origin heading along +x, target on the x-axis: the
    // mirror image of every winning trace is itself a winning trace.
    let req = SynthesisRequest::new(
        GameConfig::new(vec![TargetSpec::new(42_000, 0, 150)], 70, kin()),
        Pose::new(0.0, 0.0, 0.0, Direction::Positive),
    );
    let set = synthesize(&req).unwrap();
    assert!(!set.is_empty());
    let mut mirrored_req = req.clone();
    mirrored_req.initial.dir = Direction::Negative;
    let mirrored = synthesize(&mirrored_req).unwrap();
    assert_eq!(step_sets(&set), step_sets(&mirrored));
    let traces = |s: &StrategySet| -> Vec<Vec<Point>> {
        let mut v: Vec<Vec<Point>> = s
            .plans
            .iter()
            .map(|p| {
                simulate_plan(p, &kin(), 70)
                    .unwrap()
                    .iter()
                    .map(|n| n.position())
                    .collect()
            })
            .collect();
        v.sort();
        v
    };
    let mut flipped: Vec<Vec<Point>> = traces(&mirrored)
        .into_iter()
        .map(|t| t.into_iter().map(|p| Point::new(p.x, -p.y)).collect())
        .collect();
    flipped.sort();
    assert_eq!(traces(&set), flipped);
}
