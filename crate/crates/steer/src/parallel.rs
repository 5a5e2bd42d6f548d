//! Multi-threaded synthesis with a scheduling-independent result.

use std::thread;

use needle_core::synthesis::synthesize_partition;
use needle_core::{Result, StrategySet, SynthesisRequest};

/// Splits the work units round-robin over `workers` threads and merges the
/// partial results canonically, so the output equals
/// [`needle_core::synthesize`] for every worker count.
pub fn synthesize_parallel(req: &SynthesisRequest, workers: usize) -> Result<StrategySet> {
    let workers = workers.clamp(1, req.work_units().max(1));
    if workers == 1 {
        return needle_core::synthesize(req);
    }
    let parts: Vec<Result<Vec<_>>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|i| scope.spawn(move || synthesize_partition(req, i, workers)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("synthesis worker panicked"))
            .collect()
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(StrategySet::from_partitions(req.clone(), parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use needle_core::{simulate_plan, Direction, GameConfig, KinematicsConfig, MotionPlan, Pose, TargetSpec};

    #[test]
    fn worker_count_does_not_change_the_set() {
        let init = Pose::new(0.0, 0.0, 0.05, Direction::Negative);
        let plan = MotionPlan::new(init, &[9, 27]).unwrap();
        let end = simulate_plan(&plan, &KinematicsConfig::default(), 50).unwrap()[50].position();
        let req = SynthesisRequest::new(
            GameConfig::new(
                vec![TargetSpec::new(end.x, end.y, 400)],
                50,
                KinematicsConfig::default(),
            ),
            init,
        );
        let serial = needle_core::synthesize(&req).unwrap();
        for w in [2, 3, 8, 64] {
            assert_eq!(synthesize_parallel(&req, w).unwrap(), serial);
        }
    }
}
