//! Text records for reports, sweep tables and strategy-set files.
//!
//! Records are single lines of `key=value` fields in a fixed order so that
//! outputs can be diffed and parsed line by line.

use std::fmt::Write as _;

use needle_core::game::Game;
use needle_core::{CalibrationResult, FitReport, MotionPlan, Result, StrategySet, SweepCell};

fn list(steps: &[u32]) -> String {
    if steps.is_empty() {
        "-".to_string()
    } else {
        steps.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
    }
}

fn sign(dir: needle_core::Direction) -> &'static str {
    match dir {
        needle_core::Direction::Positive => "+1",
        needle_core::Direction::Negative => "-1",
    }
}

pub struct GridInfo {
    pub pitch_deg: f64,
    pub max_deg: f64,
    pub size: usize,
}

pub fn calibration_record(res: &CalibrationResult, prefix_points: usize, grid: &GridInfo) -> String {
    let init = needle_core::initial_state(res);
    format!(
        "calibration theta0_rad={:.9} theta0_deg={:.4} dir0={} origin_x={} origin_y={} radius_um={:.3} \
         residual_max_um={:.3} residual_avg_um={:.3} prefix_points={} prefix_steps={} \
         handover_x={} handover_y={} handover_theta_rad={:.9} \
         angle_grid_pitch_deg={} angle_grid_max_deg={} angle_grid_size={}\n",
        res.theta0,
        res.theta0.to_degrees(),
        sign(res.dir0),
        res.origin.x,
        res.origin.y,
        res.radius_used,
        res.residual_max,
        res.residual_avg,
        prefix_points,
        res.prefix_steps,
        res.last_point.x,
        res.last_point.y,
        init.theta,
        grid.pitch_deg,
        grid.max_deg,
        grid.size,
    )
}

pub fn fit_record(r: &FitReport) -> String {
    let label = if r.trace_label.is_empty() {
        "-"
    } else {
        r.trace_label.as_str()
    };
    format!(
        "fit trace_label={} theta0_rad={:.9} dev_used={} n_points={} actual_rotations={} identified_rotations={} \
         avg_error_um={:.3} max_error_um={:.3} plan_count={} handover_step={} dir0={}\n",
        label.replace(char::is_whitespace, "_"),
        r.theta0,
        r.dev_used,
        r.n_points,
        list(&r.actual_rotations),
        list(&r.identified_rotations),
        r.avg_error,
        r.max_error,
        r.plan_count,
        r.handover_step,
        sign(r.calibration.dir0),
    )
}

/// Column-aligned, whitespace-separated table with a header row.
pub fn sweep_table(cells: &[SweepCell]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>8} {:>8} {:>10}", "dev", "n_points", "plan_count");
    for c in cells {
        let _ = writeln!(out, "{:>8} {:>8} {:>10}", c.dev, c.n_points, c.plan_count);
    }
    out
}

/// Distance from the final target center to the state at which the run
/// ended (the winning step), micrometers.
pub fn final_deviation(game: &Game, plan: &MotionPlan) -> Result<f64> {
    let target = game.config().targets.last().expect("validated game").center();
    let (_, visited) = game.play(plan)?;
    Ok(visited
        .last()
        .expect("initial state")
        .needle
        .position()
        .distance(target))
}

/// Strategy-set file: metadata comments, then one CSV row per plan in
/// canonical order.
pub fn strategy_file(sets: &[StrategySet], optimal: Option<&MotionPlan>) -> Result<String> {
    let mut out = String::from("# needle-steer strategy set\n");
    if let Some(first) = sets.first() {
        let targets: Vec<String> = first
            .request
            .game
            .targets
            .iter()
            .map(|t| format!("{}:{}:{}", t.x, t.y, t.dev))
            .collect();
        let _ = writeln!(out, "# targets: {}", targets.join(","));
        let _ = writeln!(out, "# horizon: {}", first.request.game.horizon);
        let rot = first
            .request
            .required_rotations
            .map_or("any".to_string(), |n| n.to_string());
        let _ = writeln!(out, "# required_rotations: {rot}");
    }
    for set in sets {
        let p = set.request.initial;
        let _ = writeln!(
            out,
            "# initial: x={:.3} y={:.3} theta_rad={:.9} dir={}",
            p.x,
            p.y,
            p.theta,
            sign(p.dir)
        );
    }
    if let Some(best) = optimal {
        let _ = writeln!(
            out,
            "# optimal: dir={} steps={}",
            sign(best.initial.dir),
            list(best.rotation_steps())
        );
    }
    out.push_str("dir,rotations,steps,final_deviation_um\n");
    for set in sets {
        let game = Game::new(set.request.game.clone())?;
        for plan in &set.plans {
            let _ = writeln!(
                out,
                "{},{},{},{:.3}",
                sign(plan.initial.dir),
                plan.rotation_count(),
                list(plan.rotation_steps()),
                final_deviation(&game, plan)?
            );
        }
    }
    Ok(out)
}
