//! Solve the maze with each planner from the same seed and compare.
//!
//! cargo run --release --example plan_builtin [seed]

use mtrrt::heuristics::SeededRng;
use mtrrt::planners::{plan, PlanOptions, PlannerKind, Query};
use mtrrt::workspace::builtin_map;

fn main() -> mtrrt::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let maze = builtin_map("maze")?;
    let query = Query::new(maze.start, maze.goal);
    for kind in PlannerKind::ALL {
        let r = plan(
            kind,
            &query,
            &maze.grid,
            &mut SeededRng::new(seed),
            PlanOptions::default(),
        )?;
        println!(
            "{:<6} success={} iterations={:>5} invalid={:>6} length={:>7.1}px time={:.1}ms",
            kind.name(),
            r.success,
            r.counters.iterations,
            r.counters.invalid_connections,
            r.trajectory_length(),
            r.counters.wall_time * 1e3,
        );
    }
    Ok(())
}
