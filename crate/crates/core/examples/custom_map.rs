//! Plan on a hand-written text map with an inflated robot radius.

use mtrrt::heuristics::SeededRng;
use mtrrt::planners::{plan, PlanOptions, PlannerKind, Query};
use mtrrt::workspace::{parse_map, OccupancyGrid, Point};

fn corridor() -> OccupancyGrid {
    // 120 x 60, wall down the middle with a gap at the bottom.
    let mut text = String::from("120 60\n");
    for row in 0..60 {
        for col in 0..120 {
            let wall = (58..62).contains(&col) && row < 42;
            text.push(if wall { '#' } else { '.' });
        }
        text.push('\n');
    }
    parse_map(text.as_bytes()).expect("well-formed map")
}

fn main() -> mtrrt::Result<()> {
    let grid = corridor().inflate(3.0);
    let mut query = Query::new(Point::new(15.0, 15.0), Point::new(105.0, 15.0));
    query.goal_radius = 8.0;
    let r = plan(
        PlannerKind::Mtrrt,
        &query,
        &grid,
        &mut SeededRng::new(3),
        PlanOptions::default(),
    )?;
    println!("success {} after {} iterations", r.success, r.counters.iterations);
    for s in r.trajectory.iter().step_by(5) {
        println!(
            "  ({:6.1}, {:6.1}) heading {:+.2} v {:.1}",
            s.pos.h, s.pos.v, s.theta, s.v
        );
    }
    Ok(())
}
