//! The unicycle model: control candidates, propagation and one extension.

use mtrrt::forest::{Tree, TreeKind};
use mtrrt::kinodynamics::{control_candidates, cost, extend, propagate, CostFrame, KinodynamicParams, State};
use mtrrt::planners::PlanCounters;
use mtrrt::workspace::{OccupancyGrid, Point};

fn main() -> mtrrt::Result<()> {
    let params = KinodynamicParams::default();
    let start = State::at_rest(Point::new(20.0, 50.0), 0.0);
    let goal = Point::new(180.0, 50.0);
    let frame = CostFrame::new(start.pos, goal)?;

    println!("{} candidates from rest:", params.candidate_count());
    for u in control_candidates(&start, &params) {
        let next = propagate(&start, u, params.dt);
        let c = cost(&next, goal, &frame, &params)?;
        println!(
            "  v={:.2} omega={:+.3} -> ({:.2}, {:.2}) cost {:.4}",
            u.v, u.omega, next.pos.h, next.pos.v, c
        );
    }

    let mut grid = OccupancyGrid::empty(200, 100)?;
    grid.fill_rect(60, 0, 66, 70);
    let mut tree = Tree::new(0, TreeKind::Rooted, start);
    let mut counters = PlanCounters::default();
    for _ in 0..40 {
        extend(&mut tree, goal, &grid, &params, &frame, &mut counters);
    }
    let tip = tree.nearest_neighbor(goal);
    println!(
        "after 40 greedy extensions: {} nodes, closest ({:.1}, {:.1}), {} invalid connections",
        tree.len(),
        tree.state(tip).pos.h,
        tree.state(tip).pos.v,
        counters.invalid_connections
    );
    Ok(())
}
