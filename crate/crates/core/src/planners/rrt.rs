use std::time::Instant;

use super::{
    draw, in_goal_region, trivial_success, PlanCounters, PlanOptions, PlanResult, PlannerKind, Query, Sampler,
};
use crate::error::Result;
use crate::forest::{Tree, TreeKind};
use crate::heuristics::SeededRng;
use crate::kinodynamics::{extend, CostFrame};
use crate::planners::trace::TraceEvent;
use crate::workspace::OccupancyGrid;

/// Classic single-tree kinodynamic RRT: sample, extend the nearest node,
/// stop once a new node lands in the goal region.
pub fn plan_rrt(query: &Query, grid: &OccupancyGrid, rng: &mut SeededRng, options: PlanOptions) -> Result<PlanResult> {
    query.validate(grid)?;
    let mut tree = Tree::new(0, TreeKind::Rooted, query.start);
    if in_goal_region(&query.start, query.goal, query.goal_radius) {
        return Ok(trivial_success(PlannerKind::Rrt, query, vec![tree], Vec::new()));
    }
    let frame = CostFrame::new(query.start.pos, query.goal)?;
    let mut counters = PlanCounters::default();
    let mut events = Vec::new();
    let mut reached = None;
    let clock = Instant::now();

    while counters.iterations < query.max_iterations as u64 {
        counters.iterations += 1;
        let target = draw(Sampler::Uniform, query, grid, rng)?;
        let Some(idx) = extend(&mut tree, target, grid, &query.params, &frame, &mut counters) else {
            continue;
        };
        if options.trace {
            events.push(TraceEvent::AddNode {
                iteration: counters.iterations,
                tree: 0,
                node: tree.node_id(idx),
            });
        }
        if in_goal_region(tree.state(idx), query.goal, query.goal_radius) {
            reached = Some(idx);
            break;
        }
    }
    counters.wall_time = clock.elapsed().as_secs_f64();

    let (trajectory_nodes, trajectory) = match reached {
        Some(leaf) => {
            if options.trace {
                events.push(TraceEvent::GoalReached {
                    iteration: counters.iterations,
                    node: tree.node_id(leaf),
                });
            }
            let nodes = tree.path_to(leaf)?;
            let states = nodes.iter().map(|&i| *tree.state(i)).collect();
            (nodes, states)
        }
        None => (Vec::new(), Vec::new()),
    };
    let audit_violations = if options.audit {
        tree.audit(Some(grid)).err().into_iter().collect()
    } else {
        Vec::new()
    };
    Ok(PlanResult {
        planner: PlannerKind::Rrt,
        success: reached.is_some(),
        trajectory,
        trajectory_nodes,
        counters,
        trees: vec![tree],
        events,
        audit_violations,
    })
}
