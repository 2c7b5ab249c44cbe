use std::time::Instant;

use super::{
    draw, in_goal_region, trivial_success, PlanCounters, PlanOptions, PlanResult, PlannerKind, Query, Sampler,
};
use crate::error::Result;
use crate::forest::{Tree, TreeKind};
use crate::heuristics::{fit_gmm, random_state, GmmModel, SeededRng};
use crate::kinodynamics::{extend, CostFrame, State};
use crate::planners::trace::TraceEvent;
use crate::workspace::{OccupancyGrid, Point};

const GOAL_TREE: u32 = 1;

/// Bidirectional baseline.
///
/// A kinodynamic tree grows from the start and a geometric tree (fixed
/// straight-line steps) grows from the goal, taking turns. The first time
/// the two come within `lambda_connect` with a clear line between the
/// closest nodes, the goal tree is frozen into a
/// Gaussian mixture and every later start-tree sample is drawn from it. The
/// returned trajectory consists of start-tree states only; no boundary value
/// problem is solved to join the trees.
pub fn plan_b2u(query: &Query, grid: &OccupancyGrid, rng: &mut SeededRng, options: PlanOptions) -> Result<PlanResult> {
    query.validate(grid)?;
    let mut rooted = Tree::new(0, TreeKind::Rooted, query.start);
    let mut goal_tree = Tree::new(GOAL_TREE, TreeKind::Heuristic, State::at_rest(query.goal, 0.0));
    if in_goal_region(&query.start, query.goal, query.goal_radius) {
        return Ok(trivial_success(
            PlannerKind::B2u,
            query,
            vec![rooted, goal_tree],
            Vec::new(),
        ));
    }
    let frame = CostFrame::new(query.start.pos, query.goal)?;
    let lambda_connect = query.planner.lambda_connect;
    let mut counters = PlanCounters::default();
    let mut events = Vec::new();
    let mut guide: Option<GmmModel> = None;
    let mut reached = None;
    let clock = Instant::now();

    while counters.iterations < query.max_iterations as u64 {
        counters.iterations += 1;
        let it = counters.iterations;
        let grow_goal_tree = guide.is_none() && it % 2 == 0;

        if grow_goal_tree {
            let target = if rng.chance(query.planner.goal_bias) {
                query.start.pos
            } else {
                random_state(grid, rng)?
            };
            let Some(p) = steer_toward(&goal_tree, target, query.planner.goal_tree_step) else {
                continue;
            };
            let near = goal_tree.nearest_neighbor(target);
            if !grid.segment_collision_free(goal_tree.state(near).pos, p.pos) {
                continue;
            }
            let idx = goal_tree.add_node(p, near)?;
            if options.trace {
                events.push(TraceEvent::AddNode {
                    iteration: it,
                    tree: GOAL_TREE,
                    node: goal_tree.node_id(idx),
                });
            }
            let (d, near) = rooted.dist_to_tree(p.pos);
            if d < lambda_connect && grid.segment_collision_free(rooted.state(near).pos, p.pos) {
                guide = Some(activate(&goal_tree, query, d, it, options, &mut events, &mut counters)?);
            }
            continue;
        }

        let sampler = match &guide {
            Some(m) => Sampler::Mixture(m),
            None => Sampler::Uniform,
        };
        let target = draw(sampler, query, grid, rng)?;
        let Some(idx) = extend(&mut rooted, target, grid, &query.params, &frame, &mut counters) else {
            continue;
        };
        if options.trace {
            events.push(TraceEvent::AddNode {
                iteration: it,
                tree: 0,
                node: rooted.node_id(idx),
            });
        }
        if in_goal_region(rooted.state(idx), query.goal, query.goal_radius) {
            reached = Some(idx);
            break;
        }
        if guide.is_none() {
            let (d, near) = goal_tree.dist_to_tree(rooted.state(idx).pos);
            if d < lambda_connect && grid.segment_collision_free(goal_tree.state(near).pos, rooted.state(idx).pos) {
                guide = Some(activate(&goal_tree, query, d, it, options, &mut events, &mut counters)?);
            }
        }
    }
    counters.wall_time = clock.elapsed().as_secs_f64();

    let (trajectory_nodes, trajectory) = match reached {
        Some(leaf) => {
            if options.trace {
                events.push(TraceEvent::GoalReached {
                    iteration: counters.iterations,
                    node: rooted.node_id(leaf),
                });
            }
            let nodes = rooted.path_to(leaf)?;
            let states = nodes.iter().map(|&i| *rooted.state(i)).collect();
            (nodes, states)
        }
        None => (Vec::new(), Vec::new()),
    };
    let audit_violations = if options.audit {
        [rooted.audit(Some(grid)), goal_tree.audit(Some(grid))]
            .into_iter()
            .filter_map(|r| r.err())
            .collect()
    } else {
        Vec::new()
    };
    Ok(PlanResult {
        planner: PlannerKind::B2u,
        success: reached.is_some(),
        trajectory,
        trajectory_nodes,
        counters,
        trees: vec![rooted, goal_tree],
        events,
        audit_violations,
    })
}

fn activate(
    goal_tree: &Tree,
    query: &Query,
    distance: f64,
    iteration: u64,
    options: PlanOptions,
    events: &mut Vec<TraceEvent>,
    counters: &mut PlanCounters,
) -> Result<GmmModel> {
    let model = fit_gmm(goal_tree, query.planner.kappa_max, query.planner.sigma)?;
    counters.guidance_rounds += 1;
    if options.trace {
        events.push(TraceEvent::Connect {
            iteration,
            tree_a: 0,
            tree_b: GOAL_TREE,
            distance,
        });
        events.push(TraceEvent::GuidanceStart {
            iteration,
            tree: GOAL_TREE,
            kappa: model.kappa(),
        });
    }
    Ok(model)
}

/// New geometric node at most `step` from the nearest node toward `target`,
/// heading along the step. `None` if the target coincides with that node.
pub(crate) fn steer_toward(tree: &Tree, target: Point, step: f64) -> Option<State> {
    let near = tree.state(tree.nearest_neighbor(target)).pos;
    let d = near.distance(target);
    if d == 0.0 {
        return None;
    }
    let pos = if d <= step {
        target
    } else {
        let f = step / d;
        Point::new(near.h + (target.h - near.h) * f, near.v + (target.v - near.v) * f)
    };
    let heading = (target.v - near.v).atan2(target.h - near.h);
    Some(State::at_rest(pos, heading))
}
