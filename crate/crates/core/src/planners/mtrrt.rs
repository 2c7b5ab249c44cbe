use std::collections::BTreeSet;
use std::time::Instant;

use super::{
    draw, in_goal_region, trivial_success, PlanCounters, PlanOptions, PlanResult, PlannerKind, Query, Sampler,
};
use crate::error::Result;
use crate::forest::{ordered_pair, BlockedPairs, ConnectionEvent, Forest, NodeId, TreeKind};
use crate::heuristics::{fit_gmm, heuristic_root, SeededRng};
use crate::kinodynamics::{CostFrame, State};
use crate::planners::trace::TraceEvent;
use crate::workspace::OccupancyGrid;

/// Mutable state of one multi-tree run.
struct Run<'a> {
    query: &'a Query,
    grid: &'a OccupancyGrid,
    frame: CostFrame,
    options: PlanOptions,
    forest: Forest,
    /// Nodes added since they were last found to have no cross-tree contact.
    /// Every unblocked contact pair has at least one endpoint in here.
    dirty: BTreeSet<NodeId>,
    /// Node pairs whose joining segment collides.
    blocked: BlockedPairs,
    counters: PlanCounters,
    events: Vec<TraceEvent>,
    violations: Vec<String>,
}

/// Multi-tree planner.
///
/// The rooted tree grows kinodynamically from the start; heuristic trees
/// grow geometrically wherever samples land away from existing trees. Each
/// pass of the main loop first looks for a pair of trees in contact:
///
/// * none: the next sample either extends the rooted tree (within `lambda`
///   of it), joins the nearest heuristic tree (within `lambda` and visible),
///   or seeds a new heuristic tree;
/// * two heuristic trees: they are merged along the contact;
/// * the rooted tree and a heuristic tree: a Gaussian mixture fitted to the
///   heuristic tree supplies up to `guidance_budget` samples for rooted-tree
///   extensions, after which the heuristic tree is discarded.
///
/// The goal region is tested after every rooted-tree extension.
pub fn plan_mtrrt(
    query: &Query,
    grid: &OccupancyGrid,
    rng: &mut SeededRng,
    options: PlanOptions,
) -> Result<PlanResult> {
    query.validate(grid)?;
    let forest = Forest::new(query.start, query.planner.lambda_connect);
    if in_goal_region(&query.start, query.goal, query.goal_radius) {
        return Ok(trivial_success(
            PlannerKind::Mtrrt,
            query,
            vec![forest.rooted().clone()],
            Vec::new(),
        ));
    }
    let mut run = Run {
        query,
        grid,
        frame: CostFrame::new(query.start.pos, query.goal)?,
        options,
        forest,
        dirty: BTreeSet::new(),
        blocked: BlockedPairs::default(),
        counters: PlanCounters::default(),
        events: Vec::new(),
        violations: Vec::new(),
    };
    let clock = Instant::now();
    for _ in 0..query.planner.n_init {
        let root = heuristic_root(grid, rng, None)?;
        run.spawn(root);
    }
    let reached = run.main_loop(rng)?;
    run.counters.wall_time = clock.elapsed().as_secs_f64();

    let rooted = run.forest.rooted();
    let (trajectory_nodes, trajectory) = match reached {
        Some(leaf) => {
            let nodes = rooted.path_to(leaf)?;
            let states = nodes.iter().map(|&i| *rooted.state(i)).collect();
            (nodes, states)
        }
        None => (Vec::new(), Vec::new()),
    };
    let trees = std::iter::once(rooted.clone())
        .chain(run.forest.heuristic_trees().iter().cloned())
        .collect();
    Ok(PlanResult {
        planner: PlannerKind::Mtrrt,
        success: reached.is_some(),
        trajectory,
        trajectory_nodes,
        counters: run.counters,
        trees,
        events: run.events,
        audit_violations: run.violations,
    })
}

impl Run<'_> {
    fn trace(&mut self, ev: TraceEvent) {
        if self.options.trace {
            self.events.push(ev);
        }
    }

    fn spawn(&mut self, root: State) {
        let tree = self.forest.spawn(root);
        let nid = self.forest.tree(tree).expect("just spawned").node_id(0);
        self.dirty.insert(nid);
        self.counters.trees_spawned += 1;
        self.trace(TraceEvent::Spawn {
            iteration: self.counters.iterations,
            tree,
            node: nid,
        });
    }

    fn main_loop(&mut self, rng: &mut SeededRng) -> Result<Option<usize>> {
        let max = self.query.max_iterations as u64;
        while self.counters.iterations < max {
            let event = self.next_event();
            if self.options.audit {
                self.audit(event.as_ref());
            }
            self.counters.iterations += 1;
            if let Some(ev) = &event {
                self.trace(TraceEvent::Connect {
                    iteration: self.counters.iterations,
                    tree_a: ev.tree_a,
                    tree_b: ev.tree_b,
                    distance: ev.distance,
                });
            }
            let reached = match event {
                None => self.connect_nodes(rng)?,
                Some(ev) if ev.tree_a == Forest::ROOTED => self.guide(&ev, rng)?,
                Some(ev) => {
                    self.merge(&ev);
                    None
                }
            };
            if let Some(leaf) = reached {
                let node = self.forest.rooted().node_id(leaf);
                self.trace(TraceEvent::GoalReached {
                    iteration: self.counters.iterations,
                    node,
                });
                return Ok(Some(leaf));
            }
        }
        Ok(None)
    }

    /// Closest pending contact, preferring contacts with the rooted tree.
    /// Dirty nodes with no contact are retired. A rooted contact whose
    /// joining segment collides is blocked instead of reported.
    fn next_event(&mut self) -> Option<ConnectionEvent> {
        let lc = self.query.planner.lambda_connect;
        let mut best: Option<(bool, f64, u32, u32, usize, usize)> = None;
        let mut retired = Vec::new();
        for &nid in &self.dirty {
            let contacts = self.forest.contacts_of(nid, lc, &self.blocked);
            if contacts.is_empty() {
                retired.push(nid);
                continue;
            }
            for c in contacts {
                if c.tree_a == Forest::ROOTED && !self.visible(&c) {
                    let a = self.forest.rooted().node_id(c.node_a);
                    let b = self.forest.tree(c.tree_b).expect("live").node_id(c.node_b);
                    self.blocked.insert(ordered_pair(a, b));
                    continue;
                }
                let key = (
                    c.tree_a != Forest::ROOTED,
                    c.distance,
                    c.tree_a,
                    c.tree_b,
                    c.node_a,
                    c.node_b,
                );
                if best.is_none_or(|b| key.partial_cmp(&b) == Some(std::cmp::Ordering::Less)) {
                    best = Some(key);
                }
            }
        }
        for nid in retired {
            self.dirty.remove(&nid);
        }
        best.map(|(_, distance, tree_a, tree_b, node_a, node_b)| ConnectionEvent {
            tree_a,
            tree_b,
            node_a,
            node_b,
            distance,
        })
    }

    fn visible(&self, c: &ConnectionEvent) -> bool {
        let a = self.forest.rooted().state(c.node_a).pos;
        let b = self.forest.tree(c.tree_b).expect("live").state(c.node_b).pos;
        self.grid.segment_collision_free(a, b)
    }

    /// Per-iteration forest audit plus a cross-check of the incremental
    /// contact search against a full rescan.
    fn audit(&mut self, event: Option<&ConnectionEvent>) {
        let it = self.counters.iterations;
        if let Err(e) = self.forest.audit(Some(self.grid)) {
            self.violations.push(format!("iteration {it}: {e}"));
        }
        let full = self
            .forest
            .detect_connection_excluding(self.query.planner.lambda_connect, &self.blocked);
        match (event, full) {
            (None, None) => {}
            (Some(inc), Some(full)) => {
                let rooted_inc = inc.tree_a == Forest::ROOTED;
                let rooted_full = full.tree_a == Forest::ROOTED;
                if rooted_inc != rooted_full {
                    self.violations.push(format!(
                        "iteration {it}: incremental contact search lost rooted priority"
                    ));
                }
            }
            (inc, full) => self.violations.push(format!(
                "iteration {it}: incremental contact search found {inc:?}, full scan found {full:?}"
            )),
        }
    }

    fn extend_rooted(&mut self, target: crate::workspace::Point) -> Option<usize> {
        let idx = self
            .forest
            .extend_rooted(target, self.grid, &self.query.params, &self.frame, &mut self.counters)?;
        let nid = self.forest.rooted().node_id(idx);
        self.dirty.insert(nid);
        self.trace(TraceEvent::AddNode {
            iteration: self.counters.iterations,
            tree: Forest::ROOTED,
            node: nid,
        });
        let state = self.forest.rooted().state(idx);
        in_goal_region(state, self.query.goal, self.query.goal_radius).then_some(idx)
    }

    /// Connect-nodes stage: route one sample to the rooted tree, to a nearby
    /// heuristic tree, or to a fresh heuristic tree.
    fn connect_nodes(&mut self, rng: &mut SeededRng) -> Result<Option<usize>> {
        let lambda = self.query.planner.lambda;
        let target = draw(Sampler::Uniform, self.query, self.grid, rng)?;
        let (d_root, _) = self.forest.rooted().dist_to_tree(target);
        if d_root < lambda {
            return Ok(self.extend_rooted(target));
        }
        if let Some((tree, near, _)) = self.forest.nearest_heuristic_within(target, lambda) {
            let from = self.forest.tree(tree).expect("live").state(near).pos;
            if self.grid.segment_collision_free(from, target) {
                let heading = (target.v - from.v).atan2(target.h - from.h);
                let idx = self.forest.add_node(tree, State::at_rest(target, heading), near)?;
                let nid = self.forest.tree(tree).expect("live").node_id(idx);
                self.dirty.insert(nid);
                self.trace(TraceEvent::AddNode {
                    iteration: self.counters.iterations,
                    tree,
                    node: nid,
                });
                return Ok(None);
            }
        }
        let theta = rng.heading();
        self.spawn(State::at_rest(target, theta));
        Ok(None)
    }

    /// Connect-trees stage with the rooted tree: spend the guidance budget on
    /// mixture samples from the partner tree, then discard the partner.
    fn guide(&mut self, ev: &ConnectionEvent, rng: &mut SeededRng) -> Result<Option<usize>> {
        let partner = ev.tree_b;
        let model = fit_gmm(
            self.forest.tree(partner).expect("contact names a live tree"),
            self.query.planner.kappa_max,
            self.query.planner.sigma,
        )?;
        self.counters.guidance_rounds += 1;
        let it = self.counters.iterations;
        self.trace(TraceEvent::GuidanceStart {
            iteration: it,
            tree: partner,
            kappa: model.kappa(),
        });
        let max = self.query.max_iterations as u64;
        let mut reached = None;
        for draw_no in 0..self.query.planner.guidance_budget {
            // The first draw rides on the iteration that found the contact.
            if draw_no > 0 {
                if self.counters.iterations >= max {
                    break;
                }
                self.counters.iterations += 1;
            }
            let target = draw(Sampler::Mixture(&model), self.query, self.grid, rng)?;
            if let Some(leaf) = self.extend_rooted(target) {
                reached = Some(leaf);
                break;
            }
        }
        let it = self.counters.iterations;
        self.trace(TraceEvent::GuidanceEnd {
            iteration: it,
            tree: partner,
        });
        self.forest.remove_tree(partner);
        self.trace(TraceEvent::Delete {
            iteration: it,
            tree: partner,
        });
        Ok(reached)
    }

    fn merge(&mut self, ev: &ConnectionEvent) {
        let it = self.counters.iterations;
        debug_assert_eq!(self.forest.tree(ev.tree_b).map(|t| t.kind()), Some(TreeKind::Heuristic));
        if self.forest.merge_trees(ev, self.grid) {
            self.counters.merges += 1;
            self.trace(TraceEvent::Merge {
                iteration: it,
                into: ev.tree_a,
                from: ev.tree_b,
            });
        } else {
            let a = self.forest.tree(ev.tree_a).expect("live").node_id(ev.node_a);
            let b = self.forest.tree(ev.tree_b).expect("live").node_id(ev.node_b);
            self.blocked.insert(ordered_pair(a, b));
            self.counters.rejected_merges += 1;
            self.trace(TraceEvent::MergeRejected {
                iteration: it,
                tree_a: ev.tree_a,
                tree_b: ev.tree_b,
            });
        }
    }
}
