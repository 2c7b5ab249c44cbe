//! The three planners and what they share: the query, counters, results,
//! goal testing and trajectory extraction.
//!
//! * [`plan_rrt`]: single kinodynamic tree grown toward uniform samples.
//! * [`plan_b2u`]: a kinodynamic start tree plus a geometric goal tree; once
//!   they touch, the goal tree becomes a Gaussian-mixture sampling bias for
//!   the start tree.
//! * [`plan_mtrrt`]: a kinodynamic start tree plus a changing set of
//!   geometric heuristic trees that merge with each other and, on contact,
//!   steer the start tree before being discarded.

mod b2u;
mod mtrrt;
mod rrt;
pub mod trace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::Tree;
use crate::heuristics::{random_state, sample_heuristic_state, GmmModel, SeededRng};
use crate::kinodynamics::{propagate, KinodynamicParams, State};
use crate::workspace::{OccupancyGrid, Point};

pub use b2u::plan_b2u;
pub use mtrrt::plan_mtrrt;
pub use rrt::plan_rrt;
pub use trace::TraceEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Rrt,
    B2u,
    Mtrrt,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::Rrt, PlannerKind::B2u, PlannerKind::Mtrrt];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Rrt => "rrt",
            PlannerKind::B2u => "b2u",
            PlannerKind::Mtrrt => "mtrrt",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rrt" => Ok(PlannerKind::Rrt),
            "b2u" => Ok(PlannerKind::B2u),
            "mtrrt" => Ok(PlannerKind::Mtrrt),
            other => Err(Error::UnknownPlanner(other.to_string())),
        }
    }
}

/// Tunables of the tree-based planners beyond the motion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    /// Attachment radius: samples closer than this to a tree join it (px).
    pub lambda: f64,
    /// Trees whose nodes come closer than this are in contact (px).
    pub lambda_connect: f64,
    /// Isotropic standard deviation of each mixture component (px).
    pub sigma: f64,
    /// Upper bound on mixture components fitted to one tree.
    pub kappa_max: usize,
    /// Guided draws spent on one heuristic tree before it is discarded.
    pub guidance_budget: usize,
    /// Probability of replacing a sample with the goal point.
    pub goal_bias: f64,
    /// Heuristic trees seeded before the first iteration.
    pub n_init: usize,
    /// Straight-line step of the geometric goal tree (px).
    pub goal_tree_step: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            lambda: 25.0,
            lambda_connect: 60.0,
            sigma: 20.0,
            kappa_max: 100_000,
            guidance_budget: 32,
            goal_bias: 0.05,
            n_init: 4,
            goal_tree_step: 15.0,
        }
    }
}

/// One planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub start: State,
    pub goal: Point,
    pub goal_radius: f64,
    pub max_iterations: usize,
    pub params: KinodynamicParams,
    pub planner: PlannerParams,
}

pub const DEFAULT_GOAL_RADIUS: f64 = 15.0;
pub const DEFAULT_MAX_ITERATIONS: usize = 20_000;

impl Query {
    /// Query with default parameters, starting at rest facing +h.
    pub fn new(start: Point, goal: Point) -> Self {
        Query {
            start: State::at_rest(start, 0.0),
            goal,
            goal_radius: DEFAULT_GOAL_RADIUS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            params: KinodynamicParams::default(),
            planner: PlannerParams::default(),
        }
    }

    pub fn validate(&self, grid: &OccupancyGrid) -> Result<()> {
        self.params.validate()?;
        let p = &self.planner;
        if !grid.is_free(self.start.pos) {
            return Err(Error::Config("start is not in free space".into()));
        }
        if !grid.is_free(self.goal) {
            return Err(Error::Config("goal is not in free space".into()));
        }
        if self.goal_radius.is_nan() || self.goal_radius <= 0.0 {
            return Err(Error::Config("goal_radius must be positive".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(p.lambda > 0.0 && p.lambda_connect > 0.0 && p.sigma > 0.0 && p.goal_tree_step > 0.0) {
            return Err(Error::Config("radii, sigma and step must be positive".into()));
        }
        if p.kappa_max < 1 || p.guidance_budget < 1 {
            return Err(Error::Config("kappa_max and guidance_budget must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p.goal_bias) {
            return Err(Error::Config("goal_bias must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Per-trial counters. All are monotone during a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanCounters {
    pub iterations: u64,
    /// Extension candidates rejected by the collision check.
    pub invalid_connections: u64,
    /// Seconds spent in the planning loop.
    pub wall_time: f64,
    pub candidates_evaluated: u64,
    /// Successful kinodynamic extensions.
    pub extensions: u64,
    pub trees_spawned: u64,
    pub merges: u64,
    /// Heuristic-tree merges refused because the joining segment collides.
    pub rejected_merges: u64,
    pub guidance_rounds: u64,
}

/// Extra instrumentation for a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanOptions {
    /// Record a [`TraceEvent`] log.
    pub trace: bool,
    /// Audit the forest after every iteration and collect violations.
    pub audit: bool,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub planner: PlannerKind,
    pub success: bool,
    /// Root-first states; empty on failure.
    pub trajectory: Vec<State>,
    /// Rooted-tree indices of the trajectory states.
    pub trajectory_nodes: Vec<usize>,
    pub counters: PlanCounters,
    /// Final trees, rooted tree first.
    pub trees: Vec<Tree>,
    pub events: Vec<TraceEvent>,
    pub audit_violations: Vec<String>,
}

impl PlanResult {
    pub fn rooted(&self) -> &Tree {
        &self.trees[0]
    }

    pub fn trajectory_length(&self) -> f64 {
        if self.trajectory.is_empty() {
            0.0
        } else {
            trajectory_length(&self.trajectory)
        }
    }
}

/// Runs the chosen planner.
pub fn plan(
    kind: PlannerKind,
    query: &Query,
    grid: &OccupancyGrid,
    rng: &mut SeededRng,
    options: PlanOptions,
) -> Result<PlanResult> {
    match kind {
        PlannerKind::Rrt => plan_rrt(query, grid, rng, options),
        PlannerKind::B2u => plan_b2u(query, grid, rng, options),
        PlannerKind::Mtrrt => plan_mtrrt(query, grid, rng, options),
    }
}

/// Closed-ball goal test.
pub fn in_goal_region(x: &State, goal: Point, radius: f64) -> bool {
    x.pos.distance(goal) <= radius
}

/// States from the root to `leaf`.
pub fn extract_trajectory(tree: &Tree, leaf: usize) -> Result<Vec<State>> {
    Ok(tree.path_to(leaf)?.into_iter().map(|i| *tree.state(i)).collect())
}

/// Sum of Euclidean distances between consecutive positions.
pub fn trajectory_length(traj: &[State]) -> f64 {
    traj.windows(2).map(|w| w[0].pos.distance(w[1].pos)).sum()
}

/// Checks a successful result against the trajectory contract and returns a
/// description of every violation found.
pub fn validate_trajectory(result: &PlanResult, query: &Query, grid: &OccupancyGrid) -> Vec<String> {
    let mut out = Vec::new();
    if !result.success {
        return out;
    }
    let traj = &result.trajectory;
    let nodes = &result.trajectory_nodes;
    if traj.is_empty() || traj.len() != nodes.len() {
        out.push("trajectory is empty or does not match its node list".into());
        return out;
    }
    if traj[0] != query.start {
        out.push("trajectory does not start at the start state".into());
    }
    if !in_goal_region(traj.last().unwrap(), query.goal, query.goal_radius) {
        out.push("trajectory does not end in the goal region".into());
    }
    let tree = result.rooted();
    for (k, (&idx, state)) in nodes.iter().zip(traj).enumerate() {
        if idx >= tree.len() || tree.state(idx) != state {
            out.push(format!("state {k} is not rooted-tree node {idx}"));
        }
    }
    for k in 1..traj.len() {
        let (prev, next) = (&traj[k - 1], &traj[k]);
        if nodes[k] < tree.len() && tree.parent(nodes[k]) != Some(nodes[k - 1]) {
            out.push(format!("step {k} is not a rooted-tree edge"));
        }
        if !grid.segment_collision_free(prev.pos, next.pos) {
            out.push(format!("step {k} collides"));
        }
        if !same_bits(&propagate(prev, next.control(), query.params.dt), next) {
            out.push(format!("step {k} is not reproduced by its control"));
        }
    }
    out
}

pub(crate) fn same_bits(a: &State, b: &State) -> bool {
    let bits = |s: &State| [s.pos.h, s.pos.v, s.theta, s.v, s.omega].map(f64::to_bits);
    bits(a) == bits(b)
}

/// Sample source for the rooted tree, with goal biasing layered on top.
pub(crate) enum Sampler<'a> {
    Uniform,
    Mixture(&'a GmmModel),
}

pub(crate) fn draw(sampler: Sampler<'_>, query: &Query, grid: &OccupancyGrid, rng: &mut SeededRng) -> Result<Point> {
    if rng.chance(query.planner.goal_bias) {
        return Ok(query.goal);
    }
    match sampler {
        Sampler::Uniform => random_state(grid, rng),
        Sampler::Mixture(m) => sample_heuristic_state(m, grid, rng),
    }
}

/// Result for a query whose start already lies in the goal region.
pub(crate) fn trivial_success(
    kind: PlannerKind,
    query: &Query,
    trees: Vec<Tree>,
    events: Vec<TraceEvent>,
) -> PlanResult {
    PlanResult {
        planner: kind,
        success: true,
        trajectory: vec![query.start],
        trajectory_nodes: vec![0],
        counters: PlanCounters::default(),
        trees,
        events,
        audit_violations: Vec::new(),
    }
}
