//! Line-oriented trace files: the final forest, the trajectory, and the
//! event log of one planning run.
//!
//! ```text
//! mtrrt-trace 1
//! planner mtrrt
//! seed 7
//! map builtin maze
//! inflate 0
//! start <h> <v> <theta> <v> <omega>
//! goal <h> <v> <radius>
//! dt 1
//! success true
//! tree 0 rooted
//! node <id> <h> <v> <theta> <v> <omega> parent=<id|none>
//! ...
//! trajectory <id> <id> ...
//! event <iteration> <kind> key=value ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a trace
//! reproduces every state bit-for-bit.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forest::{NodeId, Tree, TreeId, TreeKind};
use crate::kinodynamics::{propagate, State};
use crate::planners::{in_goal_region, same_bits, PlanResult, PlannerKind};
use crate::workspace::{OccupancyGrid, Point};

/// One step of planner bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Spawn {
        iteration: u64,
        tree: TreeId,
        node: NodeId,
    },
    AddNode {
        iteration: u64,
        tree: TreeId,
        node: NodeId,
    },
    Connect {
        iteration: u64,
        tree_a: TreeId,
        tree_b: TreeId,
        distance: f64,
    },
    Merge {
        iteration: u64,
        into: TreeId,
        from: TreeId,
    },
    MergeRejected {
        iteration: u64,
        tree_a: TreeId,
        tree_b: TreeId,
    },
    GuidanceStart {
        iteration: u64,
        tree: TreeId,
        kappa: usize,
    },
    GuidanceEnd {
        iteration: u64,
        tree: TreeId,
    },
    Delete {
        iteration: u64,
        tree: TreeId,
    },
    GoalReached {
        iteration: u64,
        node: NodeId,
    },
}

impl TraceEvent {
    fn render(&self) -> String {
        match self {
            TraceEvent::Spawn { iteration, tree, node } => format!("event {iteration} spawn tree={tree} node={node}"),
            TraceEvent::AddNode { iteration, tree, node } => format!("event {iteration} add tree={tree} node={node}"),
            TraceEvent::Connect {
                iteration,
                tree_a,
                tree_b,
                distance,
            } => {
                format!("event {iteration} connect a={tree_a} b={tree_b} distance={distance}")
            }
            TraceEvent::Merge { iteration, into, from } => format!("event {iteration} merge into={into} from={from}"),
            TraceEvent::MergeRejected {
                iteration,
                tree_a,
                tree_b,
            } => {
                format!("event {iteration} merge-rejected a={tree_a} b={tree_b}")
            }
            TraceEvent::GuidanceStart { iteration, tree, kappa } => {
                format!("event {iteration} guidance-start tree={tree} kappa={kappa}")
            }
            TraceEvent::GuidanceEnd { iteration, tree } => format!("event {iteration} guidance-end tree={tree}"),
            TraceEvent::Delete { iteration, tree } => format!("event {iteration} delete tree={tree}"),
            TraceEvent::GoalReached { iteration, node } => format!("event {iteration} goal node={node}"),
        }
    }

    fn parse(line_no: usize, fields: &[&str]) -> Result<Self> {
        let err = |m: &str| Error::Trace {
            line: line_no,
            message: m.to_string(),
        };
        let iteration: u64 = fields
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("event needs an iteration"))?;
        let kind = *fields.get(1).ok_or_else(|| err("event needs a kind"))?;
        let kv: HashMap<&str, &str> = fields[2..].iter().filter_map(|f| f.split_once('=')).collect();
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| err(&format!("event is missing {k}=")));
        let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| err(&format!("bad {k}="))) };
        let tree = |k: &str| -> Result<TreeId> { get(k)?.parse().map_err(|_| err(&format!("bad {k}="))) };
        Ok(match kind {
            "spawn" => TraceEvent::Spawn {
                iteration,
                tree: tree("tree")?,
                node: NodeId(num("node")?),
            },
            "add" => TraceEvent::AddNode {
                iteration,
                tree: tree("tree")?,
                node: NodeId(num("node")?),
            },
            "connect" => TraceEvent::Connect {
                iteration,
                tree_a: tree("a")?,
                tree_b: tree("b")?,
                distance: get("distance")?.parse().map_err(|_| err("bad distance="))?,
            },
            "merge" => TraceEvent::Merge {
                iteration,
                into: tree("into")?,
                from: tree("from")?,
            },
            "merge-rejected" => TraceEvent::MergeRejected {
                iteration,
                tree_a: tree("a")?,
                tree_b: tree("b")?,
            },
            "guidance-start" => TraceEvent::GuidanceStart {
                iteration,
                tree: tree("tree")?,
                kappa: num("kappa")? as usize,
            },
            "guidance-end" => TraceEvent::GuidanceEnd {
                iteration,
                tree: tree("tree")?,
            },
            "delete" => TraceEvent::Delete {
                iteration,
                tree: tree("tree")?,
            },
            "goal" => TraceEvent::GoalReached {
                iteration,
                node: NodeId(num("node")?),
            },
            other => return Err(err(&format!("unknown event kind {other}"))),
        })
    }
}

/// Where the map of a trace comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSource {
    Builtin(String),
    File(String),
}

/// Everything in a trace file that is not derived from the planner.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceHeader {
    pub planner: PlannerKind,
    pub seed: u64,
    pub map: MapSource,
    pub inflate: f64,
    pub start: State,
    pub goal: Point,
    pub goal_radius: f64,
    pub dt: f64,
}

fn state_fields(s: &State) -> String {
    format!("{} {} {} {} {}", s.pos.h, s.pos.v, s.theta, s.v, s.omega)
}

/// Serializes one tree as `node` lines.
pub fn write_tree(out: &mut String, tree: &Tree) {
    let _ = writeln!(out, "tree {} {}", tree.id(), tree.kind());
    for (i, s) in tree.states().iter().enumerate() {
        let parent = match tree.parent(i) {
            Some(p) => tree.node_id(p).to_string(),
            None => "none".to_string(),
        };
        let _ = writeln!(out, "node {} {} parent={parent}", tree.node_id(i), state_fields(s));
    }
}

pub fn write_trace(header: &TraceHeader, result: &PlanResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mtrrt-trace 1");
    let _ = writeln!(out, "planner {}", header.planner);
    let _ = writeln!(out, "seed {}", header.seed);
    match &header.map {
        MapSource::Builtin(name) => {
            let _ = writeln!(out, "map builtin {name}");
        }
        MapSource::File(path) => {
            let _ = writeln!(out, "map file {path}");
        }
    }
    let _ = writeln!(out, "inflate {}", header.inflate);
    let _ = writeln!(out, "start {}", state_fields(&header.start));
    let _ = writeln!(out, "goal {} {} {}", header.goal.h, header.goal.v, header.goal_radius);
    let _ = writeln!(out, "dt {}", header.dt);
    let _ = writeln!(out, "success {}", result.success);
    for tree in &result.trees {
        write_tree(&mut out, tree);
    }
    let ids: Vec<String> = result
        .trajectory_nodes
        .iter()
        .map(|&i| result.rooted().node_id(i).to_string())
        .collect();
    let _ = writeln!(out, "trajectory {}", ids.join(" "));
    for ev in &result.events {
        let _ = writeln!(out, "{}", ev.render());
    }
    out
}

/// A tree as read back from a trace: node ids with parent ids.
#[derive(Debug, Clone)]
pub struct TracedTree {
    pub id: TreeId,
    pub kind: TreeKind,
    pub nodes: Vec<(NodeId, State, Option<NodeId>)>,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub header: TraceHeader,
    pub success: bool,
    pub trees: Vec<TracedTree>,
    pub trajectory: Vec<NodeId>,
    pub events: Vec<TraceEvent>,
}

pub fn parse_trace(text: &str) -> Result<Trace> {
    let mut planner = None;
    let mut seed = None;
    let mut map = None;
    let mut inflate = 0.0;
    let mut start = None;
    let mut goal = None;
    let mut dt = None;
    let mut success = None;
    let mut trees: Vec<TracedTree> = Vec::new();
    let mut trajectory = None;
    let mut events = Vec::new();

    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |m: String| Error::Trace {
            line: line_no,
            message: m,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((&tag, rest)) = fields.split_first() else {
            continue;
        };
        let floats = |n: usize| -> Result<Vec<f64>> {
            if rest.len() < n {
                return Err(err(format!("`{tag}` needs {n} numbers")));
            }
            rest[..n]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}"))))
                .collect()
        };
        match tag {
            "mtrrt-trace" => {
                if line_no != 1 || rest != ["1"] {
                    return Err(err("unsupported trace version".into()));
                }
            }
            _ if line_no == 1 => return Err(err("missing `mtrrt-trace 1` header".into())),
            "planner" => planner = Some(rest.first().copied().unwrap_or("").parse::<PlannerKind>()?),
            "seed" => {
                seed = Some(
                    rest.first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad seed".into()))?,
                )
            }
            "map" => {
                map = Some(match rest {
                    ["builtin", name] => MapSource::Builtin(name.to_string()),
                    ["file", path @ ..] if !path.is_empty() => MapSource::File(path.join(" ")),
                    _ => return Err(err("expected `map builtin <name>` or `map file <path>`".into())),
                })
            }
            "inflate" => inflate = floats(1)?[0],
            "start" => {
                let f = floats(5)?;
                start = Some(State {
                    pos: Point::new(f[0], f[1]),
                    theta: f[2],
                    v: f[3],
                    omega: f[4],
                });
            }
            "goal" => {
                let f = floats(3)?;
                goal = Some((Point::new(f[0], f[1]), f[2]));
            }
            "dt" => dt = Some(floats(1)?[0]),
            "success" => success = Some(rest == ["true"]),
            "tree" => {
                let id = rest
                    .first()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad tree id".into()))?;
                let kind = match rest.get(1) {
                    Some(&"rooted") => TreeKind::Rooted,
                    Some(&"heuristic") => TreeKind::Heuristic,
                    _ => return Err(err("tree kind must be rooted or heuristic".into())),
                };
                trees.push(TracedTree {
                    id,
                    kind,
                    nodes: Vec::new(),
                });
            }
            "node" => {
                let tree = trees.last_mut().ok_or_else(|| err("node before any tree".into()))?;
                if rest.len() != 7 {
                    return Err(err("node needs id, five numbers and parent=".into()));
                }
                let id = NodeId(rest[0].parse().map_err(|_| err("bad node id".into()))?);
                let f: Vec<f64> = rest[1..6]
                    .iter()
                    .map(|s| s.parse::<f64>().map_err(|_| err(format!("bad number {s:?}"))))
                    .collect::<Result<_>>()?;
                let parent = match rest[6].strip_prefix("parent=") {
                    Some("none") => None,
                    Some(p) => Some(NodeId(p.parse().map_err(|_| err("bad parent id".into()))?)),
                    None => return Err(err("missing parent=".into())),
                };
                let state = State {
                    pos: Point::new(f[0], f[1]),
                    theta: f[2],
                    v: f[3],
                    omega: f[4],
                };
                tree.nodes.push((id, state, parent));
            }
            "trajectory" => {
                trajectory = Some(
                    rest.iter()
                        .map(|s| s.parse().map(NodeId).map_err(|_| err("bad trajectory id".into())))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "event" => events.push(TraceEvent::parse(line_no, rest)?),
            other => return Err(err(format!("unknown record `{other}`"))),
        }
    }
    let missing = |what: &str| Error::Trace {
        line: 0,
        message: format!("trace has no `{what}` record"),
    };
    let (goal, goal_radius) = goal.ok_or_else(|| missing("goal"))?;
    Ok(Trace {
        header: TraceHeader {
            planner: planner.ok_or_else(|| missing("planner"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            map: map.ok_or_else(|| missing("map"))?,
            inflate,
            start: start.ok_or_else(|| missing("start"))?,
            goal,
            goal_radius,
            dt: dt.ok_or_else(|| missing("dt"))?,
        },
        success: success.ok_or_else(|| missing("success"))?,
        trees,
        trajectory: trajectory.ok_or_else(|| missing("trajectory"))?,
        events,
    })
}

/// Re-checks a parsed trace against the tree, trajectory and heuristic-tree
/// lifecycle invariants. Returns every violation found.
pub fn validate_trace(trace: &Trace, grid: &OccupancyGrid) -> Vec<String> {
    let mut out = Vec::new();
    let mut owner: HashMap<NodeId, usize> = HashMap::new();
    let mut states: HashMap<NodeId, (State, Option<NodeId>)> = HashMap::new();

    match trace.trees.first() {
        Some(t) if t.kind == TreeKind::Rooted => {}
        _ => out.push("first tree is not the rooted tree".into()),
    }
    for (ti, tree) in trace.trees.iter().enumerate() {
        if tree.nodes.is_empty() {
            out.push(format!("tree {} is empty", tree.id));
            continue;
        }
        if ti > 0 && tree.kind == TreeKind::Rooted {
            out.push(format!("tree {} is a second rooted tree", tree.id));
        }
        let roots = tree.nodes.iter().filter(|n| n.2.is_none()).count();
        if roots != 1 || tree.nodes[0].2.is_some() {
            out.push(format!(
                "tree {} has {roots} roots (first node must be the only one)",
                tree.id
            ));
        }
        let mut earlier = HashSet::new();
        for &(id, state, parent) in &tree.nodes {
            if owner.insert(id, ti).is_some() {
                out.push(format!("node {id} appears twice"));
            }
            if let Some(p) = parent {
                if !earlier.contains(&p) {
                    out.push(format!(
                        "node {id} has parent {p} that is not an earlier node of tree {}",
                        tree.id
                    ));
                } else if let Some((ps, _)) = states.get(&p) {
                    if !grid.segment_collision_free(ps.pos, state.pos) {
                        out.push(format!("edge {p}->{id} collides"));
                    }
                }
            }
            earlier.insert(id);
            states.insert(id, (state, parent));
        }
    }

    if trace.success {
        let traj = &trace.trajectory;
        if traj.is_empty() {
            out.push("successful trace has an empty trajectory".into());
        }
        for id in traj {
            if owner.get(id) != Some(&0) {
                out.push(format!("trajectory node {id} is not in the rooted tree"));
            }
        }
        if let Some(first) = traj.first().and_then(|id| states.get(id)) {
            if !same_bits(&first.0, &trace.header.start) {
                out.push("trajectory does not start at the start state".into());
            }
        }
        if let Some(last) = traj.last().and_then(|id| states.get(id)) {
            if !in_goal_region(&last.0, trace.header.goal, trace.header.goal_radius) {
                out.push("trajectory does not end in the goal region".into());
            }
        }
        for w in traj.windows(2) {
            let (Some(prev), Some(next)) = (states.get(&w[0]), states.get(&w[1])) else {
                continue;
            };
            if next.1 != Some(w[0]) {
                out.push(format!("{} -> {} is not a tree edge", w[0], w[1]));
            }
            if !same_bits(&propagate(&prev.0, next.0.control(), trace.header.dt), &next.0) {
                out.push(format!("{} -> {} is not reproduced by its control", w[0], w[1]));
            }
        }
    } else if !trace.trajectory.is_empty() {
        out.push("failed trace carries a trajectory".into());
    }

    if trace.header.planner == PlannerKind::Mtrrt {
        out.extend(lifecycle_violations(trace));
    }
    out
}

/// Every heuristic tree that guided the rooted tree must be deleted
/// afterwards and absent from the final forest.
pub fn lifecycle_violations(trace: &Trace) -> Vec<String> {
    let mut out = Vec::new();
    let mut guiding: HashMap<TreeId, u64> = HashMap::new();
    let mut deleted: HashSet<TreeId> = HashSet::new();
    for ev in &trace.events {
        match *ev {
            TraceEvent::GuidanceStart { tree, iteration, .. } => {
                guiding.insert(tree, iteration);
            }
            TraceEvent::Delete { tree, .. } => {
                if guiding.remove(&tree).is_none() {
                    out.push(format!("tree {tree} deleted without guiding"));
                }
                deleted.insert(tree);
            }
            _ => {}
        }
    }
    for (tree, since) in guiding {
        out.push(format!(
            "tree {tree} guided from iteration {since} but was never deleted"
        ));
    }
    for tree in &trace.trees {
        if deleted.contains(&tree.id) {
            out.push(format!("deleted tree {} is still in the final forest", tree.id));
        }
    }
    out
}
