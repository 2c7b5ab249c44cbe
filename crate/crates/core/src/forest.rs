//! Search trees, forests of trees, and the proximity queries between them.
//!
//! Node positions are indexed twice: each [`Tree`] keeps a bucket grid for
//! nearest-neighbor lookups, and a [`Forest`] keeps one shared bucket grid
//! over all of its trees for radius queries across trees. Both are pure
//! accelerations; `nearest_neighbor_linear` and the brute-force scans in the
//! tests define the semantics.

use rustc_hash::{FxHashMap, FxHashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinodynamics::{self, CostFrame, KinodynamicParams, State};
use crate::planners::PlanCounters;
use crate::workspace::{OccupancyGrid, Point};

pub type TreeId = u32;

/// Forest-wide node identity. A node keeps its id when it moves between
/// trees during a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u64);

impl NodeId {
    fn new(tree: TreeId, seq: u32) -> Self {
        NodeId((u64::from(tree) << 32) | u64::from(seq))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Rooted,
    Heuristic,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::Rooted => "rooted",
            TreeKind::Heuristic => "heuristic",
        })
    }
}

const BUCKET: f64 = 16.0;

fn bucket_of(p: Point, size: f64) -> (i32, i32) {
    ((p.h / size).floor() as i32, (p.v / size).floor() as i32)
}

/// Uniform bucket grid over node positions, stored densely over a box
/// that grows as nodes arrive.
#[derive(Debug, Clone, Default)]
struct BucketIndex {
    origin: (i32, i32),
    cols: i32,
    rows: i32,
    cells: Vec<Vec<u32>>,
    /// Occupied bucket range, inclusive.
    lo: (i32, i32),
    hi: (i32, i32),
}

const SLACK: i32 = 8;

impl BucketIndex {
    fn slot(&self, key: (i32, i32)) -> Option<usize> {
        let (c, r) = (key.0 - self.origin.0, key.1 - self.origin.1);
        (c >= 0 && r >= 0 && c < self.cols && r < self.rows).then(|| (r * self.cols + c) as usize)
    }

    fn insert(&mut self, p: Point, idx: u32) {
        let key = bucket_of(p, BUCKET);
        if self.cells.is_empty() {
            self.lo = key;
            self.hi = key;
            self.regrid(key, key);
        } else {
            self.lo = (self.lo.0.min(key.0), self.lo.1.min(key.1));
            self.hi = (self.hi.0.max(key.0), self.hi.1.max(key.1));
            if self.slot(key).is_none() {
                let lo = (self.origin.0.min(key.0), self.origin.1.min(key.1));
                let hi = (
                    (self.origin.0 + self.cols - 1).max(key.0),
                    (self.origin.1 + self.rows - 1).max(key.1),
                );
                self.regrid(lo, hi);
            }
        }
        let slot = self.slot(key).expect("grid covers key");
        self.cells[slot].push(idx);
    }

    fn regrid(&mut self, lo: (i32, i32), hi: (i32, i32)) {
        let origin = (lo.0 - SLACK, lo.1 - SLACK);
        let cols = hi.0 - lo.0 + 1 + 2 * SLACK;
        let rows = hi.1 - lo.1 + 1 + 2 * SLACK;
        let mut cells = vec![Vec::new(); (cols * rows) as usize];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let old = std::mem::take(&mut self.cells[(r * self.cols + c) as usize]);
                let (nc, nr) = (c + self.origin.0 - origin.0, r + self.origin.1 - origin.1);
                cells[(nr * cols + nc) as usize] = old;
            }
        }
        self.origin = origin;
        self.cols = cols;
        self.rows = rows;
        self.cells = cells;
    }

    /// Lowest-index node among those at minimal squared distance from `q`.
    fn nearest(&self, q: Point, states: &[State]) -> usize {
        let (qc, qr) = bucket_of(q, BUCKET);
        let mut best: Option<(f64, u32)> = None;
        // Rings needed before every occupied bucket has been visited.
        let max_ring = [qc - self.lo.0, self.hi.0 - qc, qr - self.lo.1, self.hi.1 - qr]
            .into_iter()
            .max()
            .unwrap_or(0)
            .max(0);
        let visit = |best: &mut Option<(f64, u32)>, c: i32, r: i32| {
            if c < self.lo.0 || c > self.hi.0 || r < self.lo.1 || r > self.hi.1 {
                return;
            }
            let slot = self.slot((c, r)).expect("occupied range lies inside the grid");
            for &i in &self.cells[slot] {
                let d2 = states[i as usize].pos.distance_squared(q);
                let better = match *best {
                    None => true,
                    Some((bd, bi)) => d2 < bd || (d2 == bd && i < bi),
                };
                if better {
                    *best = Some((d2, i));
                }
            }
        };
        for ring in 0..=max_ring {
            if let Some((d2, _)) = best {
                // Everything in rings >= `ring` is at least (ring - 1) buckets away.
                let bound = (ring - 1) as f64 * BUCKET;
                if ring >= 1 && d2 < bound * bound {
                    break;
                }
            }
            if ring == 0 {
                visit(&mut best, qc, qr);
                continue;
            }
            let (c0, c1) = ((qc - ring).max(self.lo.0), (qc + ring).min(self.hi.0));
            for c in c0..=c1 {
                visit(&mut best, c, qr - ring);
                visit(&mut best, c, qr + ring);
            }
            let (r0, r1) = ((qr - ring + 1).max(self.lo.1), (qr + ring - 1).min(self.hi.1));
            for r in r0..=r1 {
                visit(&mut best, qc - ring, r);
                visit(&mut best, qc + ring, r);
            }
        }
        best.expect("index of a nonempty tree").1 as usize
    }
}

/// A search tree stored as parallel arrays. Node 0 is the root and every
/// parent index is smaller than its child's index.
#[derive(Debug, Clone)]
pub struct Tree {
    id: TreeId,
    kind: TreeKind,
    states: Vec<State>,
    parents: Vec<Option<usize>>,
    ids: Vec<NodeId>,
    next_seq: u32,
    index: BucketIndex,
}

impl Tree {
    pub fn new(id: TreeId, kind: TreeKind, root: State) -> Self {
        let mut tree = Tree {
            id,
            kind,
            states: Vec::new(),
            parents: Vec::new(),
            ids: Vec::new(),
            next_seq: 0,
            index: BucketIndex::default(),
        };
        let nid = tree.fresh_id();
        tree.push(root, None, nid);
        tree
    }

    fn fresh_id(&mut self) -> NodeId {
        let nid = NodeId::new(self.id, self.next_seq);
        self.next_seq += 1;
        nid
    }

    fn push(&mut self, state: State, parent: Option<usize>, nid: NodeId) -> usize {
        let idx = self.states.len();
        self.index.insert(state.pos, idx as u32);
        self.states.push(state);
        self.parents.push(parent);
        self.ids.push(nid);
        idx
    }

    pub fn id(&self) -> TreeId {
        self.id
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn root(&self) -> &State {
        &self.states[0]
    }

    pub fn state(&self, idx: usize) -> &State {
        &self.states[idx]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn parent(&self, idx: usize) -> Option<usize> {
        self.parents[idx]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn node_id(&self, idx: usize) -> NodeId {
        self.ids[idx]
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }

    /// Iterates `(parent, child)` index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(child, p)| p.map(|p| (p, child)))
    }

    /// Appends `state` under `parent`. The caller is responsible for having
    /// collision-checked the edge.
    pub fn add_node(&mut self, state: State, parent: usize) -> Result<usize> {
        if parent >= self.len() {
            return Err(Error::InvalidNode {
                index: parent,
                len: self.len(),
            });
        }
        let nid = self.fresh_id();
        Ok(self.push(state, Some(parent), nid))
    }

    /// Index of the node nearest to `q` by position; ties go to the lowest
    /// index.
    pub fn nearest_neighbor(&self, q: Point) -> usize {
        self.index.nearest(q, &self.states)
    }

    /// Reference linear scan with the same tie-breaking as
    /// [`Tree::nearest_neighbor`].
    pub fn nearest_neighbor_linear(&self, q: Point) -> usize {
        let mut best = 0;
        let mut best_d2 = f64::INFINITY;
        for (i, s) in self.states.iter().enumerate() {
            let d2 = s.pos.distance_squared(q);
            if d2 < best_d2 {
                best = i;
                best_d2 = d2;
            }
        }
        best
    }

    /// Distance from `q` to the nearest node, with that node's index.
    pub fn dist_to_tree(&self, q: Point) -> (f64, usize) {
        let idx = self.nearest_neighbor(q);
        (self.states[idx].pos.distance(q), idx)
    }

    /// Node indices from the root down to `leaf`.
    pub fn path_to(&self, leaf: usize) -> Result<Vec<usize>> {
        if leaf >= self.len() {
            return Err(Error::InvalidNode {
                index: leaf,
                len: self.len(),
            });
        }
        let mut path = vec![leaf];
        let mut cur = leaf;
        while let Some(p) = self.parents[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Checks the structural invariants, and edge clearance when a grid is
    /// given. Returns a description of the first violation.
    pub fn audit(&self, grid: Option<&OccupancyGrid>) -> std::result::Result<(), String> {
        let n = self.len();
        if n == 0 {
            return Err(format!("tree {} is empty", self.id));
        }
        if self.parents.len() != n || self.ids.len() != n {
            return Err(format!("tree {} has ragged arrays", self.id));
        }
        let roots = self.parents.iter().filter(|p| p.is_none()).count();
        if roots != 1 || self.parents[0].is_some() {
            return Err(format!(
                "tree {} has {roots} roots (node 0 must be the only one)",
                self.id
            ));
        }
        for (parent, child) in self.edges() {
            // parent < child makes every parent chain strictly decreasing, so
            // links are acyclic and always reach node 0.
            if parent >= child {
                return Err(format!(
                    "tree {} edge {parent}->{child} breaks insertion order",
                    self.id
                ));
            }
            if let Some(g) = grid {
                if !g.segment_collision_free(self.states[parent].pos, self.states[child].pos) {
                    return Err(format!("tree {} edge {parent}->{child} collides", self.id));
                }
            }
        }
        let unique: FxHashSet<_> = self.ids.iter().collect();
        if unique.len() != n {
            return Err(format!("tree {} repeats node ids", self.id));
        }
        Ok(())
    }
}

/// Node pairs excluded from contact searches, smaller id first.
pub type BlockedPairs = FxHashSet<(NodeId, NodeId)>;

/// Two trees whose closest node pair is nearer than the connection threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionEvent {
    pub tree_a: TreeId,
    pub tree_b: TreeId,
    pub node_a: usize,
    pub node_b: usize,
    pub distance: f64,
}

/// Bucket grid over every node in a forest, keyed for radius queries.
#[derive(Debug, Clone)]
struct ProximityIndex {
    cell: f64,
    buckets: FxHashMap<(i32, i32), Vec<(NodeId, Point)>>,
    len: usize,
}

impl ProximityIndex {
    fn new(cell: f64) -> Self {
        ProximityIndex {
            cell,
            buckets: FxHashMap::default(),
            len: 0,
        }
    }

    fn insert(&mut self, nid: NodeId, p: Point) {
        self.buckets.entry(bucket_of(p, self.cell)).or_default().push((nid, p));
        self.len += 1;
    }

    fn remove(&mut self, nid: NodeId, p: Point) {
        let key = bucket_of(p, self.cell);
        if let Some(list) = self.buckets.get_mut(&key) {
            if let Some(pos) = list.iter().position(|&(id, _)| id == nid) {
                list.swap_remove(pos);
                self.len -= 1;
            }
            if list.is_empty() {
                self.buckets.remove(&key);
            }
        }
    }

    /// Calls `f` for every entry within `radius` (strictly) of `q`.
    fn for_each_within(&self, q: Point, radius: f64, mut f: impl FnMut(NodeId, Point, f64)) {
        let reach = (radius / self.cell).ceil() as i32;
        let (qc, qr) = bucket_of(q, self.cell);
        let r2 = radius * radius;
        for dr in -reach..=reach {
            for dc in -reach..=reach {
                if let Some(list) = self.buckets.get(&(qc + dc, qr + dr)) {
                    for &(nid, p) in list {
                        let d2 = p.distance_squared(q);
                        if d2 < r2 {
                            f(nid, p, d2);
                        }
                    }
                }
            }
        }
    }
}

/// The rooted tree plus any number of heuristic trees, pairwise disjoint.
#[derive(Debug, Clone)]
pub struct Forest {
    rooted: Tree,
    heuristic: Vec<Tree>,
    next_tree: TreeId,
    locator: FxHashMap<NodeId, (TreeId, usize)>,
    proximity: ProximityIndex,
}

impl Forest {
    pub const ROOTED: TreeId = 0;

    /// `cell` sizes the shared radius index; queries of any radius work, but
    /// a cell near the typical query radius is fastest.
    pub fn new(start: State, cell: f64) -> Self {
        let rooted = Tree::new(Self::ROOTED, TreeKind::Rooted, start);
        let mut forest = Forest {
            rooted,
            heuristic: Vec::new(),
            next_tree: Self::ROOTED + 1,
            locator: FxHashMap::default(),
            proximity: ProximityIndex::new(cell.max(1.0)),
        };
        forest.register(Self::ROOTED, 0);
        forest
    }

    fn register(&mut self, tree: TreeId, idx: usize) {
        let t = self.tree(tree).expect("registering into a live tree");
        let (nid, pos) = (t.node_id(idx), t.state(idx).pos);
        self.locator.insert(nid, (tree, idx));
        self.proximity.insert(nid, pos);
    }

    pub fn rooted(&self) -> &Tree {
        &self.rooted
    }

    pub fn heuristic_trees(&self) -> &[Tree] {
        &self.heuristic
    }

    pub fn tree_count(&self) -> usize {
        1 + self.heuristic.len()
    }

    pub fn node_count(&self) -> usize {
        self.rooted.len() + self.heuristic.iter().map(Tree::len).sum::<usize>()
    }

    pub fn tree(&self, id: TreeId) -> Option<&Tree> {
        if id == Self::ROOTED {
            Some(&self.rooted)
        } else {
            self.slot_of(id).map(|i| &self.heuristic[i])
        }
    }

    fn tree_mut(&mut self, id: TreeId) -> Option<&mut Tree> {
        if id == Self::ROOTED {
            Some(&mut self.rooted)
        } else {
            self.slot_of(id).map(|i| &mut self.heuristic[i])
        }
    }

    /// Current `(tree, index)` of a node, if it is still in the forest.
    pub fn locate(&self, nid: NodeId) -> Option<(TreeId, usize)> {
        self.locator.get(&nid).copied()
    }

    /// Adds a single-node heuristic tree.
    pub fn spawn(&mut self, root: State) -> TreeId {
        let id = self.next_tree;
        self.next_tree += 1;
        self.heuristic.push(Tree::new(id, TreeKind::Heuristic, root));
        self.register(id, 0);
        id
    }

    pub fn add_node(&mut self, tree: TreeId, state: State, parent: usize) -> Result<usize> {
        let t = self
            .tree_mut(tree)
            .ok_or_else(|| Error::Config(format!("no tree {tree} in forest")))?;
        let idx = t.add_node(state, parent)?;
        self.register(tree, idx);
        Ok(idx)
    }

    /// Kinodynamic extension of the rooted tree toward `target`.
    pub fn extend_rooted(
        &mut self,
        target: Point,
        grid: &OccupancyGrid,
        params: &KinodynamicParams,
        frame: &CostFrame,
        counters: &mut PlanCounters,
    ) -> Option<usize> {
        let idx = kinodynamics::extend(&mut self.rooted, target, grid, params, frame, counters)?;
        self.register(Self::ROOTED, idx);
        Some(idx)
    }

    /// Removes a heuristic tree and returns it. The rooted tree cannot be
    /// removed.
    pub fn remove_tree(&mut self, id: TreeId) -> Option<Tree> {
        let slot = self.slot_of(id)?;
        let tree = self.heuristic.remove(slot);
        for (nid, s) in tree.ids.iter().zip(&tree.states) {
            self.locator.remove(nid);
            self.proximity.remove(*nid, s.pos);
        }
        Some(tree)
    }

    /// Nearest heuristic-tree node strictly within `radius` of `q`, as
    /// `(tree, index, distance)`. Ties resolve to the earlier tree in forest
    /// order, then the lower index.
    pub fn nearest_heuristic_within(&self, q: Point, radius: f64) -> Option<(TreeId, usize, f64)> {
        let mut best: Option<(f64, TreeId, usize, TreeId)> = None;
        self.proximity.for_each_within(q, radius, |nid, _, d2| {
            let (tree, idx) = self.locator[&nid];
            if tree == Self::ROOTED {
                return;
            }
            let order = self.order_of(tree);
            let key = (d2, order, idx, tree);
            if best.is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
                best = Some(key);
            }
        });
        best.map(|(d2, _, idx, tree)| (tree, idx, d2.sqrt()))
    }

    /// Position of a tree in scan order: rooted first, then heuristic trees
    /// by age. Ids are handed out in increasing order, so the id itself
    /// sorts the same way.
    fn order_of(&self, tree: TreeId) -> TreeId {
        tree
    }

    fn slot_of(&self, id: TreeId) -> Option<usize> {
        self.heuristic.binary_search_by_key(&id, |t| t.id).ok()
    }

    /// Scans tree pairs (rooted with each heuristic tree, then heuristic
    /// pairs, in forest order) and reports the first pair whose closest
    /// nodes are strictly nearer than `lambda_connect`.
    pub fn detect_connection(&self, lambda_connect: f64) -> Option<ConnectionEvent> {
        self.detect_connection_excluding(lambda_connect, &BlockedPairs::default())
    }

    /// As [`Forest::detect_connection`], ignoring node pairs listed in
    /// `blocked` (stored with the smaller id first).
    pub fn detect_connection_excluding(&self, lambda_connect: f64, blocked: &BlockedPairs) -> Option<ConnectionEvent> {
        let trees: Vec<&Tree> = std::iter::once(&self.rooted).chain(&self.heuristic).collect();
        for i in 0..trees.len() {
            for j in i + 1..trees.len() {
                if let Some(ev) = self.closest_pair(trees[i], trees[j], lambda_connect, blocked) {
                    return Some(ev);
                }
            }
        }
        None
    }

    fn closest_pair(&self, a: &Tree, b: &Tree, lambda: f64, blocked: &BlockedPairs) -> Option<ConnectionEvent> {
        let mut best: Option<(f64, usize, usize)> = None;
        for (ia, sa) in a.states.iter().enumerate() {
            let na = a.ids[ia];
            self.proximity.for_each_within(sa.pos, lambda, |nb, _, d2| {
                let (tb, ib) = self.locator[&nb];
                if tb != b.id || blocked.contains(&ordered_pair(na, nb)) {
                    return;
                }
                if best.is_none_or(|bst| (d2, ia, ib) < bst) {
                    best = Some((d2, ia, ib));
                }
            });
        }
        best.map(|(d2, node_a, node_b)| ConnectionEvent {
            tree_a: a.id,
            tree_b: b.id,
            node_a,
            node_b,
            distance: d2.sqrt(),
        })
    }

    /// Every node of another tree strictly within `lambda_connect` of node
    /// `nid`, skipping `blocked` pairs. The rooted tree, when involved, is
    /// always reported as `tree_a`; otherwise the older tree is.
    pub fn contacts_of(&self, nid: NodeId, lambda_connect: f64, blocked: &BlockedPairs) -> Vec<ConnectionEvent> {
        let Some((tree, idx)) = self.locate(nid) else {
            return Vec::new();
        };
        let pos = self.tree(tree).expect("located").state(idx).pos;
        let mut out = Vec::new();
        self.proximity.for_each_within(pos, lambda_connect, |other, _, d2| {
            let (ot, oi) = self.locator[&other];
            if ot == tree || blocked.contains(&ordered_pair(nid, other)) {
                return;
            }
            let mine = (tree, idx);
            let theirs = (ot, oi);
            let (a, b) = if self.order_of(tree) < self.order_of(ot) {
                (mine, theirs)
            } else {
                (theirs, mine)
            };
            out.push(ConnectionEvent {
                tree_a: a.0,
                tree_b: b.0,
                node_a: a.1,
                node_b: b.1,
                distance: d2.sqrt(),
            });
        });
        out
    }

    /// Joins two heuristic trees along the event's node pair.
    ///
    /// If the segment `node_a -> node_b` is collision-free, tree B is
    /// re-rooted at `node_b` by reversing the parent links on its path to the
    /// old root, hung under `node_a`, and moved wholesale into tree A; tree B
    /// disappears from the forest and `true` is returned. Otherwise nothing
    /// changes and `false` is returned.
    pub fn merge_trees(&mut self, ev: &ConnectionEvent, grid: &OccupancyGrid) -> bool {
        if ev.tree_a == ev.tree_b || ev.tree_a == Self::ROOTED || ev.tree_b == Self::ROOTED {
            return false;
        }
        let (Some(a), Some(b)) = (self.tree(ev.tree_a), self.tree(ev.tree_b)) else {
            return false;
        };
        if ev.node_a >= a.len() || ev.node_b >= b.len() {
            return false;
        }
        if !grid.segment_collision_free(a.state(ev.node_a).pos, b.state(ev.node_b).pos) {
            return false;
        }
        let slot = self
            .heuristic
            .iter()
            .position(|t| t.id == ev.tree_b)
            .expect("checked above");
        let b = self.heuristic.remove(slot);
        let parents = rerooted_parents(&b.parents, ev.node_b);
        let order = topological_order(&parents, ev.node_b);

        let a = self.tree_mut(ev.tree_a).expect("checked above");
        let base = a.len();
        let mut new_index = vec![usize::MAX; b.len()];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = base + k;
        }
        for &old in &order {
            let parent = match parents[old] {
                None => ev.node_a,
                Some(p) => new_index[p],
            };
            a.push(b.states[old], Some(parent), b.ids[old]);
        }
        for &old in &order {
            self.locator.insert(b.ids[old], (ev.tree_a, new_index[old]));
        }
        true
    }

    /// Full consistency check: per-tree audits, node disjointness across
    /// trees, and agreement of the shared index with tree contents.
    pub fn audit(&self, grid: Option<&OccupancyGrid>) -> std::result::Result<(), String> {
        if self.rooted.kind != TreeKind::Rooted {
            return Err("rooted tree has the wrong kind".into());
        }
        let mut seen = FxHashSet::default();
        for t in std::iter::once(&self.rooted).chain(&self.heuristic) {
            t.audit(grid)?;
            if t.id != Self::ROOTED && t.kind != TreeKind::Heuristic {
                return Err(format!("tree {} has the wrong kind", t.id));
            }
            for (i, nid) in t.ids.iter().enumerate() {
                if !seen.insert(*nid) {
                    return Err(format!("node {nid} appears in more than one tree"));
                }
                if self.locator.get(nid) != Some(&(t.id, i)) {
                    return Err(format!("node {nid} is mislocated"));
                }
            }
        }
        if self.locator.len() != seen.len() || self.proximity.len != seen.len() {
            return Err("forest indices are out of sync with tree contents".into());
        }
        Ok(())
    }
}

pub(crate) fn ordered_pair(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Parent links after making `new_root` the root: the links along the path
/// from `new_root` to the old root are reversed, all others are kept.
pub fn rerooted_parents(parents: &[Option<usize>], new_root: usize) -> Vec<Option<usize>> {
    let mut out = parents.to_vec();
    let mut prev = None;
    let mut cur = Some(new_root);
    while let Some(c) = cur {
        let next = parents[c];
        out[c] = prev;
        prev = Some(c);
        cur = next;
    }
    out
}

/// Preorder from `root` over the child relation implied by `parents`.
fn topological_order(parents: &[Option<usize>], root: usize) -> Vec<usize> {
    let mut children = vec![Vec::new(); parents.len()];
    for (child, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(child);
        }
    }
    let mut order = Vec::with_capacity(parents.len());
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        order.push(n);
        stack.extend(children[n].iter().rev());
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(h: f64, v: f64) -> State {
        State::at_rest(Point::new(h, v), 0.0)
    }

    #[test]
    fn nearest_basics() {
        let mut t = Tree::new(0, TreeKind::Rooted, at(0.0, 0.0));
        assert_eq!(t.nearest_neighbor(Point::new(100.0, 100.0)), 0);
        t.add_node(at(10.0, 0.0), 0).unwrap();
        assert_eq!(t.nearest_neighbor(Point::new(6.0, 0.0)), 1);
        // Equidistant: lowest index wins.
        assert_eq!(t.nearest_neighbor(Point::new(5.0, 0.0)), 0);
    }

    #[test]
    fn add_node_contract() {
        let mut t = Tree::new(0, TreeKind::Rooted, at(0.0, 0.0));
        assert_eq!(t.add_node(at(1.0, 0.0), 0).unwrap(), 1);
        assert_eq!(t.parents(), &[None, Some(0)]);
        assert!(matches!(
            t.add_node(at(1.0, 0.0), 7),
            Err(Error::InvalidNode { index: 7, len: 2 })
        ));
        for k in 0..10 {
            t.add_node(at(k as f64, 1.0), 1).unwrap();
        }
        assert_eq!(t.len(), 12);
        assert!(t.audit(None).is_ok());
    }

    #[test]
    fn distance_to_tree() {
        let t = Tree::new(0, TreeKind::Rooted, at(0.0, 0.0));
        assert_eq!(t.dist_to_tree(Point::new(3.0, 4.0)), (5.0, 0));
        assert_eq!(t.dist_to_tree(Point::new(0.0, 0.0)), (0.0, 0));
    }

    #[test]
    fn reroot_chain() {
        // A <- B <- C
        let parents = vec![None, Some(0), Some(1)];
        assert_eq!(rerooted_parents(&parents, 2), vec![Some(1), Some(2), None]);
        assert_eq!(rerooted_parents(&parents, 0), parents);
        // Branching: 0 <- 1 <- 2, 0 <- 3
        let parents = vec![None, Some(0), Some(1), Some(0)];
        assert_eq!(rerooted_parents(&parents, 2), vec![Some(1), Some(2), None, Some(0)]);
    }

    #[test]
    fn connection_threshold() {
        let mut f = Forest::new(at(0.0, 0.0), 15.0);
        let h = f.spawn(at(0.0, 5.0));
        let ev = f.detect_connection(10.0).unwrap();
        assert_eq!((ev.tree_a, ev.tree_b, ev.distance), (Forest::ROOTED, h, 5.0));
        assert!(f.detect_connection(3.0).is_none());
    }

    #[test]
    fn rooted_pairs_take_priority() {
        let mut f = Forest::new(at(100.0, 100.0), 15.0);
        let h1 = f.spawn(at(0.0, 0.0));
        let _h2 = f.spawn(at(1.0, 0.0));
        let h3 = f.spawn(at(100.0, 108.0));
        let ev = f.detect_connection(10.0).unwrap();
        assert_eq!((ev.tree_a, ev.tree_b), (Forest::ROOTED, h3));
        f.remove_tree(h3);
        let ev = f.detect_connection(10.0).unwrap();
        assert_eq!(ev.tree_a, h1);
    }

    #[test]
    fn merge_moves_every_node() {
        let grid = OccupancyGrid::empty(100, 100).unwrap();
        let mut f = Forest::new(at(90.0, 90.0), 15.0);
        let a = f.spawn(at(10.0, 10.0));
        f.add_node(a, at(20.0, 10.0), 0).unwrap();
        let b = f.spawn(at(50.0, 10.0));
        f.add_node(b, at(40.0, 10.0), 0).unwrap();
        f.add_node(b, at(30.0, 10.0), 1).unwrap();
        f.add_node(b, at(50.0, 20.0), 0).unwrap();
        let ev = f.detect_connection(12.0).unwrap();
        assert_eq!((ev.tree_a, ev.tree_b, ev.node_a, ev.node_b), (a, b, 1, 2));
        assert!(f.merge_trees(&ev, &grid));
        assert_eq!(f.tree_count(), 2);
        let merged = f.tree(a).unwrap();
        assert_eq!(merged.len(), 6);
        // The old leaf (30,10) now hangs under (20,10) and leads back to (50,10).
        assert_eq!(merged.state(2).pos, Point::new(30.0, 10.0));
        assert_eq!(merged.parent(2), Some(1));
        assert!(f.audit(Some(&grid)).is_ok());
    }

    #[test]
    fn blocked_merge_is_a_no_op() {
        let mut grid = OccupancyGrid::empty(100, 100).unwrap();
        grid.fill_rect(24, 0, 26, 100);
        let mut f = Forest::new(at(90.0, 90.0), 15.0);
        let a = f.spawn(at(20.0, 10.0));
        let b = f.spawn(at(30.0, 10.0));
        let ev = f.detect_connection(12.0).unwrap();
        assert!(!f.merge_trees(&ev, &grid));
        assert_eq!(f.tree_count(), 3);
        assert_eq!(f.tree(a).unwrap().len(), 1);
        assert_eq!(f.tree(b).unwrap().len(), 1);
        let mut blocked = BlockedPairs::default();
        blocked.insert(ordered_pair(
            f.tree(a).unwrap().node_id(0),
            f.tree(b).unwrap().node_id(0),
        ));
        assert!(f.detect_connection_excluding(12.0, &blocked).is_none());
    }
}
