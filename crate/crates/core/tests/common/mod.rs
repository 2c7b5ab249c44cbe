//! Independent reference implementations shared by the integration and
//! acceptance tests.

#![allow(dead_code)]

use mtrrt::forest::{Forest, Tree, TreeKind};
use mtrrt::heuristics::{gmm_pdf, sample_heuristic_state, GmmComponent, GmmModel, SeededRng};
use mtrrt::kinodynamics::{control_candidates, cost, extend, propagate, CostFrame, KinodynamicParams, State};
use mtrrt::planners::PlanCounters;
use mtrrt::workspace::{OccupancyGrid, Point};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erf;

pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.unit()
}

pub fn random_point(rng: &mut SeededRng, w: f64, h: f64) -> Point {
    Point::new(uniform(rng, 0.0, w), uniform(rng, 0.0, h))
}

pub fn random_grid(rng: &mut SeededRng, w: usize, h: usize, density: f64) -> OccupancyGrid {
    let cells = (0..w * h).map(|_| rng.chance(density)).collect();
    OccupancyGrid::from_cells(w, h, cells).unwrap()
}

/// Closed segment against the closed box `[x0, x1] x [y0, y1]`
/// (Liang-Barsky clipping).
pub fn segment_hits_box(a: Point, b: Point, x0: f64, y0: f64, x1: f64, y1: f64) -> bool {
    let (dx, dy) = (b.h - a.h, b.v - a.v);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [(-dx, a.h - x0), (dx, x1 - a.h), (-dy, a.v - y0), (dy, y1 - a.v)] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    t0 <= t1
}

/// Segment check by brute force: both endpoints inside the grid and no
/// occupied cell square touched by the segment.
pub fn segment_free_oracle(grid: &OccupancyGrid, a: Point, b: Point) -> bool {
    let inside = |p: Point| p.h >= 0.0 && p.v >= 0.0 && p.h < grid.width() as f64 && p.v < grid.height() as f64;
    if !inside(a) || !inside(b) {
        return false;
    }
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            if grid.is_occupied(col as i64, row as i64)
                && segment_hits_box(a, b, col as f64, row as f64, (col + 1) as f64, (row + 1) as f64)
            {
                return false;
            }
        }
    }
    true
}

fn d2(a: Point, b: Point) -> f64 {
    let (dh, dv) = (a.h - b.h, a.v - b.v);
    dh * dh + dv * dv
}

fn random_tree(rng: &mut SeededRng, id: u32, kind: TreeKind, n: usize, w: f64, h: f64) -> Tree {
    let mut t = Tree::new(id, kind, State::at_rest(random_point(rng, w, h), 0.0));
    for _ in 1..n {
        let parent = rng.below(t.len());
        t.add_node(State::at_rest(random_point(rng, w, h), 0.0), parent)
            .unwrap();
    }
    t
}

/// Instances where `Tree::nearest_neighbor` disagrees with a scan.
pub fn nearest_neighbor_mismatches(instances: usize, seed: u64) -> usize {
    let mut rng = SeededRng::new(seed);
    let mut bad = 0;
    for _ in 0..instances {
        let n = 1 + rng.below(400);
        let side = uniform(&mut rng, 10.0, 600.0);
        let tree = random_tree(&mut rng, 0, TreeKind::Rooted, n, side, side);
        let wrong = (0..5).any(|_| {
            let q = Point::new(
                uniform(&mut rng, -50.0, side + 50.0),
                uniform(&mut rng, -50.0, side + 50.0),
            );
            let mut best = (f64::INFINITY, 0);
            for (i, s) in tree.states().iter().enumerate() {
                let d = d2(s.pos, q);
                if d < best.0 {
                    best = (d, i);
                }
            }
            tree.nearest_neighbor(q) != best.1
        });
        bad += usize::from(wrong);
    }
    bad
}

/// Expected `(tree_a, tree_b, node_a, node_b)` of the first contact: tree
/// pairs in forest order, closest pair within each, ties to lower indices.
fn detect_oracle(forest: &Forest, lc: f64) -> Option<(u32, u32, usize, usize)> {
    let trees: Vec<&Tree> = std::iter::once(forest.rooted())
        .chain(forest.heuristic_trees())
        .collect();
    for i in 0..trees.len() {
        for j in i + 1..trees.len() {
            let mut best: Option<(f64, usize, usize)> = None;
            for (ia, sa) in trees[i].states().iter().enumerate() {
                for (ib, sb) in trees[j].states().iter().enumerate() {
                    let d = d2(sa.pos, sb.pos);
                    if d < lc * lc && best.is_none_or(|b| (d, ia, ib) < b) {
                        best = Some((d, ia, ib));
                    }
                }
            }
            if let Some((_, ia, ib)) = best {
                return Some((trees[i].id(), trees[j].id(), ia, ib));
            }
        }
    }
    None
}

/// Instances where `Forest::detect_connection` disagrees with a scan. Each
/// forest sees random spawns, insertions, removals and merges first.
pub fn detect_connection_mismatches(instances: usize, seed: u64) -> usize {
    let mut rng = SeededRng::new(seed);
    let grid = OccupancyGrid::empty(300, 300).unwrap();
    let mut bad = 0;
    for _ in 0..instances {
        let cell = uniform(&mut rng, 2.0, 60.0);
        let mut forest = Forest::new(State::at_rest(random_point(&mut rng, 300.0, 300.0), 0.0), cell);
        let ops = rng.below(120);
        for _ in 0..ops {
            let ids: Vec<u32> = forest.heuristic_trees().iter().map(Tree::id).collect();
            match rng.below(10) {
                0..=1 => {
                    forest.spawn(State::at_rest(random_point(&mut rng, 300.0, 300.0), 0.0));
                }
                2 if !ids.is_empty() => {
                    forest.remove_tree(ids[rng.below(ids.len())]);
                }
                3 if ids.len() >= 2 => {
                    if let Some(ev) = forest.detect_connection(40.0) {
                        forest.merge_trees(&ev, &grid);
                    }
                }
                _ => {
                    let tree = if ids.is_empty() || rng.chance(0.3) {
                        Forest::ROOTED
                    } else {
                        ids[rng.below(ids.len())]
                    };
                    let len = forest.tree(tree).unwrap().len();
                    let parent = rng.below(len);
                    let p = random_point(&mut rng, 300.0, 300.0);
                    forest.add_node(tree, State::at_rest(p, 0.0), parent).unwrap();
                }
            }
        }
        let lc = uniform(&mut rng, 1.0, 80.0);
        let got = forest
            .detect_connection(lc)
            .map(|e| (e.tree_a, e.tree_b, e.node_a, e.node_b));
        bad += usize::from(got != detect_oracle(&forest, lc) || forest.audit(None).is_err());
    }
    bad
}

/// Calls where `extend` disagrees with evaluate-all, filter-by-collision,
/// take-the-first-minimum, or miscounts rejected candidates.
pub fn extend_mismatches(calls: usize, seed: u64) -> usize {
    let mut rng = SeededRng::new(seed);
    let params = KinodynamicParams::default();
    let mut bad = 0;
    for _ in 0..calls {
        let density = uniform(&mut rng, 0.0, 0.3);
        let grid = random_grid(&mut rng, 60, 60, density);
        let mut tree = Tree::new(0, TreeKind::Rooted, random_state_with_motion(&mut rng, &params));
        for _ in 0..rng.below(8) {
            let parent = rng.below(tree.len());
            tree.add_node(random_state_with_motion(&mut rng, &params), parent)
                .unwrap();
        }
        let target = random_point(&mut rng, 60.0, 60.0);
        let frame = CostFrame::new(Point::new(1.0, 1.0), Point::new(59.0, 59.0)).unwrap();

        let near_idx = tree.nearest_neighbor_linear(target);
        let near = *tree.state(near_idx);
        let cands: Vec<(f64, State, bool)> = control_candidates(&near, &params)
            .into_iter()
            .map(|u| {
                let s = propagate(&near, u, params.dt);
                let c = cost(&s, target, &frame, &params).unwrap();
                (c, s, segment_free_oracle(&grid, near.pos, s.pos))
            })
            .collect();
        let mut chosen: Option<(usize, f64)> = None;
        for (k, (c, _, free)) in cands.iter().enumerate() {
            if *free && chosen.is_none_or(|(_, best)| *c < best) {
                chosen = Some((k, *c));
            }
        }
        let expected_invalid = cands
            .iter()
            .enumerate()
            .filter(|(k, (c, _, free))| !free && chosen.is_none_or(|(j, best)| *c < best || (*c == best && k < &j)))
            .count() as u64;

        let mut counters = PlanCounters::default();
        let got = extend(&mut tree, target, &grid, &params, &frame, &mut counters);
        let ok = match (got, chosen) {
            (None, None) => true,
            (Some(idx), Some((k, _))) => *tree.state(idx) == cands[k].1 && tree.parent(idx) == Some(near_idx),
            _ => false,
        };
        bad += usize::from(!ok || counters.invalid_connections != expected_invalid);
    }
    bad
}

fn random_state_with_motion(rng: &mut SeededRng, p: &KinodynamicParams) -> State {
    State {
        pos: random_point(rng, 60.0, 60.0),
        theta: uniform(rng, -std::f64::consts::PI, std::f64::consts::PI),
        v: uniform(rng, p.v_min, p.v_max),
        omega: uniform(rng, -p.omega_max, p.omega_max),
    }
}

pub fn unit_peak_error() -> f64 {
    let mu = Point::new(3.0, -2.0);
    let m = GmmModel::new(vec![GmmComponent {
        mu,
        sigma_h: 1.0,
        sigma_v: 1.0,
    }])
    .unwrap();
    (gmm_pdf(&m, mu) - 1.0 / (2.0 * std::f64::consts::PI)).abs()
}

pub fn test_mixture() -> GmmModel {
    GmmModel::new(vec![
        GmmComponent {
            mu: Point::new(60.0, 70.0),
            sigma_h: 12.0,
            sigma_v: 12.0,
        },
        GmmComponent {
            mu: Point::new(130.0, 90.0),
            sigma_h: 20.0,
            sigma_v: 8.0,
        },
        GmmComponent {
            mu: Point::new(100.0, 150.0),
            sigma_h: 6.0,
            sigma_v: 15.0,
        },
    ])
    .unwrap()
}

/// Midpoint-rule integral of the test mixture over a box far wider than
/// its components.
pub fn mixture_integral() -> f64 {
    let m = test_mixture();
    let step = 0.5;
    let (lo, hi) = (-100.0, 300.0);
    let n = ((hi - lo) / step) as usize;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = Point::new(lo + (i as f64 + 0.5) * step, lo + (j as f64 + 0.5) * step);
            sum += gmm_pdf(&m, p);
        }
    }
    sum * step * step
}

fn normal_mass(mu: f64, sigma: f64, a: f64, b: f64) -> f64 {
    let z = |x: f64| (x - mu) / (sigma * std::f64::consts::SQRT_2);
    0.5 * (erf(z(b)) - erf(z(a)))
}

/// Chi-square p-value of `n` heuristic samples on a free 200 x 200 grid
/// against the test mixture truncated to the grid, on 20 x 20 bins. Bins
/// expecting fewer than 5 samples are pooled.
pub fn heuristic_chi_square_p(n: usize, seed: u64) -> f64 {
    let grid = OccupancyGrid::empty(200, 200).unwrap();
    let m = test_mixture();
    let (bins, width) = (20usize, 10.0);
    let mass = |i: usize, j: usize| -> f64 {
        let (h0, v0) = (i as f64 * width, j as f64 * width);
        m.components()
            .iter()
            .map(|c| normal_mass(c.mu.h, c.sigma_h, h0, h0 + width) * normal_mass(c.mu.v, c.sigma_v, v0, v0 + width))
            .sum::<f64>()
            / m.kappa() as f64
    };
    let mut expected = vec![0.0; bins * bins];
    for i in 0..bins {
        for j in 0..bins {
            expected[j * bins + i] = mass(i, j);
        }
    }
    let total: f64 = expected.iter().sum();
    for e in &mut expected {
        *e *= n as f64 / total;
    }
    let mut observed = vec![0.0; bins * bins];
    let mut rng = SeededRng::new(seed);
    for _ in 0..n {
        let p = sample_heuristic_state(&m, &grid, &mut rng).unwrap();
        let (i, j) = ((p.h / width) as usize, (p.v / width) as usize);
        observed[j * bins + i] += 1.0;
    }
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pool_e, mut pool_o) = (0.0, 0.0);
    for (e, o) in expected.iter().zip(&observed) {
        if *e < 5.0 {
            pool_e += e;
            pool_o += o;
        } else {
            stat += (o - e) * (o - e) / e;
            cells += 1;
        }
    }
    if pool_e > 0.0 {
        stat += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
        cells += 1;
    }
    let dist = ChiSquared::new((cells - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// Two-pass population mean and variance.
pub fn two_pass(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (mean, xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n)
}
