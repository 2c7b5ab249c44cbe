//! Seeded sampling: uniform free-space states, heuristic-tree roots, and the
//! Gaussian-mixture sampler built over a heuristic tree's nodes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::forest::{Tree, TreeId, TreeKind};
use crate::kinodynamics::State;
use crate::workspace::{OccupancyGrid, Point};

/// Deterministic generator: ChaCha with 8 rounds, seeded from a `u64`.
/// The stream is identical on every platform for a given seed.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        p > 0.0 && self.unit() < p
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform heading in `[-pi, pi)`.
    pub fn heading(&mut self) -> f64 {
        crate::kinodynamics::wrap_angle(-PI + 2.0 * PI * self.unit())
    }
}

/// Rejection draws between checks that the grid has any free cell at all.
const EMPTY_CHECK_INTERVAL: usize = 4096;

/// A uniformly distributed free point.
pub fn random_state(grid: &OccupancyGrid, rng: &mut SeededRng) -> Result<Point> {
    let (w, h) = (grid.width() as f64, grid.height() as f64);
    let mut tries = 0usize;
    loop {
        let p = Point::new(rng.unit() * w, rng.unit() * h);
        if grid.is_free(p) {
            return Ok(p);
        }
        tries += 1;
        if tries.is_multiple_of(EMPTY_CHECK_INTERVAL) && grid.free_cell_count() == 0 {
            return Err(Error::NoFreeCell);
        }
    }
}

/// Root state for a new heuristic tree: at `at` when given, otherwise at a
/// uniform free point; random heading, at rest.
pub fn heuristic_root(grid: &OccupancyGrid, rng: &mut SeededRng, at: Option<Point>) -> Result<State> {
    let pos = match at {
        Some(p) => p,
        None => random_state(grid, rng)?,
    };
    let theta = rng.heading();
    Ok(State::at_rest(pos, theta))
}

/// A single-node heuristic tree; see [`heuristic_root`].
pub fn spawn_heuristic_tree(id: TreeId, grid: &OccupancyGrid, rng: &mut SeededRng, at: Option<Point>) -> Result<Tree> {
    Ok(Tree::new(id, TreeKind::Heuristic, heuristic_root(grid, rng, at)?))
}

/// One axis-aligned bivariate normal component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmComponent {
    pub mu: Point,
    pub sigma_h: f64,
    pub sigma_v: f64,
}

/// Uniformly weighted mixture of diagonal-covariance normals.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    components: Vec<GmmComponent>,
}

impl GmmModel {
    pub fn new(components: Vec<GmmComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("mixture needs at least one component".into()));
        }
        if components.iter().any(|c| !(c.sigma_h > 0.0 && c.sigma_v > 0.0)) {
            return Err(Error::Config("component standard deviations must be positive".into()));
        }
        Ok(GmmModel { components })
    }

    pub fn kappa(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[GmmComponent] {
        &self.components
    }
}

/// Indices of `kappa` nodes out of `n`, evenly strided and always keeping
/// the first and last node. All nodes are kept when `n <= kappa`.
pub fn stride_indices(n: usize, kappa: usize) -> Vec<usize> {
    let kappa = kappa.max(1);
    if n <= kappa {
        return (0..n).collect();
    }
    if kappa == 1 {
        return vec![0];
    }
    let span = (n - 1) as f64 / (kappa - 1) as f64;
    (0..kappa).map(|k| (k as f64 * span).round() as usize).collect()
}

/// One isotropic component of width `sigma` per selected node.
pub fn fit_gmm(tree: &Tree, kappa_max: usize, sigma: f64) -> Result<GmmModel> {
    let comps = stride_indices(tree.len(), kappa_max)
        .into_iter()
        .map(|i| GmmComponent {
            mu: tree.state(i).pos,
            sigma_h: sigma,
            sigma_v: sigma,
        })
        .collect();
    GmmModel::new(comps)
}

/// Mixture density at `p`, each component normalized as a bivariate normal
/// with density `1 / (2 pi sigma_h sigma_v)` at its mean.
pub fn gmm_pdf(model: &GmmModel, p: Point) -> f64 {
    let sum: f64 = model
        .components
        .iter()
        .map(|c| {
            let zh = (p.h - c.mu.h) / c.sigma_h;
            let zv = (p.v - c.mu.v) / c.sigma_v;
            (-0.5 * (zh * zh + zv * zv)).exp() / (2.0 * PI * c.sigma_h * c.sigma_v)
        })
        .sum();
    sum / model.kappa() as f64
}

/// Draws from the mixture, ignoring the map.
pub fn sample_gmm(model: &GmmModel, rng: &mut SeededRng) -> Point {
    let c = model.components[rng.below(model.kappa())];
    let zh = rng.standard_normal();
    let zv = rng.standard_normal();
    Point::new(c.mu.h + c.sigma_h * zh, c.mu.v + c.sigma_v * zv)
}

/// Mixture draws rejected while they land outside free space.
pub const HEURISTIC_REJECTION_CAP: usize = 100;

/// A free point drawn from the mixture; after
/// [`HEURISTIC_REJECTION_CAP`] rejected draws it falls back to
/// [`random_state`].
pub fn sample_heuristic_state(model: &GmmModel, grid: &OccupancyGrid, rng: &mut SeededRng) -> Result<Point> {
    for _ in 0..HEURISTIC_REJECTION_CAP {
        let p = sample_gmm(model, rng);
        if grid.is_free(p) {
            return Ok(p);
        }
    }
    random_state(grid, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(9);
        let mut b = SeededRng::new(9);
        for _ in 0..100 {
            assert_eq!(a.unit().to_bits(), b.unit().to_bits());
        }
        assert_ne!(SeededRng::new(1).unit(), SeededRng::new(2).unit());
    }

    #[test]
    fn full_grid_has_no_state() {
        let mut g = OccupancyGrid::empty(4, 4).unwrap();
        g.fill_rect(0, 0, 4, 4);
        assert!(matches!(
            random_state(&g, &mut SeededRng::new(0)),
            Err(Error::NoFreeCell)
        ));
    }

    #[test]
    fn spawns() {
        let g = OccupancyGrid::empty(100, 100).unwrap();
        let t = spawn_heuristic_tree(3, &g, &mut SeededRng::new(1), Some(Point::new(50.0, 50.0))).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.root().pos, Point::new(50.0, 50.0));
        assert_eq!((t.root().v, t.root().omega), (0.0, 0.0));
        assert!((-PI..PI).contains(&t.root().theta));

        let r1 = spawn_heuristic_tree(3, &g, &mut SeededRng::new(5), None).unwrap();
        let r2 = spawn_heuristic_tree(3, &g, &mut SeededRng::new(5), None).unwrap();
        assert!(g.is_free(r1.root().pos));
        assert_eq!(r1.root(), r2.root());
    }

    #[test]
    fn strides() {
        assert_eq!(stride_indices(1, 32), vec![0]);
        assert_eq!(stride_indices(5, 32), vec![0, 1, 2, 3, 4]);
        let idx = stride_indices(100, 20);
        assert_eq!(idx.len(), 20);
        assert_eq!((idx[0], idx[19]), (0, 99));
        assert!(idx.windows(2).all(|w| (5..=6).contains(&(w[1] - w[0]))));
    }

    #[test]
    fn single_component_peak() {
        let m = GmmModel::new(vec![GmmComponent {
            mu: Point::new(0.0, 0.0),
            sigma_h: 1.0,
            sigma_v: 1.0,
        }])
        .unwrap();
        assert!((gmm_pdf(&m, Point::new(0.0, 0.0)) - 1.0 / (2.0 * PI)).abs() < 1e-12);
        let a = gmm_pdf(&m, Point::new(1.2, 0.0));
        let b = gmm_pdf(&m, Point::new(0.0, -1.2));
        let c = gmm_pdf(&m, Point::new(1.2 / 2f64.sqrt(), 1.2 / 2f64.sqrt()));
        assert!((a - b).abs() < 1e-15 && (a - c).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(GmmModel::new(vec![]).is_err());
        assert!(GmmModel::new(vec![GmmComponent {
            mu: Point::default(),
            sigma_h: 0.0,
            sigma_v: 1.0
        }])
        .is_err());
    }

    #[test]
    fn heuristic_samples_avoid_obstacles() {
        let mut g = OccupancyGrid::empty(60, 60).unwrap();
        g.fill_rect(25, 25, 35, 35);
        let m = GmmModel::new(vec![GmmComponent {
            mu: Point::new(30.0, 30.0),
            sigma_h: 6.0,
            sigma_v: 6.0,
        }])
        .unwrap();
        let mut rng = SeededRng::new(4);
        for _ in 0..2000 {
            assert!(g.is_free(sample_heuristic_state(&m, &g, &mut rng).unwrap()));
        }
        let p1 = sample_heuristic_state(&m, &g, &mut SeededRng::new(8)).unwrap();
        let p2 = sample_heuristic_state(&m, &g, &mut SeededRng::new(8)).unwrap();
        assert_eq!(p1, p2);
    }
}
