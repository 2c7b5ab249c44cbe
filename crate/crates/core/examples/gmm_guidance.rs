//! Fit a Gaussian mixture to a tree and draw heuristic samples from it.

use mtrrt::forest::{Tree, TreeKind};
use mtrrt::heuristics::{fit_gmm, gmm_pdf, sample_heuristic_state, SeededRng};
use mtrrt::kinodynamics::State;
use mtrrt::workspace::{builtin_map, Point};

fn main() -> mtrrt::Result<()> {
    let room = builtin_map("room")?;
    // A straight chain of nodes along the top corridor.
    let mut tree = Tree::new(1, TreeKind::Heuristic, State::at_rest(Point::new(30.0, 60.0), 0.0));
    for i in 1..20 {
        tree.add_node(State::at_rest(Point::new(30.0 + 5.0 * i as f64, 60.0), 0.0), i - 1)?;
    }
    let model = fit_gmm(&tree, 8, 10.0)?;
    println!(
        "{} components, density at first node {:.3e}",
        model.kappa(),
        gmm_pdf(&model, Point::new(30.0, 60.0))
    );

    let mut rng = SeededRng::new(11);
    let samples: Vec<Point> = (0..2000)
        .map(|_| sample_heuristic_state(&model, &room.grid, &mut rng))
        .collect::<mtrrt::Result<_>>()?;
    let mean_h = samples.iter().map(|p| p.h).sum::<f64>() / samples.len() as f64;
    let mean_v = samples.iter().map(|p| p.v).sum::<f64>() / samples.len() as f64;
    println!("2000 free samples, centroid ({mean_h:.1}, {mean_v:.1})");
    Ok(())
}
