//! Grow two heuristic trees toward each other and merge them on contact.

use mtrrt::forest::Forest;
use mtrrt::kinodynamics::State;
use mtrrt::workspace::{OccupancyGrid, Point};

fn main() -> mtrrt::Result<()> {
    let grid = OccupancyGrid::empty(200, 100)?;
    let mut forest = Forest::new(State::at_rest(Point::new(10.0, 10.0), 0.0), 20.0);
    let a = forest.spawn(State::at_rest(Point::new(50.0, 50.0), 0.0));
    let b = forest.spawn(State::at_rest(Point::new(150.0, 50.0), 0.0));
    for i in 1..8 {
        let step = 6.0 * i as f64;
        forest.add_node(a, State::at_rest(Point::new(50.0 + step, 50.0), 0.0), i - 1)?;
        forest.add_node(b, State::at_rest(Point::new(150.0 - step, 50.0), 0.0), i - 1)?;
    }
    println!("{} trees, {} nodes", forest.tree_count(), forest.node_count());
    let ev = forest.detect_connection(20.0).expect("tips are 16 px apart");
    println!(
        "contact between trees {} and {} at distance {:.1}",
        ev.tree_a, ev.tree_b, ev.distance
    );
    assert!(forest.merge_trees(&ev, &grid));
    forest.audit(Some(&grid)).map_err(mtrrt::Error::Config)?;
    let merged = &forest.heuristic_trees()[0];
    println!(
        "merged into tree {} with {} nodes; audit clean",
        merged.id(),
        merged.len()
    );
    Ok(())
}
