//! Render the final forest and trajectory of one MT-RRT run as SVG.
//!
//! cargo run --release --example render_forest [out.svg]

use std::path::PathBuf;

use mtrrt::bench::render_svg;
use mtrrt::heuristics::SeededRng;
use mtrrt::planners::{plan, PlanOptions, PlannerKind, Query};
use mtrrt::workspace::builtin_map;

fn main() -> mtrrt::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "maze_mtrrt.svg".into()));
    let maze = builtin_map("maze")?;
    let query = Query::new(maze.start, maze.goal);
    let r = plan(
        PlannerKind::Mtrrt,
        &query,
        &maze.grid,
        &mut SeededRng::new(5),
        PlanOptions::default(),
    )?;
    render_svg(&maze.grid, &r.trees, &r.trajectory, maze.start, maze.goal, &out)?;
    println!("{} trees drawn to {}", r.trees.len(), out.display());
    Ok(())
}
