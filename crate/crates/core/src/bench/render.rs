//! SVG rendering of a map, a forest snapshot and a trajectory.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::forest::{Tree, TreeKind};
use crate::kinodynamics::State;
use crate::workspace::{OccupancyGrid, Point};

pub const ROOTED_COLOR: &str = "orange";
pub const HEURISTIC_COLOR: &str = "blue";
pub const TRAJECTORY_COLOR: &str = "red";

/// Obstacle cells merged into rectangles `(col, row, width, height)`.
///
/// Each row is split into maximal runs; a run extends the rectangle above
/// it when both cover exactly the same columns.
pub fn obstacle_rects(grid: &OccupancyGrid) -> Vec<(usize, usize, usize, usize)> {
    let mut done = Vec::new();
    // Open rectangles keyed by (col, width) from the previous row.
    let mut open: Vec<(usize, usize, usize, usize)> = Vec::new();
    for row in 0..grid.height() {
        let mut runs = Vec::new();
        let mut col = 0;
        while col < grid.width() {
            if grid.is_occupied(col as i64, row as i64) {
                let begin = col;
                while col < grid.width() && grid.is_occupied(col as i64, row as i64) {
                    col += 1;
                }
                runs.push((begin, col - begin));
            } else {
                col += 1;
            }
        }
        let mut next = Vec::with_capacity(runs.len());
        for (c, w) in runs {
            match open.iter().position(|r| r.0 == c && r.2 == w) {
                Some(i) => {
                    let mut r = open.swap_remove(i);
                    r.3 += 1;
                    next.push(r);
                }
                None => next.push((c, row, w, 1)),
            }
        }
        done.append(&mut open);
        open = next;
    }
    done.append(&mut open);
    done.sort_unstable_by_key(|r| (r.1, r.0));
    done
}

fn fmt_num(x: f64) -> String {
    let r = (x * 1000.0).round() / 1000.0;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

/// SVG document for the given scene.
///
/// Layers, bottom to top: white background, black obstacles, heuristic
/// edges, rooted edges, trajectory, start and goal markers.
pub fn svg_string(grid: &OccupancyGrid, trees: &[Tree], trajectory: &[State], start: Point, goal: Point) -> String {
    let (w, h) = (grid.width(), grid.height());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g id="obstacles" fill="black">"#);
    for (x, y, rw, rh) in obstacle_rects(grid) {
        let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{rw}" height="{rh}"/>"#);
    }
    s.push_str("</g>\n");
    for (kind, color) in [(TreeKind::Heuristic, HEURISTIC_COLOR), (TreeKind::Rooted, ROOTED_COLOR)] {
        let _ = writeln!(s, r#"<g id="{kind}" stroke="{color}" stroke-width="1">"#);
        for tree in trees.iter().filter(|t| t.kind() == kind) {
            for (p, c) in tree.edges() {
                let (a, b) = (tree.state(p).pos, tree.state(c).pos);
                line(&mut s, a, b, color);
            }
        }
        s.push_str("</g>\n");
    }
    let _ = writeln!(s, r#"<g id="trajectory" stroke="{TRAJECTORY_COLOR}" stroke-width="2">"#);
    for pair in trajectory.windows(2) {
        line(&mut s, pair[0].pos, pair[1].pos, TRAJECTORY_COLOR);
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<circle id="start" cx="{}" cy="{}" r="4" fill="red"/>"#,
        fmt_num(start.h),
        fmt_num(start.v)
    );
    let _ = writeln!(
        s,
        r#"<circle id="goal" cx="{}" cy="{}" r="4" fill="green"/>"#,
        fmt_num(goal.h),
        fmt_num(goal.v)
    );
    s.push_str("</svg>\n");
    s
}

fn line(s: &mut String, a: Point, b: Point, color: &str) {
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}"/>"#,
        fmt_num(a.h),
        fmt_num(a.v),
        fmt_num(b.h),
        fmt_num(b.v)
    );
}

/// Writes [`svg_string`] to `path`.
pub fn render_svg(
    grid: &OccupancyGrid,
    trees: &[Tree],
    trajectory: &[State],
    start: Point,
    goal: Point,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, svg_string(grid, trees, trajectory, start, goal)).map_err(|e| Error::io(path, e))
}
