//! The three procedural benchmark worlds: `room`, `clutter` and `maze`.
//!
//! All are 450 x 350 pixels, deterministic, and carry a fixed start/goal
//! query. Layout constants live here; committed renders are in `docs/`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{OccupancyGrid, Point};
use crate::error::{Error, Result};

pub const BUILTIN_WIDTH: usize = 450;
pub const BUILTIN_HEIGHT: usize = 350;

const WALL: usize = 6;

/// A builtin environment together with its benchmark query.
#[derive(Debug, Clone)]
pub struct BuiltinMap {
    pub name: &'static str,
    pub grid: OccupancyGrid,
    pub start: Point,
    pub goal: Point,
}

impl BuiltinMap {
    pub const NAMES: [&'static str; 3] = ["room", "clutter", "maze"];
}

pub fn builtin_map(name: &str) -> Result<BuiltinMap> {
    match name {
        "room" => Ok(room()),
        "clutter" => Ok(clutter()),
        "maze" => Ok(maze()),
        other => Err(Error::UnknownMap(other.to_string())),
    }
}

fn bordered() -> OccupancyGrid {
    let (w, h) = (BUILTIN_WIDTH, BUILTIN_HEIGHT);
    let mut g = OccupancyGrid::empty(w, h).expect("nonzero size");
    g.fill_rect(0, 0, w, WALL);
    g.fill_rect(0, h - WALL, w, h);
    g.fill_rect(0, 0, WALL, h);
    g.fill_rect(w - WALL, 0, w, h);
    g
}

/// Vertical wall at column `col` spanning `rows`, leaving `doors` open.
fn vwall(g: &mut OccupancyGrid, col: usize, rows: (usize, usize), doors: &[(usize, usize)]) {
    for row in rows.0..rows.1 {
        if doors.iter().any(|&(a, b)| row >= a && row < b) {
            continue;
        }
        g.fill_rect(col, row, col + WALL, row + 1);
    }
}

fn hwall(g: &mut OccupancyGrid, row: usize, cols: (usize, usize), doors: &[(usize, usize)]) {
    for col in cols.0..cols.1 {
        if doors.iter().any(|&(a, b)| col >= a && col < b) {
            continue;
        }
        g.fill_rect(col, row, col + 1, row + WALL);
    }
}

/// Six rooms in a 3 x 2 arrangement joined by door gaps. The only route from
/// the top-left room to the bottom-right one winds through the middle.
fn room() -> BuiltinMap {
    let mut g = bordered();
    let (w, h) = (BUILTIN_WIDTH, BUILTIN_HEIGHT);
    // Horizontal divider with one door per column of rooms.
    hwall(&mut g, 172, (0, w), &[(60, 110), (200, 250), (380, 430)]);
    // Left divider: door only in the bottom row of rooms.
    vwall(&mut g, 147, (0, h), &[(250, 300)]);
    // Right divider: door only in the top row of rooms.
    vwall(&mut g, 297, (0, h), &[(40, 90)]);
    // Baffle in the top-right room; the route to its lower door bends around
    // the baffle's left end.
    hwall(&mut g, 120, (365, w), &[]);
    BuiltinMap {
        name: "room",
        grid: g,
        start: Point::new(40.0, 40.0),
        goal: Point::new(410.0, 300.0),
    }
}

const CLUTTER_SEED: u64 = 1;
const CLUTTER_BLOCKS: usize = 70;
/// Block side lengths are drawn from this half-open range (px).
const CLUTTER_SIDE: (usize, usize) = (18, 46);
/// Narrowest passage the start-to-goal connectivity check must get through.
const CLUTTER_CLEARANCE: f64 = 12.0;

/// Axis-aligned blocks scattered with a fixed generator. Placements that
/// would touch the start or goal neighborhoods are redrawn, and the whole
/// layout is redrawn unless a passage of `CLUTTER_CLEARANCE` joins start
/// and goal.
fn clutter() -> BuiltinMap {
    let start = Point::new(30.0, 30.0);
    let goal = Point::new(420.0, 320.0);
    let (n, (lo, hi)) = (CLUTTER_BLOCKS, CLUTTER_SIDE);
    let mut rng = ChaCha8Rng::seed_from_u64(CLUTTER_SEED);
    loop {
        let mut g = bordered();
        let mut placed = 0;
        while placed < n {
            let bw = rng.random_range(lo..hi);
            let bh = rng.random_range(lo..hi);
            let c0 = rng.random_range(WALL..BUILTIN_WIDTH - WALL - bw);
            let r0 = rng.random_range(WALL..BUILTIN_HEIGHT - WALL - bh);
            let clear = |p: Point| {
                let (ch, cv) = (
                    (p.h).clamp(c0 as f64, (c0 + bw) as f64),
                    (p.v).clamp(r0 as f64, (r0 + bh) as f64),
                );
                Point::new(ch, cv).distance(p) > 35.0
            };
            if !clear(start) || !clear(goal) {
                continue;
            }
            g.fill_rect(c0, r0, c0 + bw, r0 + bh);
            placed += 1;
        }
        if g.inflate(CLUTTER_CLEARANCE / 2.0).cells_connected(start, goal) {
            return BuiltinMap {
                name: "clutter",
                grid: g,
                start,
                goal,
            };
        }
    }
}

const MAZE_SEED: u64 = 0x3a2e_0001;
const MAZE_CELL: usize = 50;
const MAZE_COLS: usize = BUILTIN_WIDTH / MAZE_CELL;
const MAZE_ROWS: usize = BUILTIN_HEIGHT / MAZE_CELL;
/// Extra wall segments knocked out after carving, creating a few loops.
const MAZE_LOOPS: usize = 6;

/// Depth-first carved corridor maze on a 9 x 7 lattice of 50 px cells.
fn maze() -> BuiltinMap {
    let mut rng = ChaCha8Rng::seed_from_u64(MAZE_SEED);
    // open_e[r][c]: passage between (c, r) and (c + 1, r); open_s likewise downward.
    let mut open_e = [[false; MAZE_COLS]; MAZE_ROWS];
    let mut open_s = [[false; MAZE_COLS]; MAZE_ROWS];
    let mut seen = [[false; MAZE_COLS]; MAZE_ROWS];
    let mut stack = vec![(0usize, 0usize)];
    seen[0][0] = true;
    while let Some(&(c, r)) = stack.last() {
        let mut next = Vec::with_capacity(4);
        if c + 1 < MAZE_COLS && !seen[r][c + 1] {
            next.push((c + 1, r));
        }
        if c > 0 && !seen[r][c - 1] {
            next.push((c - 1, r));
        }
        if r + 1 < MAZE_ROWS && !seen[r + 1][c] {
            next.push((c, r + 1));
        }
        if r > 0 && !seen[r - 1][c] {
            next.push((c, r - 1));
        }
        if next.is_empty() {
            stack.pop();
            continue;
        }
        let (nc, nr) = next[rng.random_range(0..next.len())];
        match (nc as i64 - c as i64, nr as i64 - r as i64) {
            (1, 0) => open_e[r][c] = true,
            (-1, 0) => open_e[r][nc] = true,
            (0, 1) => open_s[r][c] = true,
            _ => open_s[nr][c] = true,
        }
        seen[nr][nc] = true;
        stack.push((nc, nr));
    }
    let mut knocked = 0;
    while knocked < MAZE_LOOPS {
        let c = rng.random_range(0..MAZE_COLS - 1);
        let r = rng.random_range(0..MAZE_ROWS - 1);
        let slot = if rng.random_bool(0.5) {
            &mut open_e[r][c]
        } else {
            &mut open_s[r][c]
        };
        if !*slot {
            *slot = true;
            knocked += 1;
        }
    }

    let mut g = bordered();
    let half = WALL / 2;
    for r in 0..MAZE_ROWS {
        for c in 0..MAZE_COLS {
            let (x0, y0) = (c * MAZE_CELL, r * MAZE_CELL);
            if c + 1 < MAZE_COLS && !open_e[r][c] {
                let x = x0 + MAZE_CELL - half;
                g.fill_rect(x, y0.saturating_sub(half), x + WALL, y0 + MAZE_CELL + half);
            }
            if r + 1 < MAZE_ROWS && !open_s[r][c] {
                let y = y0 + MAZE_CELL - half;
                g.fill_rect(x0.saturating_sub(half), y, x0 + MAZE_CELL + half, y + WALL);
            }
        }
    }
    let center = |c: usize, r: usize| {
        Point::new(
            (c * MAZE_CELL + MAZE_CELL / 2) as f64,
            (r * MAZE_CELL + MAZE_CELL / 2) as f64,
        )
    };
    BuiltinMap {
        name: "maze",
        grid: g,
        start: center(0, 0),
        goal: center(MAZE_COLS - 1, MAZE_ROWS - 1),
    }
}
