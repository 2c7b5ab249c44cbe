//! Occupancy-grid worlds.
//!
//! A world is a rectangular raster of square one-pixel cells. Continuous
//! points map to the cell `(floor(h), floor(v))`; anything outside
//! `[0, width) x [0, height)` counts as obstacle, so planners never need an
//! explicit bounds check.

mod builtin;
mod io;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{builtin_map, BuiltinMap, BUILTIN_HEIGHT, BUILTIN_WIDTH};
pub use io::{load_map, parse_map, write_text_map};

/// A continuous position in pixel coordinates. `h` grows to the right, `v`
/// grows downward (raster order).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub h: f64,
    pub v: f64,
}

impl Point {
    pub const fn new(h: f64, v: f64) -> Self {
        Point { h, v }
    }

    pub fn distance_squared(self, other: Point) -> f64 {
        let dh = self.h - other.h;
        let dv = self.v - other.v;
        dh * dh + dv * dv
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_squared(other).sqrt()
    }
}

/// Row-major boolean raster; `true` marks an obstacle cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    /// An obstacle-free grid.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::from_cells(width, height, vec![false; width * height])
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Config(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if cells.len() != width * height {
            return Err(Error::Config(format!(
                "grid of {width}x{height} needs {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(OccupancyGrid { width, height, cells })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Occupancy of cell `(col, row)`; out-of-range cells read as occupied.
    pub fn is_occupied(&self, col: i64, row: i64) -> bool {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            return true;
        }
        self.cells[row as usize * self.width + col as usize]
    }

    pub fn set_occupied(&mut self, col: usize, row: usize, occupied: bool) {
        assert!(col < self.width && row < self.height, "cell out of range");
        self.cells[row * self.width + col] = occupied;
    }

    /// Marks the half-open cell rectangle `[col0, col1) x [row0, row1)`,
    /// clipped to the grid.
    pub fn fill_rect(&mut self, col0: usize, row0: usize, col1: usize, row1: usize) {
        for row in row0.min(self.height)..row1.min(self.height) {
            for col in col0.min(self.width)..col1.min(self.width) {
                self.cells[row * self.width + col] = true;
            }
        }
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.h >= 0.0 && p.v >= 0.0 && p.h < self.width as f64 && p.v < self.height as f64
    }

    /// True iff `p` is inside the grid and its cell is unoccupied.
    pub fn is_free(&self, p: Point) -> bool {
        self.in_bounds(p) && !self.is_occupied(p.h.floor() as i64, p.v.floor() as i64)
    }

    /// True iff every point of the closed segment `a -> b` lies in free space.
    ///
    /// Walks the exact set of cells the segment passes through, column by
    /// column, so thin obstacle corners cannot be skipped.
    pub fn segment_collision_free(&self, a: Point, b: Point) -> bool {
        // The free box is convex, so both endpoints in-bounds implies the
        // whole segment is.
        if !self.is_free(a) || !self.is_free(b) {
            return false;
        }
        let (left, right) = if a.h <= b.h { (a, b) } else { (b, a) };
        let col_start = left.h.floor() as i64;
        let col_end = right.h.floor() as i64;
        if col_start == col_end {
            let (r0, r1) = ordered(left.v.floor() as i64, right.v.floor() as i64);
            return (r0..=r1).all(|row| !self.is_occupied(col_start, row));
        }
        let slope = (right.v - left.v) / (right.h - left.h);
        for col in col_start..=col_end {
            let h_lo = (col as f64).max(left.h);
            let h_hi = ((col + 1) as f64).min(right.h);
            let v_lo = if col == col_start {
                left.v
            } else {
                left.v + slope * (h_lo - left.h)
            };
            let v_hi = if col == col_end {
                right.v
            } else {
                left.v + slope * (h_hi - left.h)
            };
            let (r0, r1) = ordered(v_lo.floor() as i64, v_hi.floor() as i64);
            if (r0..=r1).any(|row| self.is_occupied(col, row)) {
                return false;
            }
        }
        true
    }

    pub fn free_cell_count(&self) -> usize {
        self.cells.iter().filter(|&&c| !c).count()
    }

    /// Copy of the grid with every obstacle grown by `radius` pixels
    /// (Euclidean disk dilation). A radius of zero returns an identical grid.
    pub fn inflate(&self, radius: f64) -> OccupancyGrid {
        if radius <= 0.0 {
            return self.clone();
        }
        let reach = radius.ceil() as i64;
        let r2 = radius * radius;
        let offsets: Vec<(i64, i64)> = (-reach..=reach)
            .flat_map(|dr| (-reach..=reach).map(move |dc| (dc, dr)))
            .filter(|&(dc, dr)| ((dc * dc + dr * dr) as f64) <= r2)
            .collect();
        let mut out = self.clone();
        for row in 0..self.height as i64 {
            for col in 0..self.width as i64 {
                if !self.is_occupied(col, row) {
                    continue;
                }
                for &(dc, dr) in &offsets {
                    let (c, r) = (col + dc, row + dr);
                    if c >= 0 && r >= 0 && (c as usize) < self.width && (r as usize) < self.height {
                        out.cells[r as usize * self.width + c as usize] = true;
                    }
                }
            }
        }
        out
    }

    /// 4-connected breadth-first search over free cells.
    pub fn cells_connected(&self, from: Point, to: Point) -> bool {
        if !self.is_free(from) || !self.is_free(to) {
            return false;
        }
        let idx = |p: Point| p.v.floor() as usize * self.width + p.h.floor() as usize;
        let (src, dst) = (idx(from), idx(to));
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::from([src]);
        seen[src] = true;
        while let Some(cur) = queue.pop_front() {
            if cur == dst {
                return true;
            }
            let (col, row) = ((cur % self.width) as i64, (cur / self.width) as i64);
            for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (c, r) = (col + dc, row + dr);
                if self.is_occupied(c, r) {
                    continue;
                }
                let next = r as usize * self.width + c as usize;
                if !seen[next] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        false
    }
}

fn ordered(a: i64, b: i64) -> (i64, i64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
