//! Kinodynamic sampling-based motion planning on occupancy grids.
//!
//! Three planners share one unicycle motion model and one extension step:
//! plain RRT, a bidirectional baseline whose goal tree turns into a sampling
//! bias on contact, and a multi-tree planner whose short-lived heuristic trees
//! steer the start tree through Gaussian-mixture sampling. The [`bench`]
//! module runs paired-seed comparisons and exports records, statistics and
//! SVG renders.

pub mod bench;
pub mod cli;
pub mod error;
pub mod forest;
pub mod heuristics;
pub mod kinodynamics;
pub mod planners;
pub mod workspace;

pub use error::{Error, Result};
