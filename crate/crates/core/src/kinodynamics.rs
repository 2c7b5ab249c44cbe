//! Unicycle motion model, admissible control windows, the distance + heading
//! cost, and the candidate-enumerating kinodynamic `extend` step.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::Tree;
use crate::planners::PlanCounters;
use crate::workspace::{OccupancyGrid, Point};

/// Robot configuration: position, heading and the velocities that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub pos: Point,
    /// Heading in radians, kept in `[-pi, pi)`.
    pub theta: f64,
    /// Linear velocity, pixels per step.
    pub v: f64,
    /// Angular velocity, radians per step.
    pub omega: f64,
}

impl State {
    pub fn at_rest(pos: Point, theta: f64) -> Self {
        State {
            pos,
            theta: wrap_angle(theta),
            v: 0.0,
            omega: 0.0,
        }
    }

    /// The control that, applied to the parent, produced this state.
    pub fn control(&self) -> ControlInput {
        ControlInput {
            v: self.v,
            omega: self.omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub v: f64,
    pub omega: f64,
}

/// Acceleration limits, control discretization and cost weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinodynamicParams {
    /// Linear acceleration bound (px / step^2).
    pub alpha_v: f64,
    /// Angular acceleration bound (rad / step^2).
    pub alpha_omega: f64,
    pub dt: f64,
    /// Number of intervals the linear-velocity window is split into.
    pub n_v: usize,
    /// Number of intervals the angular-velocity window is split into.
    pub n_omega: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub omega_max: f64,
    /// Weight of the normalized distance term.
    pub w1: f64,
    /// Weight of the heading-deviation term.
    pub w2: f64,
}

impl Default for KinodynamicParams {
    fn default() -> Self {
        KinodynamicParams {
            alpha_v: 2.0,
            alpha_omega: PI / 4.0,
            dt: 1.0,
            n_v: 3,
            n_omega: 4,
            v_min: 0.0,
            v_max: 8.0,
            omega_max: PI / 3.0,
            w1: 1.0,
            w2: 0.3,
        }
    }
}

impl KinodynamicParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_v < 1 || self.n_omega < 1 {
            return fail("n_v and n_omega must be at least 1");
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return fail("dt must be positive");
        }
        if [self.w1, self.w2].iter().any(|w| w.is_nan() || *w < 0.0) {
            return fail("cost weights must be non-negative");
        }
        if [self.alpha_v, self.alpha_omega].iter().any(|a| a.is_nan() || *a < 0.0) {
            return fail("acceleration bounds must be non-negative");
        }
        if self.v_min.partial_cmp(&self.v_max).is_none_or(|o| o.is_gt())
            || self.omega_max.is_nan()
            || self.omega_max < 0.0
        {
            return fail("velocity bounds are inverted");
        }
        Ok(())
    }

    /// Candidates enumerated per extension.
    pub fn candidate_count(&self) -> usize {
        (self.n_v + 1) * (self.n_omega + 1)
    }
}

/// Wraps an angle into `[-pi, pi)`. Angles already in range are returned
/// untouched, which makes the function idempotent bit-for-bit.
pub fn wrap_angle(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let two_pi = 2.0 * PI;
    let mut r = theta - two_pi * ((theta + PI) / two_pi).floor();
    if r >= PI {
        r -= two_pi;
    }
    if r < -PI {
        r += two_pi;
    }
    r
}

/// Velocities reachable within one time step from `current`, clamped to the
/// global `[lo, hi]` limits.
pub fn velocity_window(current: f64, alpha: f64, dt: f64, lo: f64, hi: f64) -> (f64, f64) {
    let min = (current - alpha * dt).clamp(lo, hi);
    let max = (current + alpha * dt).clamp(lo, hi);
    (min, max)
}

/// Spacing of `n + 1` evenly spaced values covering `[min, max]`.
pub fn discretize(min: f64, max: f64, n: usize) -> f64 {
    (max - min) / n as f64
}

/// The `n + 1` candidate values `min + i * step`.
pub fn candidate_values(min: f64, max: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = discretize(min, max, n);
    (0..=n).map(move |i| min + i as f64 * step)
}

/// One Euler step of the unicycle: turn first, then translate along the new
/// heading.
pub fn propagate(x: &State, u: ControlInput, dt: f64) -> State {
    let theta = wrap_angle(x.theta + u.omega * dt);
    let step = u.v * dt;
    State {
        pos: Point::new(x.pos.h + step * theta.cos(), x.pos.v + step * theta.sin()),
        theta,
        v: u.v,
        omega: u.omega,
    }
}

/// Start/goal pair that normalizes the distance term of the cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostFrame {
    pub start: Point,
    pub goal: Point,
    span: f64,
}

impl CostFrame {
    pub fn new(start: Point, goal: Point) -> Result<Self> {
        let span = start.distance(goal);
        if span == 0.0 {
            return Err(Error::Degenerate("start and goal coincide"));
        }
        Ok(CostFrame { start, goal, span })
    }

    pub fn span(&self) -> f64 {
        self.span
    }
}

/// Weighted sum of the normalized remaining distance and the absolute
/// deviation between the candidate heading and the bearing toward `target`.
///
/// Errors when the candidate sits exactly on `target` (the bearing is
/// undefined there).
pub fn cost(x_new: &State, target: Point, frame: &CostFrame, params: &KinodynamicParams) -> Result<f64> {
    if x_new.pos == target {
        return Err(Error::Degenerate("candidate coincides with the sample"));
    }
    Ok(cost_unchecked(x_new, target, frame, params))
}

fn cost_unchecked(x_new: &State, target: Point, frame: &CostFrame, params: &KinodynamicParams) -> f64 {
    let d = x_new.pos.distance(target) / frame.span;
    if x_new.pos == target {
        return params.w1 * d;
    }
    let bearing = (target.v - x_new.pos.v).atan2(target.h - x_new.pos.h);
    let deviation = wrap_angle(bearing - x_new.theta);
    params.w1 * d + params.w2 * deviation.abs()
}

/// Control candidates for a node, enumerated linear-velocity-major.
pub fn control_candidates(from: &State, params: &KinodynamicParams) -> Vec<ControlInput> {
    let (v_lo, v_hi) = velocity_window(from.v, params.alpha_v, params.dt, params.v_min, params.v_max);
    let (w_lo, w_hi) = velocity_window(
        from.omega,
        params.alpha_omega,
        params.dt,
        -params.omega_max,
        params.omega_max,
    );
    let omegas: Vec<f64> = candidate_values(w_lo, w_hi, params.n_omega).collect();
    candidate_values(v_lo, v_hi, params.n_v)
        .flat_map(|v| omegas.iter().map(move |&omega| ControlInput { v, omega }))
        .collect()
}

/// Grows `tree` one kinodynamic step toward `target`.
///
/// Every admissible control is propagated from the nearest node, candidates
/// are ranked by [`cost`] (stable, so ties keep enumeration order), and the
/// cheapest one whose connecting segment is collision-free is inserted. Each
/// candidate rejected by the collision check counts as an invalid
/// connection. Returns the index of the inserted node, or `None` when every
/// candidate collides.
pub fn extend(
    tree: &mut Tree,
    target: Point,
    grid: &OccupancyGrid,
    params: &KinodynamicParams,
    frame: &CostFrame,
    counters: &mut PlanCounters,
) -> Option<usize> {
    let near_idx = tree.nearest_neighbor(target);
    let near = *tree.state(near_idx);
    let mut ranked: Vec<(f64, State)> = control_candidates(&near, params)
        .into_iter()
        .map(|u| {
            let cand = propagate(&near, u, params.dt);
            (cost_unchecked(&cand, target, frame, params), cand)
        })
        .collect();
    counters.candidates_evaluated += ranked.len() as u64;
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, cand) in ranked {
        if grid.segment_collision_free(near.pos, cand.pos) {
            counters.extensions += 1;
            let idx = tree
                .add_node(cand, near_idx)
                .expect("nearest neighbor is a valid parent");
            return Some(idx);
        }
        counters.invalid_connections += 1;
    }
    None
}
