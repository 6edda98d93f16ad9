//! Radial graphs `z = u(r)` meeting the axis orthogonally.
//!
//! Near the axis the profile is a graph over `[0, δ]`. Writing
//! `f(y) = y/√(1+y²)` and `g(y) = φ(1/√(1+y²))/a`, the curvature relation
//! integrates once to
//!
//! ```text
//! r·F + (b/2a)·F² = G(r),   F = f(u'),   G(r) = ∫₀^r t·g(u'(t)) dt,
//! ```
//!
//! whose root vanishing at the axis is `F = 2G/(r + √(r² + 2(b/a)G))`.
//! Iterating `u' ← f⁻¹(F[u'])` from `u ≡ 0` converges for small `δ`.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::ProfileSample;
use crate::integrate::{
    integrate, Direction, EndpointKind, IntegrateError, IntegratorOptions, Orbit, StartPoint,
};
use crate::phase::PhasePoint;
use crate::phi::{validation_grid, PrescribedFunction};
use crate::Params;

pub const DEFAULT_NODES: usize = 512;
pub const PICARD_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
/// Number of times the default extent is halved before giving up.
pub const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadialError {
    #[error("the operator leaves its domain at r = {r} (δ too large)")]
    DomainExit { r: f64 },
    #[error("no convergence after {iterations} iterations (last contraction ratio {ratio})")]
    NoConvergence { iterations: usize, ratio: f64 },
    #[error("radial extent must be positive and finite (got {delta})")]
    InvalidExtent { delta: f64 },
    #[error("radial graphs need elliptic data with a > 0 and positive φ")]
    NotApplicable,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Graph bending upwards; the orbit leaves `(0, 0)`.
    Up,
    /// The reflected graph; the orbit arrives at `(0, π)`.
    Down,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialSolution {
    pub delta: f64,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub uprime: Vec<f64>,
    pub orientation: Orientation,
    pub iterations: usize,
    /// Ratios of successive sup-norm increments.
    pub contraction: Vec<f64>,
}

fn f_inv(w: f64) -> f64 {
    w / (1.0 - w * w).sqrt()
}

fn cumulative_trapezoid(h: f64, values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Slopes of `T u` given the slopes of `u` on a uniform grid of step `h`.
fn operator_slopes(
    grid: &[f64],
    h: f64,
    uprime: &[f64],
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<Vec<f64>, RadialError> {
    let integrand: Vec<f64> = grid
        .iter()
        .zip(uprime)
        .map(|(&t, &y)| t * phi.value(1.0 / (1.0 + y * y).sqrt()) / p.a)
        .collect();
    let big_g = cumulative_trapezoid(h, &integrand);
    let ratio = p.b / p.a;
    grid.iter()
        .zip(&big_g)
        .map(|(&r, &g)| {
            if r == 0.0 {
                return Ok(0.0);
            }
            let arg = r * r + 2.0 * ratio * g;
            if arg < 0.0 {
                return Err(RadialError::DomainExit { r });
            }
            let den = r + arg.sqrt();
            let w = 2.0 * g / den;
            if !(w.abs() < 1.0) || den <= 0.0 {
                return Err(RadialError::DomainExit { r });
            }
            Ok(f_inv(w))
        })
        .collect()
}

fn uniform_grid(delta: f64, n: usize) -> (Vec<f64>, f64) {
    let h = delta / n as f64;
    ((0..=n).map(|i| i as f64 * h).collect(), h)
}

/// One application of the operator to `sol`, with heights of the same
/// orientation.
pub fn apply_t(
    sol: &RadialSolution,
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<RadialSolution, RadialError> {
    let sign = orientation_sign(sol.orientation);
    let h = sol.delta / (sol.grid.len() - 1) as f64;
    let up: Vec<f64> = sol.uprime.iter().map(|v| sign * v).collect();
    let next = operator_slopes(&sol.grid, h, &up, p, phi)?;
    let u = cumulative_trapezoid(h, &next);
    Ok(RadialSolution {
        u: u.iter().map(|v| sign * v).collect(),
        uprime: next.iter().map(|v| sign * v).collect(),
        iterations: sol.iterations + 1,
        ..sol.clone()
    })
}

fn orientation_sign(o: Orientation) -> f64 {
    match o {
        Orientation::Up => 1.0,
        Orientation::Down => -1.0,
    }
}

fn check_applicable(p: &Params, phi: &PrescribedFunction) -> Result<(), RadialError> {
    let elliptic = validation_grid().all(|y| p.a * p.a + p.b * phi.value(y) > 0.0);
    if !(elliptic && p.a > 0.0 && phi.value(0.0) > 0.0) {
        return Err(RadialError::NotApplicable);
    }
    Ok(())
}

/// The zero function on `n + 1` nodes of `[0, δ]`.
pub fn zero_solution(delta: f64, n: usize, orientation: Orientation) -> RadialSolution {
    let (grid, _) = uniform_grid(delta, n);
    RadialSolution {
        delta,
        u: vec![0.0; n + 1],
        uprime: vec![0.0; n + 1],
        grid,
        orientation,
        iterations: 0,
        contraction: Vec::new(),
    }
}

/// Picard iteration from `u ≡ 0` on the default grid.
pub fn solve_radial(
    p: &Params,
    phi: &PrescribedFunction,
    delta: f64,
    orientation: Orientation,
) -> Result<RadialSolution, RadialError> {
    solve_radial_on(p, phi, delta, DEFAULT_NODES, orientation)
}

pub fn solve_radial_on(
    p: &Params,
    phi: &PrescribedFunction,
    delta: f64,
    n: usize,
    orientation: Orientation,
) -> Result<RadialSolution, RadialError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(RadialError::InvalidExtent { delta });
    }
    check_applicable(p, phi)?;
    let (grid, h) = uniform_grid(delta, n);
    let mut slopes = vec![0.0; n + 1];
    let mut heights = vec![0.0; n + 1];
    let mut contraction = Vec::new();
    let mut last_change = f64::NAN;
    for it in 1..=MAX_ITERATIONS {
        let next = operator_slopes(&grid, h, &slopes, p, phi)?;
        let u = cumulative_trapezoid(h, &next);
        let change = u
            .iter()
            .zip(&heights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if last_change.is_finite() && last_change > 0.0 {
            contraction.push(change / last_change);
        }
        last_change = change;
        slopes = next;
        heights = u;
        if change < PICARD_TOL {
            let sign = orientation_sign(orientation);
            return Ok(RadialSolution {
                delta,
                grid,
                u: heights.iter().map(|v| sign * v).collect(),
                uprime: slopes.iter().map(|v| sign * v).collect(),
                orientation,
                iterations: it,
                contraction,
            });
        }
    }
    Err(RadialError::NoConvergence {
        iterations: MAX_ITERATIONS,
        ratio: contraction.last().copied().unwrap_or(f64::NAN),
    })
}

/// `0.1·min(1, |b/a|, a/max φ)`.
pub fn default_delta(p: &Params, phi: &PrescribedFunction) -> f64 {
    let max_phi = validation_grid()
        .map(|y| phi.value(y).abs())
        .fold(0.0, f64::max);
    0.1 * 1f64.min((p.b / p.a).abs()).min(p.a.abs() / max_phi)
}

/// Solves on the default extent, halving it on failure.
pub fn solve_radial_auto(
    p: &Params,
    phi: &PrescribedFunction,
    orientation: Orientation,
) -> Result<RadialSolution, RadialError> {
    let mut delta = default_delta(p, phi);
    let mut last = None;
    for _ in 0..=MAX_HALVINGS {
        match solve_radial(p, phi, delta, orientation) {
            Ok(sol) => return Ok(sol),
            Err(e @ (RadialError::DomainExit { .. } | RadialError::NoConvergence { .. })) => {
                last = Some(e);
                delta *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(RadialError::InvalidExtent { delta }))
}

impl RadialSolution {
    /// Tangent angle of the profile traversed away from the axis for `Up`
    /// and towards it for `Down`.
    pub fn angles(&self) -> Vec<f64> {
        self.uprime
            .iter()
            .map(|&y| match self.orientation {
                Orientation::Up => y.atan(),
                Orientation::Down => PI + y.atan(),
            })
            .collect()
    }

    /// `κ₁ = (dθ/dr)·cos θ`, with `dθ/dr` from finite differences.
    pub fn kappa1(&self) -> Vec<f64> {
        let theta = self.angles();
        let n = theta.len();
        let h = self.delta / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let d = if i == 0 {
                    (-3.0 * theta[0] + 4.0 * theta[1] - theta[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (3.0 * theta[i] - 4.0 * theta[i - 1] + theta[i - 2]) / (2.0 * h)
                } else {
                    (theta[i + 1] - theta[i - 1]) / (2.0 * h)
                };
                d * theta[i].cos()
            })
            .collect()
    }

    /// Weingarten residual at every node (NaN at the axis node).
    pub fn residuals(&self, p: &Params, phi: &PrescribedFunction) -> Vec<f64> {
        self.profile(p, phi).iter().map(|s| s.residual).collect()
    }

    /// Profile samples of the graph with arc length measured from the axis.
    pub fn profile(&self, p: &Params, phi: &PrescribedFunction) -> Vec<ProfileSample> {
        let theta = self.angles();
        let k1 = self.kappa1();
        let h = self.delta / (self.grid.len() - 1) as f64;
        let speed: Vec<f64> = self.uprime.iter().map(|y| (1.0 + y * y).sqrt()).collect();
        let arc = cumulative_trapezoid(h, &speed);
        self.grid
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if r == 0.0 {
                    let mut s =
                        ProfileSample::on_axis(0.0, self.u[0], theta[0], k1[0], true, p, phi);
                    s.residual = f64::NAN;
                    s
                } else {
                    ProfileSample::interior(arc[i], r, self.u[i], theta[i], k1[i], p, phi)
                }
            })
            .collect()
    }

    /// Phase point at `r = δ` and the direction continuing away from the axis.
    pub fn seed_orbit(&self) -> (PhasePoint, Direction) {
        let theta = *self.angles().last().expect("non-empty grid");
        let pt = PhasePoint {
            x: self.delta,
            theta,
        };
        match self.orientation {
            Orientation::Up => (pt, Direction::Forward),
            Orientation::Down => (pt, Direction::Backward),
        }
    }

    /// Continues the graph with the integrator and returns the whole orbit,
    /// starting or ending at the axis.
    pub fn continue_orbit(
        &self,
        p: &Params,
        phi: &PrescribedFunction,
        opts: &IntegratorOptions,
    ) -> Result<Orbit, RadialError> {
        let (seed, dir) = self.seed_orbit();
        let seed = PhasePoint::new(seed.x, seed.theta, p).map_err(|e| {
            RadialError::Integrate(IntegrateError::InvalidStart {
                reason: e.to_string(),
            })
        })?;
        let mut orbit = integrate(StartPoint::Phase(seed), dir, p, phi, opts)?;
        let graph = self.profile(p, phi);
        let total = graph.last().expect("non-empty grid").s;
        let z_seed = *self.u.last().expect("non-empty grid");
        let axis_theta = match self.orientation {
            Orientation::Up => 0.0,
            Orientation::Down => PI,
        };
        // Shift the graph so that the seed sits at s = 0, z = 0.
        let shift = |mut s: ProfileSample, sign: f64| {
            s.s = sign * (total - s.s);
            s.z -= z_seed;
            s
        };
        match self.orientation {
            Orientation::Up => {
                let mut samples: Vec<ProfileSample> =
                    graph.into_iter().map(|s| shift(s, -1.0)).collect();
                samples.pop();
                samples.extend(orbit.samples);
                orbit.samples = samples;
                orbit.start_end = EndpointKind::AxisOrthogonal { theta: axis_theta };
            }
            Orientation::Down => {
                let mut tail: Vec<ProfileSample> =
                    graph.into_iter().rev().map(|s| shift(s, 1.0)).collect();
                tail.remove(0);
                orbit.samples.extend(tail);
                orbit.finish_end = EndpointKind::AxisOrthogonal { theta: axis_theta };
            }
        }
        orbit.notes.push(format!(
            "radial graph on [0, {}] joined at the axis",
            self.delta
        ));
        Ok(orbit)
    }
}
