//! Static geometry of the phase plane `Θ = (0, ∞) × (0, 2π) − S`.
//!
//! Angles are carried on the covering line `ℝ`; reduction modulo `2π` only
//! happens for region queries.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{theta_prime_parts, ProfileSample};
use crate::integrate::{EndpointKind, Orbit};
use crate::phi::{validation_grid, PrescribedFunction};
use crate::Params;

/// Absolute tolerance in `x` for region boundaries.
pub const REGION_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PhaseError {
    #[error("phase point requires x > 0 (got {x})")]
    NonPositiveRadius { x: f64 },
    #[error("point ({x}, {theta}) lies on the singular curve")]
    OnSingularCurve { x: f64, theta: f64 },
    #[error("point ({x}, {theta}) lies on a region boundary")]
    OnBoundary { x: f64, theta: f64 },
    #[error("orbit spans both halves of the phase plane")]
    SpansBothHalves,
    #[error("linearization needs a² + bφ(0) > 0 (got {discriminant})")]
    NotApplicable { discriminant: f64 },
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A point of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    /// Angle on the covering line.
    pub theta: f64,
}

impl PhasePoint {
    /// Validates `x > 0` and that the point is off the singular curve.
    pub fn new(x: f64, theta: f64, p: &Params) -> Result<Self, PhaseError> {
        if !(x > 0.0) || !x.is_finite() || !theta.is_finite() {
            return Err(PhaseError::NonPositiveRadius { x });
        }
        if p.denominator(x, theta).abs() <= p.singular_guard(x) {
            return Err(PhaseError::OnSingularCurve { x, theta });
        }
        Ok(PhasePoint { x, theta })
    }

    /// Representative in `[0, 2π)`.
    pub fn reduced_theta(&self) -> f64 {
        reduce_angle(self.theta)
    }

    /// Number of whole turns separating `theta` from its representative.
    pub fn winding(&self) -> i64 {
        (self.theta / TAU).floor() as i64
    }
}

/// `S(θ) = −b sin θ / a` where positive.
pub fn singular_curve(theta: f64, p: &Params) -> Option<f64> {
    let v = -p.b * theta.sin() / p.a;
    (v > 0.0).then_some(v)
}

/// `Γ(θ) = a sin θ / φ(cos θ)` where positive.
pub fn nullcline(theta: f64, p: &Params, phi: &PrescribedFunction) -> Option<f64> {
    let v = p.a * theta.sin() / phi.value(theta.cos());
    (v > 0.0 && v.is_finite()).then_some(v)
}

/// The constant orbit generating the vertical cylinder of radius `|a/φ(0)|`.
pub fn equilibrium(p: &Params, phi: &PrescribedFunction) -> Option<PhasePoint> {
    let phi0 = phi.value(0.0);
    if phi0 == 0.0 || !phi0.is_finite() {
        return None;
    }
    let x = (p.a / phi0).abs();
    let theta = if p.a * phi0 > 0.0 {
        FRAC_PI_2
    } else {
        3.0 * FRAC_PI_2
    };
    Some(PhasePoint { x, theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CharacterKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Mixed,
}

/// Sign of the discriminant `a² + bφ(y)` over the validation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeCharacter {
    pub kind: CharacterKind,
    /// `y` achieving the extremum relevant to the verdict.
    pub witness: f64,
    pub min: f64,
    pub max: f64,
}

pub fn pde_character(p: &Params, phi: &PrescribedFunction) -> PdeCharacter {
    let a2 = p.a * p.a;
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for y in validation_grid() {
        let d = a2 + p.b * phi.value(y);
        if d < lo.0 {
            lo = (d, y);
        }
        if d > hi.0 {
            hi = (d, y);
        }
    }
    let (kind, witness) = if lo.0 > 0.0 {
        (CharacterKind::Elliptic, lo.1)
    } else if hi.0 < 0.0 {
        (CharacterKind::Hyperbolic, hi.1)
    } else if lo.0 == 0.0 && hi.0 == 0.0 {
        (CharacterKind::Parabolic, lo.1)
    } else {
        (CharacterKind::Mixed, lo.1)
    };
    PdeCharacter {
        kind,
        witness,
        min: lo.0,
        max: hi.0,
    }
}

/// Mirror of an orbit about `θ = π/2` (in `Θ₁`) or `θ = 3π/2` (in `Θ₂`),
/// traversed with reversed arc length. A solution again whenever `φ` is even.
pub fn reflect(orbit: &Orbit) -> Result<Orbit, PhaseError> {
    let interior: Vec<&ProfileSample> = orbit.samples.iter().filter(|s| s.x > 0.0).collect();
    let probe = interior.first().copied().or(orbit.samples.first());
    let Some(probe) = probe else {
        return Ok(orbit.clone());
    };
    let k = (probe.theta / PI).floor();
    if interior.iter().any(|s| (s.theta / PI).floor() != k) {
        return Err(PhaseError::SpansBothHalves);
    }
    let axis = (2.0 * k + 1.0) * PI;
    let mirror = |theta: f64| axis - theta;

    let samples = orbit
        .samples
        .iter()
        .rev()
        .map(|s| ProfileSample {
            s: -s.s,
            z: -s.z,
            theta: mirror(s.theta),
            angle_fn: mirror(s.theta).cos(),
            ..*s
        })
        .collect();
    let map_end = |e: &EndpointKind| e.mirrored(axis);
    let mut out = orbit.clone();
    out.samples = samples;
    out.start_end = map_end(&orbit.finish_end);
    out.finish_end = map_end(&orbit.start_end);
    out.crossings = orbit
        .crossings
        .iter()
        .rev()
        .map(|c| c.mirrored(axis))
        .collect();
    Ok(out)
}

/// First integral for constant `φ ≡ c`; zero along exact orbits.
pub fn first_integral_residual(s0: &PhasePoint, s1: &PhasePoint, p: &Params, c: f64) -> f64 {
    first_integral_residual_raw(s0.x, s0.theta, s1.x, s1.theta, p, c)
}

/// Same as [`first_integral_residual`] but admits points on the axis.
pub fn first_integral_residual_raw(x0: f64, t0: f64, x1: f64, t1: f64, p: &Params, c: f64) -> f64 {
    let (s0, s1) = (t0.sin(), t1.sin());
    p.a * (x1 * s1 - x0 * s0) + 0.5 * p.b * (s1 * s1 - s0 * s0) - 0.5 * c * (x1 * x1 - x0 * x0)
}

/// Jacobian of the phase-plane system at the equilibrium `(a/φ(0), π/2)`.
pub fn linearization_at_e0(
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<[[f64; 2]; 2], PhaseError> {
    let phi0 = phi.value(0.0);
    let disc = p.a * p.a + p.b * phi0;
    if !(disc > 0.0) {
        return Err(PhaseError::NotApplicable { discriminant: disc });
    }
    let lower_left = disc / (p.b + p.a * p.a / phi0).powi(2);
    let lower_right = -p.a * phi.deriv_value(0.0) / disc;
    Ok([[0.0, -1.0], [lower_left, lower_right]])
}

/// Eigenvalues of a real 2×2 matrix as `(re, im)` pairs.
pub fn eigenvalues(m: &[[f64; 2]; 2]) -> [(f64, f64); 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        [(tr / 2.0 + r, 0.0), (tr / 2.0 - r, 0.0)]
    } else {
        let r = (-disc).sqrt();
        [(tr / 2.0, r), (tr / 2.0, -r)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Half {
    Theta1,
    Theta2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
    Absent,
}

/// Connected component of `Θ` cut by `Γ`, `S` and the lines `θ ∈ {π/2, π, 3π/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Region {
    pub half: Half,
    pub gamma_side: Side,
    pub singular_side: Side,
    /// Quadrant of the reduced angle, 1 to 4.
    pub quadrant: u8,
    pub x_dot_sign: i8,
    pub theta_dot_sign: i8,
}

pub fn region_of(
    pt: &PhasePoint,
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<Region, PhaseError> {
    let theta = pt.reduced_theta();
    let on_line = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2, TAU]
        .iter()
        .any(|l| (theta - l).abs() <= REGION_EPS);
    let side = |curve: Option<f64>| match curve {
        None => Ok(Side::Absent),
        Some(c) if (pt.x - c).abs() <= REGION_EPS => Err(()),
        Some(c) if pt.x < c => Ok(Side::Below),
        Some(_) => Ok(Side::Above),
    };
    let boundary = PhaseError::OnBoundary {
        x: pt.x,
        theta: pt.theta,
    };
    if on_line {
        return Err(boundary);
    }
    let gamma_side = side(nullcline(theta, p, phi)).map_err(|_| boundary)?;
    let singular_side = side(singular_curve(theta, p)).map_err(|_| boundary)?;
    let (num, den) = theta_prime_parts(pt.x, theta, p, phi);
    let quadrant = (theta / FRAC_PI_2).floor() as u8 + 1;
    Ok(Region {
        half: if theta < PI {
            Half::Theta1
        } else {
            Half::Theta2
        },
        gamma_side,
        singular_side,
        quadrant: quadrant.min(4),
        x_dot_sign: sign_i8(theta.cos()),
        theta_dot_sign: sign_i8(num) * sign_i8(den),
    })
}

fn sign_i8(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
