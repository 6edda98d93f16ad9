//! Curvatures of a rotational surface read off its profile curve.
//!
//! The profile `α(s) = (x(s), 0, z(s))` is parametrized by arc length with
//! `x' = cos θ`, `z' = sin θ`. Its principal curvatures are `κ₁ = θ'` and
//! `κ₂ = sin θ / x`, and the surface satisfies the prescribed relation
//! `2aH + bK = φ(cos θ)` exactly when
//!
//! ```text
//! θ' = (x φ(cos θ) - a sin θ) / (a x + b sin θ).
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::phi::PrescribedFunction;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("coefficients must be finite and non-zero (a = {a}, b = {b})")]
    InvalidParams { a: f64, b: f64 },
    #[error("denominator a·x + b·sin θ = {denominator:e} is within the singular guard")]
    NearSingular { denominator: f64 },
    #[error("curvature is undefined on the rotation axis")]
    AxisPoint,
}

/// Coefficients of `2aH + bK = Φ(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub a: f64,
    pub b: f64,
}

impl Params {
    pub fn new(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite()) || a == 0.0 || b == 0.0 {
            return Err(GeometryError::InvalidParams { a, b });
        }
        Ok(Params { a, b })
    }

    /// `a·x + b·sin θ`; vanishes on the singular curve.
    #[inline]
    pub fn denominator(&self, x: f64, theta: f64) -> f64 {
        self.a * x + self.b * theta.sin()
    }

    /// Guard below which the denominator is treated as zero.
    #[inline]
    pub fn singular_guard(&self, x: f64) -> f64 {
        1e-9 * (1.0 + (self.a * x).abs())
    }
}

/// Numerator and denominator of the `θ'` equation.
#[inline]
pub fn theta_prime_parts(x: f64, theta: f64, p: &Params, phi: &PrescribedFunction) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (x * phi.value(c) - p.a * s, p.a * x + p.b * s)
}

/// `θ' = κ₁` at `(x, θ)`.
pub fn theta_prime(
    x: f64,
    theta: f64,
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<f64, GeometryError> {
    let (num, den) = theta_prime_parts(x, theta, p, phi);
    if den.abs() <= p.singular_guard(x) {
        return Err(GeometryError::NearSingular { denominator: den });
    }
    Ok(num / den)
}

/// Principal, mean and Gauss curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvatures {
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean: f64,
    pub gauss: f64,
}

pub fn curvatures(x: f64, theta: f64, theta_prime: f64) -> Result<Curvatures, GeometryError> {
    if x <= 0.0 {
        return Err(GeometryError::AxisPoint);
    }
    Ok(from_principal(theta_prime, theta.sin() / x))
}

fn from_principal(kappa1: f64, kappa2: f64) -> Curvatures {
    Curvatures {
        kappa1,
        kappa2,
        mean: 0.5 * (kappa1 + kappa2),
        gauss: kappa1 * kappa2,
    }
}

/// One point of a generating curve with its curvature data.
///
/// On the axis `κ₂` is only defined at orthogonal endpoints, where it equals
/// `κ₁`; at cusp endpoints `kappa2`, `mean`, `gauss` and `residual` are NaN.
/// On the singular curve `κ₁` is unbounded and recorded as NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean: f64,
    pub gauss: f64,
    pub angle_fn: f64,
    pub residual: f64,
}

impl ProfileSample {
    /// Builds an interior sample (`x > 0`) with `κ₁` supplied by the caller.
    pub fn interior(
        s: f64,
        x: f64,
        z: f64,
        theta: f64,
        kappa1: f64,
        p: &Params,
        phi: &PrescribedFunction,
    ) -> Self {
        let k = from_principal(kappa1, theta.sin() / x);
        Self::assemble(s, x, z, theta, k, p, phi)
    }

    /// Sample on the rotation axis. `orthogonal` selects the `κ₂ → κ₁` limit.
    pub fn on_axis(
        s: f64,
        z: f64,
        theta: f64,
        kappa1: f64,
        orthogonal: bool,
        p: &Params,
        phi: &PrescribedFunction,
    ) -> Self {
        let kappa2 = if orthogonal { kappa1 } else { f64::NAN };
        Self::assemble(s, 0.0, z, theta, from_principal(kappa1, kappa2), p, phi)
    }

    /// Sample on the singular curve `a·x + b·sin θ = 0`, where `θ′` blows up.
    pub fn singular(
        s: f64,
        x: f64,
        z: f64,
        theta: f64,
        p: &Params,
        phi: &PrescribedFunction,
    ) -> Self {
        Self::interior(s, x, z, theta, f64::NAN, p, phi)
    }

    fn assemble(
        s: f64,
        x: f64,
        z: f64,
        theta: f64,
        k: Curvatures,
        p: &Params,
        phi: &PrescribedFunction,
    ) -> Self {
        let angle_fn = theta.cos();
        let residual = 2.0 * p.a * k.mean + p.b * k.gauss - phi.value(angle_fn);
        ProfileSample {
            s,
            x,
            z,
            theta,
            kappa1: k.kappa1,
            kappa2: k.kappa2,
            mean: k.mean,
            gauss: k.gauss,
            angle_fn,
            residual,
        }
    }
}

/// `2aH + bK - φ(cos θ)` recomputed from the sample's `x`, `θ` and `κ₁`.
pub fn weingarten_residual(
    sample: &ProfileSample,
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<f64, GeometryError> {
    let k = curvatures(sample.x, sample.theta, sample.kappa1)?;
    Ok(2.0 * p.a * k.mean + p.b * k.gauss - phi.value(sample.theta.cos()))
}
