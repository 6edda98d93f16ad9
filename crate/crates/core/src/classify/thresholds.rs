//! Radii that separate families, and the normalizations they assume.
//!
//! Two symmetries keep the orbits while changing the coefficients: scaling
//! `(a, b, φ)` by any `λ ≠ 0` leaves the ODE untouched, and flipping the
//! orientation maps `(a, b, φ)` at `(x, θ)` to `(−a, b, φ)` at `(x, θ + π)`
//! traversed backwards.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::{classify, classify_options, Classification, ClassifyError, Family, Seed};
use crate::geometry::{Params, ProfileSample};
use crate::integrate::{
    check_character, integrate, Crossing, Direction, EndpointKind, IntegratorOptions, Orbit,
    StartPoint, Stop,
};
use crate::phase::{CharacterKind, PhasePoint};
use crate::phi::{validation_grid, PrescribedFunction};
use crate::radial::{solve_radial_auto, Orientation};

/// Seeds within this distance of `1/a` are refused.
pub const SINGULAR_RADIUS_TOL: f64 = 1e-6;
/// Width used to call a seed equal to the equilibrium radius.
pub const EQUILIBRIUM_RADIUS_TOL: f64 = 1e-9;
/// Bisection tolerance for family boundaries.
pub const BISECTION_TOL: f64 = 1e-8;
/// Number of geometric steps towards `b/a` in the `x₁^∞` extrapolation.
pub const X1_STEPS: usize = 10;

/// Coefficients brought to a canonical sign, with the way back.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub params: Params,
    pub phi: PrescribedFunction,
    pub scale: f64,
    pub flipped: bool,
    original: (Params, PrescribedFunction),
}

impl Normalized {
    fn new(p: &Params, phi: &PrescribedFunction, scale: f64) -> Result<Self, ClassifyError> {
        let not_applicable = |e: String| ClassifyError::NotApplicable { reason: e };
        let scaled = phi
            .scaled(scale)
            .map_err(|e| not_applicable(e.to_string()))?;
        let (a, b) = (scale * p.a, scale * p.b);
        let flipped = a < 0.0;
        let params = Params::new(a.abs(), b).map_err(|e| not_applicable(e.to_string()))?;
        Ok(Normalized {
            params,
            phi: scaled,
            scale,
            flipped,
            original: (*p, phi.clone()),
        })
    }

    /// Maps an orbit of the normalized problem back to the original one.
    pub fn restore(&self, mut orbit: Orbit) -> Orbit {
        let (p, phi) = (&self.original.0, &self.original.1);
        let rebuild = |s: &ProfileSample, sign: f64, shift: f64| {
            let (ss, theta, k1) = (sign * s.s, s.theta + shift, sign * s.kappa1);
            if s.x > 0.0 {
                ProfileSample::interior(ss, s.x, s.z, theta, k1, p, phi)
            } else {
                ProfileSample::on_axis(ss, s.z, theta, k1, s.kappa2.is_finite(), p, phi)
            }
        };
        if self.flipped {
            orbit.samples = orbit
                .samples
                .iter()
                .rev()
                .map(|s| rebuild(s, -1.0, PI))
                .collect();
            let (start, finish) = (shift_end(orbit.finish_end), shift_end(orbit.start_end));
            orbit.start_end = start;
            orbit.finish_end = finish;
            orbit.crossings = orbit.crossings.iter().rev().map(shift_crossing).collect();
            orbit
                .notes
                .push("integrated with the opposite orientation".into());
        } else {
            orbit.samples = orbit.samples.iter().map(|s| rebuild(s, 1.0, 0.0)).collect();
        }
        orbit.params = *p;
        orbit.phi = phi.source().to_string();
        orbit
    }
}

fn shift_end(e: EndpointKind) -> EndpointKind {
    use EndpointKind::*;
    match e {
        Seed { x, theta } => Seed {
            x,
            theta: theta + PI,
        },
        AxisOrthogonal { theta } => AxisOrthogonal { theta: theta + PI },
        AxisCusp { theta } => AxisCusp { theta: theta + PI },
        SingularCircle { theta, x } => SingularCircle {
            theta: theta + PI,
            x,
        },
        LineCrossing { theta, x } => LineCrossing {
            theta: theta + PI,
            x,
        },
        PeriodicReturn { x, theta } => PeriodicReturn {
            x,
            theta: theta + PI,
        },
        Truncated { s } => Truncated { s: -s },
    }
}

fn shift_crossing(c: &Crossing) -> Crossing {
    Crossing {
        s: -c.s,
        theta: c.theta + PI,
        k: c.k + 2,
        theta_direction: -c.theta_direction,
        ..*c
    }
}

/// Elliptic data with `φ > 0` and `a > 0`.
pub fn normalize_elliptic(
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<Normalized, ClassifyError> {
    if check_character(p, phi)? != CharacterKind::Elliptic {
        return Err(ClassifyError::NotApplicable {
            reason: "elliptic character required".into(),
        });
    }
    Normalized::new(p, phi, phi.sign().as_f64())
}

/// Hyperbolic data with `b = 1` and `a > 0`.
pub fn normalize_hyperbolic(
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<Normalized, ClassifyError> {
    if check_character(p, phi)? != CharacterKind::Hyperbolic {
        return Err(ClassifyError::NotApplicable {
            reason: "hyperbolic character required".into(),
        });
    }
    Normalized::new(p, phi, 1.0 / p.b)
}

fn line_crossing(end: EndpointKind) -> Result<f64, ClassifyError> {
    match end {
        EndpointKind::LineCrossing { x, .. } => Ok(x),
        limit => Err(ClassifyError::NoCrossing { limit }),
    }
}

/// Radius at which the orbit leaving the axis orthogonally first becomes
/// vertical: the equator of the sphere-type solution.
pub fn find_x_plus(p: &Params, phi: &PrescribedFunction) -> Result<f64, ClassifyError> {
    let n = normalize_elliptic(p, phi)?;
    let sol = solve_radial_auto(&n.params, &n.phi, Orientation::Up)?;
    let (seed, dir) = sol.seed_orbit();
    let seed = PhasePoint::new(seed.x, seed.theta, &n.params).map_err(|e| {
        ClassifyError::NotApplicable {
            reason: e.to_string(),
        }
    })?;
    let opts = IntegratorOptions::default().with_stop(Stop::Line(FRAC_PI_2));
    let orbit = integrate(StartPoint::Phase(seed), dir, &n.params, &n.phi, &opts)?;
    line_crossing(orbit.finish_end)
}

/// The `3π/2` crossing of the orbit through `(0, π/2)`, in the normalized
/// frame `b = 1`, `a > 0`. When the orbit runs into the singular curve
/// instead, the error carries the limit it reached.
pub fn find_x_infinity(p: &Params, phi: &PrescribedFunction) -> Result<f64, ClassifyError> {
    let n = normalize_hyperbolic(p, phi)?;
    let opts = IntegratorOptions::default().with_stop(Stop::Line(3.0 * FRAC_PI_2));
    let orbit = integrate(
        StartPoint::Axis { theta: FRAC_PI_2 },
        Direction::Backward,
        &n.params,
        &n.phi,
        &opts,
    )?;
    line_crossing(orbit.start_end)
}

/// Outcome of classifying a seed `(x₀, 3π/2)` in the normalized
/// hyperbolic frame.
#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicReport {
    pub x0: f64,
    /// Family read from the orbit signature.
    pub classification: Classification,
    /// Family expected from the position of `x₀` among the thresholds.
    pub predicted: Family,
    pub x_infinity: Option<f64>,
    /// `|x₀ − x_∞|` when the two families disagree, else `None`.
    pub band: Option<f64>,
}

/// Classifies the seed `(x₀, 3π/2)`. `x₀` is read in the normalized frame
/// `b = 1`, `a > 0`.
pub fn hyperbolic_classify(
    p: &Params,
    phi: &PrescribedFunction,
    x0: f64,
) -> Result<HyperbolicReport, ClassifyError> {
    let n = normalize_hyperbolic(p, phi)?;
    let a = n.params.a;
    let singular = 1.0 / a;
    if (x0 - singular).abs() <= SINGULAR_RADIUS_TOL {
        return Err(ClassifyError::AtSingularRadius { x0, singular });
    }
    let radius = -a / n.phi.value(0.0);
    let mut x_infinity = None;
    let predicted = if (x0 - radius).abs() <= EQUILIBRIUM_RADIUS_TOL {
        Family::H2Cylinder
    } else if x0 < radius {
        Family::H1CuspPositiveK
    } else if x0 < singular {
        Family::H3AnnulusNegativeK
    } else {
        match find_x_infinity(&n.params, &n.phi) {
            Ok(xi) => {
                x_infinity = Some(xi);
                if x0 <= xi {
                    Family::H42CuspSphereLike
                } else {
                    Family::H4NodoidComplete
                }
            }
            Err(ClassifyError::NoCrossing { .. }) => Family::H4NodoidComplete,
            Err(e) => return Err(e),
        }
    };
    let seed = if predicted == Family::H2Cylinder {
        Seed::Equilibrium
    } else {
        Seed::Section {
            x: x0,
            theta: 3.0 * FRAC_PI_2,
        }
    };
    let classification = classify(&n.params, &n.phi, seed, &classify_options())?;
    let band = (classification.class.family != predicted)
        .then(|| x_infinity.map_or(f64::NAN, |xi| (x0 - xi).abs()));
    Ok(HyperbolicReport {
        x0,
        classification,
        predicted,
        x_infinity,
        band,
    })
}

/// Estimate of the smallest `θ = π/2` radius reached by nodoid orbits.
#[derive(Debug, Clone, Serialize)]
pub struct X1Infinity {
    /// Aitken extrapolation of the last three crossings.
    pub extrapolated: f64,
    /// Change between the last two extrapolations.
    pub residual: f64,
    /// Pairs `(x₁, x̂₁)`: seed on `3π/2` and its `π/2` crossing.
    pub crossings: Vec<(f64, f64)>,
}

fn aitken(x: &[f64]) -> f64 {
    let [x0, x1, x2] = [x[0], x[1], x[2]];
    let den = (x2 - x1) - (x1 - x0);
    if den.abs() < f64::EPSILON * x2.abs() {
        x2
    } else {
        x2 - (x2 - x1).powi(2) / den
    }
}

/// Follows nodoid seeds `(b/a + δ, 3π/2)` backwards to `θ = π/2` for
/// `δ` shrinking geometrically, and extrapolates the crossing radius.
pub fn x1_infty(p: &Params, phi: &PrescribedFunction) -> Result<X1Infinity, ClassifyError> {
    let n = normalize_elliptic(p, phi)?;
    let ratio = n.params.b / n.params.a;
    if ratio <= 0.0 {
        return Err(ClassifyError::NotApplicable {
            reason: "nodoid seeds need b/a > 0".into(),
        });
    }
    let opts = IntegratorOptions::default()
        .with_stop(Stop::Line(FRAC_PI_2))
        .with_s_max(super::CLASSIFY_S_MAX);
    let mut crossings = Vec::with_capacity(X1_STEPS);
    let mut delta = 0.1 * ratio;
    for _ in 0..X1_STEPS {
        let x1 = ratio + delta;
        let seed = PhasePoint::new(x1, 3.0 * FRAC_PI_2, &n.params).map_err(|e| {
            ClassifyError::NotApplicable {
                reason: e.to_string(),
            }
        })?;
        let orbit = integrate(
            StartPoint::Phase(seed),
            Direction::Backward,
            &n.params,
            &n.phi,
            &opts,
        )?;
        crossings.push((x1, line_crossing(orbit.start_end)?));
        delta *= 0.5;
    }
    let xs: Vec<f64> = crossings.iter().map(|c| c.1).collect();
    let k = xs.len();
    let last = aitken(&xs[k - 3..]);
    let prev = aitken(&xs[k - 4..k - 1]);
    Ok(X1Infinity {
        extrapolated: last,
        residual: (last - prev).abs(),
        crossings,
    })
}

/// Locates by bisection, among seeds `(x, π/2)` above `x₊`, the radius
/// where orbits start to close up as nodoids. Returns the final bracket.
pub fn nodoid_boundary(
    p: &Params,
    phi: &PrescribedFunction,
    tol: f64,
) -> Result<(f64, f64), ClassifyError> {
    let n = normalize_elliptic(p, phi)?;
    let estimate = x1_infty(&n.params, &n.phi)?;
    let mut lo = find_x_plus(&n.params, &n.phi)?;
    let mut hi = estimate.crossings[0].1;
    let is_nodoid = |x: f64| -> Result<bool, ClassifyError> {
        let seed = Seed::Section {
            x,
            theta: FRAC_PI_2,
        };
        match classify(&n.params, &n.phi, seed, &classify_options()) {
            Ok(c) => Ok(c.class.family == Family::Nodoid),
            Err(ClassifyError::Unclassified { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !is_nodoid(hi)? {
        return Err(ClassifyError::NotApplicable {
            reason: format!("seed {hi} on π/2 does not close up"),
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_nodoid(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Reported thresholds. Entries that do not apply are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Thresholds {
    pub x_plus: Option<f64>,
    pub x1_infty: Option<f64>,
    /// Hyperbolic threshold in the normalized frame.
    pub x_infty: Option<f64>,
    /// `−2a/c` for constant `φ ≡ c > −2a²`, normalized frame.
    pub x_c: Option<f64>,
}

pub fn thresholds(p: &Params, phi: &PrescribedFunction) -> Result<Thresholds, ClassifyError> {
    let mut t = Thresholds::default();
    match check_character(p, phi)? {
        CharacterKind::Elliptic => {
            t.x_plus = find_x_plus(p, phi).ok();
            t.x1_infty = x1_infty(p, phi).ok().map(|x| x.extrapolated);
        }
        _ => {
            let n = normalize_hyperbolic(p, phi)?;
            t.x_infty = find_x_infinity(p, phi).ok();
            let a = n.params.a;
            t.x_c = n
                .phi
                .constant_value()
                .filter(|c| *c > -2.0 * a * a)
                .map(|c| -2.0 * a / c);
        }
    }
    Ok(t)
}

/// Smallest and largest `φ` on the validation grid.
pub fn phi_range(phi: &PrescribedFunction) -> (f64, f64) {
    validation_grid()
        .map(|y| phi.value(y))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    fn c(v: f64) -> PrescribedFunction {
        PrescribedFunction::constant(v).unwrap()
    }

    /// Sphere equator from the closed form `(a + √(a² + bc))/c`.
    fn sphere_radius(a: f64, b: f64, c: f64) -> f64 {
        (a + (a * a + b * c).sqrt()) / c
    }

    #[test]
    fn x_plus_matches_the_sphere() {
        for (a, b, v) in [(1.0, 1.0, 3.0), (1.0, 1.0, 1.0), (2.0, 1.0, 3.0)] {
            let x = find_x_plus(&params(a, b), &c(v)).unwrap();
            assert!(
                (x - sphere_radius(a, b, v)).abs() < 1e-6,
                "{a} {b} {v}: {x}"
            );
        }
        assert!((sphere_radius(1.0, 1.0, 1.0) - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn x_plus_is_invariant_under_the_symmetries() {
        let x = find_x_plus(&params(1.0, 1.0), &c(3.0)).unwrap();
        let flipped = find_x_plus(&params(-1.0, 1.0), &c(3.0)).unwrap();
        let scaled = find_x_plus(&params(-2.0, -2.0), &c(-6.0)).unwrap();
        assert!((x - flipped).abs() < 1e-9 && (x - scaled).abs() < 1e-9);
    }

    #[test]
    fn x_infinity_for_constants() {
        let x = find_x_infinity(&params(1.0, 1.0), &c(-1.5)).unwrap();
        assert!((x - 4.0 / 3.0).abs() < 1e-6, "{x}");
        match find_x_infinity(&params(1.0, 1.0), &c(-2.0)) {
            Err(ClassifyError::NoCrossing {
                limit: EndpointKind::SingularCircle { x, theta },
            }) => {
                assert!((x - 1.0).abs() < 1e-3 && (theta - 3.0 * FRAC_PI_2).abs() < 1e-3);
            }
            other => panic!("{other:?}"),
        }
        match find_x_infinity(&params(1.0, 1.0), &c(-3.0)) {
            Err(ClassifyError::NoCrossing {
                limit: EndpointKind::SingularCircle { x, theta },
            }) => {
                let p = params(1.0, 1.0);
                assert!(p.denominator(x, theta).abs() < 1e-9);
                assert!((x - 1.0).abs() > 1e-3);
            }
            other => panic!("{other:?}"),
        }
        // (2, 2, -3) rescales to (1, 1, -1.5).
        let x = find_x_infinity(&params(2.0, 2.0), &c(-3.0)).unwrap();
        assert!((x - 4.0 / 3.0).abs() < 1e-6, "{x}");
    }

    #[test]
    fn hyperbolic_split_at_the_threshold() {
        let p = params(1.0, 1.0);
        let r = hyperbolic_classify(&p, &c(-1.5), 1.2).unwrap();
        assert_eq!(r.classification.class.family, Family::H42CuspSphereLike);
        assert_eq!(r.predicted, Family::H42CuspSphereLike);
        assert!(!r.classification.class.complete);
        let r = hyperbolic_classify(&p, &c(-1.5), 1.5).unwrap();
        assert_eq!(r.classification.class.family, Family::H4NodoidComplete);
        assert!(r.classification.class.complete);
        let r = hyperbolic_classify(&p, &c(-3.0), 2.0).unwrap();
        assert_eq!(r.classification.class.family, Family::H4NodoidComplete);
        assert!(matches!(
            hyperbolic_classify(&p, &c(-3.0), 1.0),
            Err(ClassifyError::AtSingularRadius { .. })
        ));
        let r = hyperbolic_classify(&p, &c(-3.0), 1.0 / 3.0).unwrap();
        assert_eq!(r.classification.class.family, Family::H2Cylinder);
    }

    #[test]
    fn x1_infinity_lies_above_x_plus() {
        let p = params(1.0, 1.0);
        let x1 = x1_infty(&p, &c(3.0)).unwrap();
        let xp = find_x_plus(&p, &c(3.0)).unwrap();
        assert!(x1.extrapolated > xp, "{} vs {xp}", x1.extrapolated);
        assert!(x1.residual < 1e-3, "{}", x1.residual);
        // The first integral at x₁ = b/a gives the limit: with E = −b + b/2 − c/2,
        // x̂ solves a x + b/2 − c x²/2 = E, i.e. 1.5x² − x − 2.5 = 0.
        assert!(
            (x1.extrapolated - 5.0 / 3.0).abs() < 1e-8,
            "{}",
            x1.extrapolated
        );
        // Crossings decrease towards the limit as the seed approaches b/a.
        assert!(x1.crossings.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn flip_restores_the_original_frame() {
        let p = params(-1.0, 1.0);
        let phi = c(3.0);
        let n = normalize_elliptic(&p, &phi).unwrap();
        assert!(n.flipped && n.params.a == 1.0);
        let sol = solve_radial_auto(&n.params, &n.phi, Orientation::Up).unwrap();
        let orbit = n.restore(
            sol.continue_orbit(&n.params, &n.phi, &Default::default())
                .unwrap(),
        );
        let worst = orbit
            .interior()
            .map(|s| s.residual.abs())
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
        assert!(orbit.samples.windows(2).all(|w| w[0].s < w[1].s));
    }
}
