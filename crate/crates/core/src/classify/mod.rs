//! Classification of orbits into the families of complete and non-complete
//! rotational surfaces.
//!
//! The decision reads only the integrated signature: the two endpoint kinds,
//! closure, the sign pattern of `K` and the monotonicity of the height.
//! Closed-form thresholds live in [`thresholds`] and are used for reporting
//! and cross-checks, never to pick a family.

mod profile;
pub mod thresholds;

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::Params;
use crate::integrate::{
    check_character, integrate, integrate_full, Direction, EndpointKind, IntegrateError,
    IntegratorOptions, Orbit, StartPoint, Stop,
};
use crate::phase::{equilibrium, CharacterKind, PhasePoint};
use crate::phi::PrescribedFunction;
use crate::radial::{solve_radial_auto, Orientation, RadialError};

pub use profile::{
    gauss_sign_profile, height_monotonicity, GaussProfile, GaussSign, HeightProfile, SignChange,
    ZeroCause, ZERO_GAUSS, ZERO_SLOPE,
};
pub use thresholds::{
    find_x_infinity, find_x_plus, hyperbolic_classify, nodoid_boundary, normalize_elliptic,
    normalize_hyperbolic, phi_range, thresholds, x1_infty, HyperbolicReport, Normalized,
    Thresholds, X1Infinity,
};

/// Arc-length budget for classification runs.
pub const CLASSIFY_S_MAX: f64 = 200.0;
/// Arc length followed from the equilibrium.
pub const EQUILIBRIUM_S_MAX: f64 = 10.0;
/// An orbit that never leaves this neighbourhood of its seed is constant.
pub const CONSTANT_TOL: f64 = 1e-8;
/// Axis seeds with `|cos θ|` below this touch the axis tangentially.
pub const VERTICAL_AXIS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Cylinder,
    Sphere,
    Unduloid,
    Nodoid,
    #[serde(rename = "E15_CuspMonotone")]
    E15CuspMonotone,
    #[serde(rename = "E16_AnnulusMonotone")]
    E16AnnulusMonotone,
    #[serde(rename = "E17_NonMonotone")]
    E17NonMonotone,
    #[serde(rename = "E18_KSignChange")]
    E18KSignChange,
    #[serde(rename = "H1_CuspPositiveK")]
    H1CuspPositiveK,
    #[serde(rename = "H2_Cylinder")]
    H2Cylinder,
    #[serde(rename = "H3_AnnulusNegativeK")]
    H3AnnulusNegativeK,
    #[serde(rename = "H4_NodoidComplete")]
    H4NodoidComplete,
    #[serde(rename = "H42_CuspSphereLike")]
    H42CuspSphereLike,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cylinder => "Cylinder",
            Family::Sphere => "Sphere",
            Family::Unduloid => "Unduloid",
            Family::Nodoid => "Nodoid",
            Family::E15CuspMonotone => "E15_CuspMonotone",
            Family::E16AnnulusMonotone => "E16_AnnulusMonotone",
            Family::E17NonMonotone => "E17_NonMonotone",
            Family::E18KSignChange => "E18_KSignChange",
            Family::H1CuspPositiveK => "H1_CuspPositiveK",
            Family::H2Cylinder => "H2_Cylinder",
            Family::H3AnnulusNegativeK => "H3_AnnulusNegativeK",
            Family::H4NodoidComplete => "H4_NodoidComplete",
            Family::H42CuspSphereLike => "H42_CuspSphereLike",
        }
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(
            self,
            Family::H1CuspPositiveK
                | Family::H2Cylinder
                | Family::H3AnnulusNegativeK
                | Family::H4NodoidComplete
                | Family::H42CuspSphereLike
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The scalar that singles out a member of its family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyParameter {
    /// Smallest distance to the axis of a periodic profile.
    Neck { x: f64 },
    /// Radius of a cylinder or of a sphere's equator.
    Radius { x: f64 },
    /// Tangent angle at the first cusp.
    CuspAngle { theta: f64 },
}

impl fmt::Display for FamilyParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyParameter::Neck { x } => write!(f, "neck={x:.7}"),
            FamilyParameter::Radius { x } => write!(f, "radius={x:.7}"),
            FamilyParameter::CuspAngle { theta } => write!(f, "cusp_angle={theta:.7}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitClass {
    pub family: Family,
    pub parameter: Option<FamilyParameter>,
    pub complete: bool,
    pub gauss_sign: GaussSign,
    pub height_monotone: bool,
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(p) = self.parameter {
            write!(f, " {p}")?;
        }
        write!(f, " complete={}", self.complete)
    }
}

/// Everything the decision looks at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signature {
    pub character: CharacterKind,
    pub start_end: EndpointKind,
    pub finish_end: EndpointKind,
    pub closed: bool,
    pub constant: bool,
    pub gauss: GaussProfile,
    pub height: HeightProfile,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_string(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{self:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error("unclassified orbit: {signature}")]
    Unclassified { signature: Box<Signature> },
    #[error("no crossing of the target line; the orbit ends at {limit:?}")]
    NoCrossing { limit: EndpointKind },
    #[error("seed x₀ = {x0} is at the singular radius {singular}")]
    AtSingularRadius { x0: f64, singular: f64 },
    #[error("not applicable: {reason}")]
    NotApplicable { reason: String },
}

/// Initial data for a classification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Seed {
    /// The constant orbit at `(|a/φ(0)|, π/2 or 3π/2)`.
    Equilibrium,
    /// Any interior phase point, integrated both ways.
    Section { x: f64, theta: f64 },
    /// A point on the axis with the given tangent angle.
    Axis { theta: f64 },
    /// The graph from the radial solver, continued to its other end.
    Radial,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub class: OrbitClass,
    pub signature: Signature,
    pub orbit: Orbit,
}

/// Options used by [`classify`] unless overridden.
pub fn classify_options() -> IntegratorOptions {
    IntegratorOptions::default()
        .with_stop(Stop::PeriodicReturn)
        .with_s_max(CLASSIFY_S_MAX)
}

/// Integrates the orbit through `seed` and names its family.
pub fn classify(
    p: &Params,
    phi: &PrescribedFunction,
    seed: Seed,
    opts: &IntegratorOptions,
) -> Result<Classification, ClassifyError> {
    let character = check_character(p, phi)?;
    let orbit = orbit_for_seed(p, phi, seed, opts)?;
    let signature = signature(&orbit, character, seed == Seed::Equilibrium);
    let class = decide(&signature, &orbit)?;
    Ok(Classification {
        class,
        signature,
        orbit,
    })
}

/// Classifies many seeds concurrently. Results keep the order of `seeds`.
pub fn classify_sweep(
    p: &Params,
    phi: &PrescribedFunction,
    seeds: &[Seed],
    opts: &IntegratorOptions,
) -> Vec<Result<Classification, ClassifyError>> {
    seeds
        .par_iter()
        .map(|s| classify(p, phi, *s, opts))
        .collect()
}

/// The orbit a classification run would integrate for `seed`.
pub fn orbit_for_seed(
    p: &Params,
    phi: &PrescribedFunction,
    seed: Seed,
    opts: &IntegratorOptions,
) -> Result<Orbit, ClassifyError> {
    let invalid =
        |reason: String| ClassifyError::Integrate(IntegrateError::InvalidStart { reason });
    match seed {
        Seed::Equilibrium => {
            let e0 = equilibrium(p, phi)
                .ok_or_else(|| invalid("no equilibrium for these parameters".into()))?;
            let opts = IntegratorOptions {
                s_max: opts.s_max.min(EQUILIBRIUM_S_MAX),
                stops: Vec::new(),
                ..opts.clone()
            };
            Ok(integrate(
                StartPoint::Phase(e0),
                Direction::Forward,
                p,
                phi,
                &opts,
            )?)
        }
        Seed::Section { x, theta } => {
            let pt = PhasePoint::new(x, theta, p).map_err(|e| invalid(e.to_string()))?;
            Ok(integrate_full(pt, p, phi, opts)?)
        }
        Seed::Axis { theta } if theta.cos().abs() < VERTICAL_AXIS_TOL => {
            Err(ClassifyError::NotApplicable {
                reason: format!("axis seed θ = {theta} is tangent to the axis, not a cusp"),
            })
        }
        Seed::Axis { theta } => Ok(integrate(
            StartPoint::Axis { theta },
            Direction::Forward,
            p,
            phi,
            opts,
        )?),
        Seed::Radial => {
            let n = normalize_elliptic(p, phi)?;
            let sol = solve_radial_auto(&n.params, &n.phi, Orientation::Up)?;
            let orbit = sol.continue_orbit(&n.params, &n.phi, opts)?;
            Ok(n.restore(orbit))
        }
    }
}

/// Reads the signature off an integrated orbit.
pub fn signature(orbit: &Orbit, character: CharacterKind, from_equilibrium: bool) -> Signature {
    let constant = from_equilibrium && orbit.max_deviation_from_start() < CONSTANT_TOL;
    Signature {
        character,
        start_end: orbit.start_end,
        finish_end: orbit.finish_end,
        closed: orbit.closed,
        constant,
        gauss: gauss_sign_profile(orbit),
        height: height_monotonicity(orbit),
    }
}

fn both(sig: &Signature, pred: impl Fn(&EndpointKind) -> bool) -> bool {
    pred(&sig.start_end) && pred(&sig.finish_end)
}

fn is_cusp(e: &EndpointKind) -> bool {
    matches!(e, EndpointKind::AxisCusp { .. })
}

fn is_wall(e: &EndpointKind) -> bool {
    matches!(e, EndpointKind::SingularCircle { .. })
}

/// Maps a signature to its unique family or reports it as unclassified.
pub fn decide(sig: &Signature, orbit: &Orbit) -> Result<OrbitClass, ClassifyError> {
    let monotone = sig.height.monotone;
    let k = sig.gauss.overall;
    let family = if sig.constant {
        Some(match sig.character {
            CharacterKind::Hyperbolic => Family::H2Cylinder,
            _ => Family::Cylinder,
        })
    } else {
        match sig.character {
            CharacterKind::Elliptic => decide_elliptic(sig, monotone, k),
            CharacterKind::Hyperbolic => decide_hyperbolic(sig, monotone, k),
            _ => None,
        }
    };
    let Some(family) = family else {
        return Err(ClassifyError::Unclassified {
            signature: Box::new(sig.clone()),
        });
    };
    let complete = sig.constant
        || sig.closed
        || both(sig, |e| matches!(e, EndpointKind::AxisOrthogonal { .. }));
    Ok(OrbitClass {
        family,
        parameter: parameter(family, sig, orbit),
        complete,
        gauss_sign: k,
        height_monotone: monotone,
    })
}

fn decide_elliptic(sig: &Signature, monotone: bool, k: GaussSign) -> Option<Family> {
    if sig.closed {
        return Some(if monotone {
            Family::Unduloid
        } else {
            Family::Nodoid
        });
    }
    if both(sig, |e| matches!(e, EndpointKind::AxisOrthogonal { .. })) {
        return Some(Family::Sphere);
    }
    let cusps = both(sig, is_cusp);
    let walls = both(sig, is_wall);
    if !(cusps || walls) {
        return None;
    }
    Some(if !monotone {
        Family::E17NonMonotone
    } else if k == GaussSign::Changes {
        Family::E18KSignChange
    } else if k != GaussSign::Positive {
        return None;
    } else if cusps {
        Family::E15CuspMonotone
    } else {
        Family::E16AnnulusMonotone
    })
}

fn decide_hyperbolic(sig: &Signature, monotone: bool, k: GaussSign) -> Option<Family> {
    if sig.closed {
        return Some(Family::H4NodoidComplete);
    }
    if both(sig, is_cusp) {
        if !monotone {
            return Some(Family::H42CuspSphereLike);
        }
        if k == GaussSign::Positive {
            return Some(Family::H1CuspPositiveK);
        }
        return None;
    }
    if both(sig, is_wall) && k == GaussSign::Negative {
        return Some(Family::H3AnnulusNegativeK);
    }
    None
}

fn parameter(family: Family, sig: &Signature, orbit: &Orbit) -> Option<FamilyParameter> {
    let min_x = orbit.interior().map(|s| s.x).fold(f64::INFINITY, f64::min);
    let max_x = orbit.interior().map(|s| s.x).fold(0.0, f64::max);
    match family {
        Family::Cylinder | Family::H2Cylinder => {
            Some(FamilyParameter::Radius { x: orbit.first().x })
        }
        Family::Unduloid | Family::Nodoid | Family::H4NodoidComplete => {
            Some(FamilyParameter::Neck { x: min_x })
        }
        Family::Sphere => Some(FamilyParameter::Radius { x: max_x }),
        _ => match sig.start_end {
            EndpointKind::AxisCusp { theta } => Some(FamilyParameter::CuspAngle { theta }),
            _ => None,
        },
    }
}

/// The angle of the section line used for seeds of periodic families.
pub fn section_for(p: &Params, phi: &PrescribedFunction) -> f64 {
    if p.a * phi.value(0.0) > 0.0 {
        FRAC_PI_2
    } else {
        3.0 * FRAC_PI_2
    }
}
