//! Rotational surfaces in Euclidean space satisfying `2aH + bK = φ(⟨N, e₃⟩)`.
//!
//! The crate integrates the profile curves of such surfaces in their phase
//! plane, solves the radial boundary-value problem near the axis, classifies
//! the resulting surfaces and exports them as CSV, SVG portraits and meshes.

pub mod classify;
pub mod export;
pub mod geometry;
pub mod integrate;
pub mod phase;
pub mod phi;
pub mod radial;

pub use geometry::{GeometryError, Params, ProfileSample};
pub use integrate::{
    integrate, integrate_full, Direction, EndpointKind, IntegrateError, IntegratorOptions, Orbit,
    StartPoint, Stop,
};
pub use phase::PhasePoint;
pub use phi::PrescribedFunction;
