//! Event-aware integration of the phase-plane system together with the height.
//!
//! The system `x' = cos θ`, `θ' = N/D`, `z' = sin θ` (with `N = xφ(cos θ) − a sin θ`
//! and `D = a x + b sin θ`) is integrated in a pseudo-time `τ` with
//! `ds/dτ = σD`, where `σ` is the sign of `D` at the start. This removes the
//! pole on the singular curve: orbits approach `D = 0` in finite pseudo-time
//! and the approach is detected as an event instead of being overshot.
//!
//! Every accepted step is checked for the following events, each located by
//! bisection on the step size:
//!
//! * the axis `x = ε_axis` (terminal);
//! * the singular curve, either crossed or touched tangentially (terminal);
//! * crossings of the lines `θ = kπ/2` (recorded, terminal when requested);
//! * a return to the seed section (terminal when requested);
//! * the arc-length budget `s_max` (terminal).

mod rk;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::ProfileSample;
use crate::phase::{pde_character, reduce_angle, CharacterKind, PhasePoint};
use crate::phi::PrescribedFunction;
use crate::Params;
use rk::{dopri_step, error_norm, State, DIM};

/// Radius at which an orbit is considered to have reached the axis.
pub const EPS_AXIS: f64 = 1e-9;
/// Normalized distance to the singular curve that ends an integration.
pub const WALL_TOL: f64 = 1e-9;
/// Normalized distance at a tangential approach treated as reaching the curve.
pub const TOUCH_TOL: f64 = 1e-7;
/// Distance of an axis limit angle to `kπ` accepted as orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-6;
/// Radius below which an orthogonal approach to the axis is extrapolated.
///
/// The axis points `(0, kπ)` are saddles of the desingularized field, so the
/// last stretch of an orthogonal approach is ill-conditioned.
pub const CORNER_RADIUS: f64 = 1e-4;
/// Box around `(0, kπ)` in which a singular-curve hit counts as the axis.
pub const CORNER_BOX: f64 = 1e-5;
/// Bisection stops once the bracket is this small in `x`, `θ` and `s`.
pub const EVENT_TOL: f64 = 1e-12;
/// Relative radius tolerance for recognising a return to the seed.
pub const RETURN_TOL: f64 = 1e-6;

const MAX_STEPS: usize = 20_000_000;
const MAX_BISECTIONS: usize = 200;
/// Arc length of the series segment used to leave the axis orthogonally.
const AXIS_SERIES_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error(
        "{kind:?} character is outside the integrable range (a² + bφ between {min} and {max})"
    )]
    CharacterViolation {
        kind: CharacterKind,
        min: f64,
        max: f64,
    },
    #[error("invalid start: {reason}")]
    InvalidStart { reason: String },
    #[error("step size collapsed to {h:e} at s = {s}, x = {x}, θ = {theta}")]
    StepUnderflow { s: f64, x: f64, theta: f64, h: f64 },
    #[error("non-finite state at s = {s}")]
    NonFinite { s: f64 },
    #[error("step limit of {steps} reached")]
    StepLimit { steps: usize },
    #[error("both the axis and the singular curve are within tolerance at x = {x}, θ = {theta}")]
    Ambiguous { x: f64, theta: f64 },
    #[error("no endpoint can be identified from the trail")]
    NoEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Optional terminal events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Stop {
    /// Stop on the first crossing of `θ ≡ angle (mod 2π)`.
    Line(f64),
    /// Stop when the orbit crosses the seed's angle again at the seed radius
    /// in the same angular direction.
    PeriodicReturn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest arc-length advance per step, also applied to `θ`.
    pub h_max: f64,
    pub s_max: f64,
    pub stops: Vec<Stop>,
    /// Replaces adaptive control by a constant pseudo-time step.
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: 1e-2,
            s_max: 50.0,
            stops: Vec::new(),
            fixed_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn with_stop(mut self, stop: Stop) -> Self {
        self.stops.push(stop);
        self
    }

    pub fn with_s_max(mut self, s_max: f64) -> Self {
        self.s_max = s_max;
        self
    }
}

/// Where an integration begins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StartPoint {
    Phase(PhasePoint),
    /// A point on the rotation axis with the given tangent angle. The orbit is
    /// always continued away from the axis, whatever direction is requested.
    Axis {
        theta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum EndpointKind {
    /// The integration started here and was not continued past it.
    Seed {
        x: f64,
        theta: f64,
    },
    AxisOrthogonal {
        theta: f64,
    },
    AxisCusp {
        theta: f64,
    },
    SingularCircle {
        theta: f64,
        x: f64,
    },
    LineCrossing {
        theta: f64,
        x: f64,
    },
    PeriodicReturn {
        x: f64,
        theta: f64,
    },
    Truncated {
        s: f64,
    },
}

impl EndpointKind {
    pub fn is_axis(&self) -> bool {
        matches!(
            self,
            EndpointKind::AxisOrthogonal { .. } | EndpointKind::AxisCusp { .. }
        )
    }

    /// The endpoint seen through the mirror `θ ↦ axis − θ`, `s ↦ −s`.
    pub fn mirrored(&self, axis: f64) -> Self {
        use EndpointKind::*;
        match *self {
            Seed { x, theta } => Seed {
                x,
                theta: axis - theta,
            },
            AxisOrthogonal { theta } => AxisOrthogonal {
                theta: axis - theta,
            },
            AxisCusp { theta } => AxisCusp {
                theta: axis - theta,
            },
            SingularCircle { theta, x } => SingularCircle {
                theta: axis - theta,
                x,
            },
            LineCrossing { theta, x } => LineCrossing {
                theta: axis - theta,
                x,
            },
            PeriodicReturn { x, theta } => PeriodicReturn {
                x,
                theta: axis - theta,
            },
            Truncated { s } => Truncated { s: -s },
        }
    }
}

/// A crossing of one of the lines `θ = kπ/2` on the covering line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    /// `kπ/2`, not reduced.
    pub theta: f64,
    pub k: i64,
    /// Sign of `dθ/ds` at the crossing.
    pub theta_direction: i8,
}

impl Crossing {
    pub fn mirrored(&self, axis: f64) -> Self {
        let theta = axis - self.theta;
        Crossing {
            s: -self.s,
            z: -self.z,
            theta,
            k: (theta / FRAC_PI_2).round() as i64,
            theta_direction: self.theta_direction,
            ..*self
        }
    }

    /// `true` for `θ ≡ angle (mod 2π)`.
    pub fn is_on(&self, angle: f64) -> bool {
        same_angle(self.theta, angle)
    }
}

/// An integrated profile curve with samples in increasing arc length.
#[derive(Debug, Clone, Serialize)]
pub struct Orbit {
    pub params: Params,
    pub phi: String,
    pub samples: Vec<ProfileSample>,
    /// Endpoint at the lowest arc length.
    pub start_end: EndpointKind,
    /// Endpoint at the highest arc length.
    pub finish_end: EndpointKind,
    pub crossings: Vec<Crossing>,
    pub closed: bool,
    pub notes: Vec<String>,
}

impl Orbit {
    pub fn first(&self) -> &ProfileSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &ProfileSample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn arc_length(&self) -> f64 {
        self.last().s - self.first().s
    }

    /// Samples strictly off the axis.
    pub fn interior(&self) -> impl Iterator<Item = &ProfileSample> {
        self.samples.iter().filter(|s| s.x > 0.0)
    }

    /// Largest deviation of `(x, θ)` from the first sample.
    pub fn max_deviation_from_start(&self) -> f64 {
        let s0 = self.first();
        self.samples
            .iter()
            .map(|s| (s.x - s0.x).abs().max((s.theta - s0.theta).abs()))
            .fold(0.0, f64::max)
    }

    pub fn endpoints(&self) -> [EndpointKind; 2] {
        [self.start_end, self.finish_end]
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = reduce_angle(a - b);
    d <= 1e-12 || TAU - d <= 1e-12
}

/// The pseudo-time vector field of one integration.
struct System<'a> {
    p: &'a Params,
    phi: &'a PrescribedFunction,
    sigma: f64,
    dir: f64,
}

impl System<'_> {
    #[inline]
    fn parts(&self, y: &State) -> (f64, f64) {
        let (s, c) = y[1].sin_cos();
        (
            y[0] * self.phi.value(c) - self.p.a * s,
            self.p.a * y[0] + self.p.b * s,
        )
    }

    #[inline]
    fn field(&self, y: &State) -> State {
        let (n, d) = self.parts(y);
        let w = self.sigma * d;
        let (s, c) = y[1].sin_cos();
        [
            self.dir * w * c,
            self.dir * self.sigma * n,
            self.dir * w * s,
            self.dir * w,
        ]
    }

    fn gauge(&self, y: &State) -> f64 {
        gauge(self.p, y[0], y[1]) * self.sigma
    }

    /// Rate of change of `σD` along the field.
    fn wall_rate(&self, y: &State, f: &State) -> f64 {
        self.sigma * (self.p.a * f[0] + self.p.b * y[1].cos() * f[1])
    }

    fn sample(&self, y: &State) -> ProfileSample {
        let (n, d) = self.parts(y);
        ProfileSample::interior(y[3], y[0], y[2], y[1], n / d, self.p, self.phi)
    }
}

/// Signed distance to the singular curve, normalized by the size of its terms.
fn gauge(p: &Params, x: f64, theta: f64) -> f64 {
    let sin = theta.sin();
    let scale = p.a.abs() * x.abs() + p.b.abs() * sin.abs();
    if scale == 0.0 {
        return 1.0;
    }
    (p.a * x + p.b * sin) / scale
}

struct Bracket {
    h_lo: f64,
    lo: State,
    h_hi: f64,
    hi: State,
}

fn close(a: &State, b: &State) -> bool {
    (a[0] - b[0]).abs() < EVENT_TOL
        && (a[1] - b[1]).abs() < EVENT_TOL
        && (a[3] - b[3]).abs() < EVENT_TOL
}

/// Bisects the step size for the first point where `pred` holds, given that
/// it fails at `y0` and holds at the full step.
fn bisect<F: Fn(&State) -> State, P: Fn(&State) -> bool>(
    field: &F,
    y0: &State,
    f0: &State,
    h: f64,
    y1: &State,
    pred: P,
) -> Bracket {
    let mut b = Bracket {
        h_lo: 0.0,
        lo: *y0,
        h_hi: h,
        hi: *y1,
    };
    for _ in 0..MAX_BISECTIONS {
        if close(&b.lo, &b.hi) {
            break;
        }
        let mid = 0.5 * (b.h_lo + b.h_hi);
        if mid <= b.h_lo || mid >= b.h_hi {
            break;
        }
        let ym = dopri_step(field, y0, f0, mid).y;
        if pred(&ym) {
            b.h_hi = mid;
            b.hi = ym;
        } else {
            b.h_lo = mid;
            b.lo = ym;
        }
    }
    b
}

/// Position along `a → b` where a linear function with values `fa`, `fb`
/// vanishes, applied to every state component.
fn linear_zero(a: &State, b: &State, fa: f64, fb: f64) -> State {
    if fa == fb {
        return *b;
    }
    let t = fa / (fa - fb);
    let mut out = [0.0; DIM];
    for i in 0..DIM {
        out[i] = a[i] + t * (b[i] - a[i]);
    }
    out
}

/// Axis limit of an orthogonal approach once inside [`CORNER_RADIUS`].
///
/// Near `(0, kπ)` the angle is odd in `x`, so extrapolating along the local
/// slope `dθ/dx = κ₁ / cos θ` is accurate to `O(x³)`.
fn corner_limit(sys: &System<'_>, y: &State, y1: &State) -> Option<State> {
    let (x, theta) = (y1[0], y1[1]);
    if !(x <= CORNER_RADIUS && x < y[0]) {
        return None;
    }
    let k = (theta / PI).round();
    if (theta - k * PI).abs() > 100.0 * CORNER_RADIUS {
        return None;
    }
    let (n, d) = sys.parts(y1);
    let cos = theta.cos();
    let lim_theta = theta - x * (n / d) / cos;
    if (lim_theta - k * PI).abs() > ORTHOGONAL_TOL {
        return None;
    }
    let ds = x / cos.abs();
    Some([
        0.0,
        k * PI,
        y1[2] + sys.dir * ds * theta.sin(),
        y1[3] + sys.dir * ds,
    ])
}

/// Limit point of an orbit from its last two states, and the kind of end.
fn classify_end(
    p: &Params,
    prev: &State,
    last: &State,
) -> Result<(EndpointKind, State), IntegrateError> {
    let axis = last[0] <= 10.0 * EPS_AXIS && last[0] <= prev[0];
    let wall = gauge(p, last[0], last[1]).abs() <= TOUCH_TOL;
    if wall && last[0] <= CORNER_BOX && last[1].sin().abs() <= CORNER_BOX {
        // The singular curve meets the axis only at `θ = kπ`.
        let mut lim = if prev[0] > last[0] {
            linear_zero(prev, last, prev[0], last[0])
        } else {
            *last
        };
        let k = (lim[1] / PI).round();
        if (lim[1] - k * PI).abs() > ORTHOGONAL_TOL {
            return Err(IntegrateError::Ambiguous {
                x: last[0],
                theta: last[1],
            });
        }
        lim[0] = 0.0;
        lim[1] = k * PI;
        return Ok((EndpointKind::AxisOrthogonal { theta: k * PI }, lim));
    }
    match (axis, wall) {
        (true, true) => Err(IntegrateError::Ambiguous {
            x: last[0],
            theta: last[1],
        }),
        (true, false) => {
            let lim = linear_zero(prev, last, prev[0], last[0]);
            let theta = lim[1];
            let k = (theta / PI).round();
            let kind = if (theta - k * PI).abs() <= ORTHOGONAL_TOL {
                EndpointKind::AxisOrthogonal { theta: k * PI }
            } else {
                EndpointKind::AxisCusp { theta }
            };
            let mut lim = lim;
            lim[0] = 0.0;
            if let EndpointKind::AxisOrthogonal { theta } = kind {
                lim[1] = theta;
            }
            Ok((kind, lim))
        }
        (false, true) => {
            let da = p.denominator(prev[0], prev[1]);
            let db = p.denominator(last[0], last[1]);
            let lim = if close(prev, last) {
                *last
            } else {
                linear_zero(prev, last, da, db)
            };
            let theta = lim[1];
            let x = -p.b * theta.sin() / p.a;
            let mut lim = lim;
            lim[0] = x;
            Ok((EndpointKind::SingularCircle { theta, x }, lim))
        }
        (false, false) => Err(IntegrateError::NoEndpoint),
    }
}

/// Identifies the endpoint an orbit is converging to from its last samples.
///
/// Near the axis the limit angle is extrapolated linearly in `x`; near the
/// singular curve the limit is extrapolated linearly in `a x + b sin θ`.
pub fn detect_endpoint(
    trail: &[ProfileSample],
    p: &Params,
    _phi: &PrescribedFunction,
) -> Result<EndpointKind, IntegrateError> {
    let n = trail.len();
    if n == 0 {
        return Err(IntegrateError::NoEndpoint);
    }
    let to_state = |s: &ProfileSample| [s.x, s.theta, s.z, s.s];
    let last = to_state(&trail[n - 1]);
    let prev = if n >= 2 {
        to_state(&trail[n - 2])
    } else {
        last
    };
    classify_end(p, &prev, &last).map(|(kind, _)| kind)
}

/// Rejects parabolic and mixed data.
pub fn check_character(
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<CharacterKind, IntegrateError> {
    let ch = pde_character(p, phi);
    match ch.kind {
        CharacterKind::Elliptic | CharacterKind::Hyperbolic => Ok(ch.kind),
        kind => Err(IntegrateError::CharacterViolation {
            kind,
            min: ch.min,
            max: ch.max,
        }),
    }
}

enum Terminal {
    Wall(Bracket),
    Corner(State),
    Touch(State),
    Axis(Bracket),
    Line {
        at: State,
        theta: f64,
        periodic: bool,
    },
    Budget(State),
}

struct Seed {
    x: f64,
    theta: f64,
    /// Sign of `dθ/dτ` at the seed; zero disables periodic detection.
    theta_dir: f64,
}

/// Integrates from `start` in one direction until a terminal event.
pub fn integrate(
    start: StartPoint,
    direction: Direction,
    p: &Params,
    phi: &PrescribedFunction,
    opts: &IntegratorOptions,
) -> Result<Orbit, IntegrateError> {
    check_character(p, phi)?;

    let (y0, dir, head, start_kind) = initial_state(start, direction, p, phi)?;
    let d0 = p.denominator(y0[0], y0[1]);
    if d0 == 0.0 {
        return Err(IntegrateError::InvalidStart {
            reason: "start lies on the singular curve".into(),
        });
    }
    let sys = System {
        p,
        phi,
        sigma: d0.signum(),
        dir: dir.sign(),
    };
    let field = |y: &State| sys.field(y);
    let f_seed = field(&y0);
    let seed = Seed {
        x: y0[0],
        theta: y0[1],
        theta_dir: match start {
            StartPoint::Phase(_) if f_seed[1] != 0.0 => f_seed[1].signum(),
            _ => 0.0,
        },
    };
    let periodic = opts.stops.contains(&Stop::PeriodicReturn);

    let mut states: Vec<State> = vec![y0];
    let mut crossings = Vec::new();
    let mut notes = Vec::new();
    let mut y = y0;
    let mut f = f_seed;
    let mut tau = 0.0f64;
    let rate = |y: &State| {
        let (n, d) = sys.parts(y);
        d.abs().max(n.abs()).max(1e-300)
    };
    let mut h = opts.fixed_step.unwrap_or(opts.h_max / rate(&y0));
    let mut steps = 0usize;

    let terminal = loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(IntegrateError::StepLimit { steps: MAX_STEPS });
        }
        if opts.fixed_step.is_none() {
            h = h.min(opts.h_max / rate(&y));
        }
        let st = dopri_step(&field, &y, &f, h);
        if opts.fixed_step.is_none() {
            let err = error_norm(&y, &st.y, &st.err, opts.rtol, opts.atol);
            if !(err <= 1.0) {
                let fac = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).max(0.2)
                } else {
                    0.2
                };
                h *= fac;
                if h < 1e-14 * (1.0 + tau.abs()) {
                    return Err(IntegrateError::StepUnderflow {
                        s: y[3],
                        x: y[0],
                        theta: y[1],
                        h,
                    });
                }
                continue;
            }
        }
        let y1 = st.y;
        if y1.iter().any(|v| !v.is_finite()) {
            return Err(IntegrateError::NonFinite { s: y[3] });
        }

        let mut events: Vec<(f64, Terminal)> = Vec::new();

        // Past the axis the gauge changes sign without meeting the curve.
        let at_wall = |q: &State| q[0] > EPS_AXIS && sys.gauge(q) <= WALL_TOL;
        if at_wall(&y1) {
            let b = bisect(&field, &y, &f, h, &y1, at_wall);
            events.push((b.h_hi, Terminal::Wall(b)));
        } else {
            let r0 = sys.wall_rate(&y, &f);
            let r1 = sys.wall_rate(&y1, &st.f_new);
            if r0 < 0.0 && r1 > 0.0 {
                let b = bisect(&field, &y, &f, h, &y1, |q| {
                    sys.wall_rate(q, &field(q)) >= 0.0
                });
                if sys.gauge(&b.hi) <= TOUCH_TOL {
                    events.push((b.h_hi, Terminal::Touch(b.hi)));
                }
            }
        }

        if let Some(lim) = corner_limit(&sys, &y, &y1) {
            events.push((h, Terminal::Corner(lim)));
        }

        if y1[0] <= EPS_AXIS && y1[0] < y[0] {
            let b = bisect(&field, &y, &f, h, &y1, |q| q[0] <= EPS_AXIS);
            events.push((b.h_hi, Terminal::Axis(b)));
        }

        if (y1[3] - head).abs() >= opts.s_max {
            let b = bisect(&field, &y, &f, h, &y1, |q| {
                (q[3] - head).abs() >= opts.s_max
            });
            events.push((b.h_hi, Terminal::Budget(b.hi)));
        }

        let mut lines = lines_between(y[1], y1[1]);
        if periodic && seed.theta_dir != 0.0 {
            for l in section_lines_between(seed.theta, y[1], y1[1]) {
                if !lines.iter().any(|m| (m - l).abs() < 1e-12) {
                    lines.push(l);
                }
            }
        }
        let mut pending = Vec::new();
        for l in lines {
            let side = (y[1] - l).signum();
            let b = bisect(&field, &y, &f, h, &y1, |q| (q[1] - l).signum() != side);
            let at = linear_zero(&b.lo, &b.hi, b.lo[1] - l, b.hi[1] - l);
            let mut at = at;
            at[1] = l;
            let theta_dir = (y1[1] - y[1]).signum();
            let k = (l / FRAC_PI_2).round();
            let on_grid = (l - k * FRAC_PI_2).abs() < 1e-12;
            let stop_line = opts
                .stops
                .iter()
                .any(|s| matches!(s, Stop::Line(a) if same_angle(*a, l)));
            let returned = periodic
                && seed.theta_dir != 0.0
                && same_angle(l, seed.theta)
                && (at[0] - seed.x).abs() <= RETURN_TOL * (1.0 + seed.x)
                && theta_dir == seed.theta_dir;
            if on_grid {
                pending.push((
                    b.h_hi,
                    Crossing {
                        s: at[3],
                        x: at[0],
                        z: at[2],
                        theta: l,
                        k: k as i64,
                        theta_direction: (theta_dir * sys.dir) as i8,
                    },
                ));
            }
            if stop_line || returned {
                events.push((
                    b.h_hi,
                    Terminal::Line {
                        at,
                        theta: l,
                        periodic: returned && !stop_line,
                    },
                ));
            }
        }

        let first = events
            .into_iter()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let cutoff = first.as_ref().map_or(f64::INFINITY, |e| e.0);
        pending.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        crossings.extend(pending.into_iter().filter(|c| c.0 <= cutoff).map(|c| c.1));

        if let Some((_, t)) = first {
            break t;
        }

        states.push(y1);
        tau += h;
        y = y1;
        f = st.f_new;
        if opts.fixed_step.is_none() {
            let err = error_norm(
                &states[states.len() - 2],
                &y1,
                &st.err,
                opts.rtol,
                opts.atol,
            );
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        }
    };

    let mut samples: Vec<ProfileSample> = Vec::with_capacity(states.len() + 2);
    if let Some(s) = &start_kind.1 {
        samples.push(*s);
    }
    samples.extend(states.iter().map(|q| sys.sample(q)));

    let end = match terminal {
        Terminal::Wall(b) => {
            let keep = if sys.gauge(&b.hi) > 0.0 { b.hi } else { b.lo };
            if keep == *states.last().expect("non-empty") {
                samples.pop();
            }
            samples.push(ProfileSample::singular(
                keep[3], keep[0], keep[2], keep[1], p, phi,
            ));
            let (kind, _) = classify_end(p, &b.lo, &b.hi)?;
            notes.push("singular-curve limit extrapolated linearly in a·x + b·sin θ".to_string());
            kind
        }
        Terminal::Touch(at) => {
            if at == *states.last().expect("non-empty") {
                samples.pop();
            }
            samples.push(ProfileSample::singular(at[3], at[0], at[2], at[1], p, phi));
            let theta = at[1];
            notes.push("orbit touches the singular curve tangentially".to_string());
            EndpointKind::SingularCircle {
                theta,
                x: -p.b * theta.sin() / p.a,
            }
        }
        Terminal::Corner(lim) => {
            let last = samples.last().expect("non-empty");
            let kappa1 = umbilic_near(lim[1], last.kappa1, p, phi);
            samples.push(ProfileSample::on_axis(
                lim[3], lim[2], lim[1], kappa1, true, p, phi,
            ));
            notes.push("orthogonal axis limit extrapolated along the local slope".to_string());
            EndpointKind::AxisOrthogonal { theta: lim[1] }
        }
        Terminal::Axis(b) => {
            if b.lo != *states.last().expect("non-empty") {
                samples.push(sys.sample(&b.lo));
            }
            let (kind, lim) = classify_end(p, &b.lo, &b.hi)?;
            let last = samples.last().expect("non-empty");
            let (kappa1, orthogonal) = match kind {
                EndpointKind::AxisOrthogonal { .. } => {
                    (umbilic_near(lim[1], last.kappa1, p, phi), true)
                }
                _ => (-p.a / p.b, false),
            };
            samples.push(ProfileSample::on_axis(
                lim[3], lim[2], lim[1], kappa1, orthogonal, p, phi,
            ));
            notes.push("axis limit angle extrapolated linearly in x".to_string());
            kind
        }
        Terminal::Line {
            at,
            theta,
            periodic,
        } => {
            samples.push(sys.sample(&at));
            if periodic {
                EndpointKind::PeriodicReturn { x: at[0], theta }
            } else {
                EndpointKind::LineCrossing { theta, x: at[0] }
            }
        }
        Terminal::Budget(at) => {
            samples.push(sys.sample(&at));
            EndpointKind::Truncated { s: at[3] }
        }
    };

    let begin = start_kind.0;
    let closed = matches!(end, EndpointKind::PeriodicReturn { .. });
    let (start_end, finish_end) = if sys.dir > 0.0 {
        (begin, end)
    } else {
        samples.reverse();
        crossings.reverse();
        (end, begin)
    };
    Ok(Orbit {
        params: *p,
        phi: phi.source().to_string(),
        samples,
        start_end,
        finish_end,
        crossings,
        closed,
        notes,
    })
}

/// Starting state, effective direction, starting arc length, and the start
/// endpoint with an optional axis sample preceding the first state.
#[allow(clippy::type_complexity)]
fn initial_state(
    start: StartPoint,
    direction: Direction,
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<(State, Direction, f64, (EndpointKind, Option<ProfileSample>)), IntegrateError> {
    match start {
        StartPoint::Phase(pt) => Ok((
            [pt.x, pt.theta, 0.0, 0.0],
            direction,
            0.0,
            (
                EndpointKind::Seed {
                    x: pt.x,
                    theta: pt.theta,
                },
                None,
            ),
        )),
        StartPoint::Axis { theta } => {
            let (sin, cos) = theta.sin_cos();
            if !theta.is_finite() {
                return Err(IntegrateError::InvalidStart {
                    reason: format!("non-finite axis angle {theta}"),
                });
            }
            // A vertical tangent leaves the axis either way; otherwise only
            // one direction increases x.
            let dir = if cos.abs() < 1e-12 {
                direction
            } else if cos > 0.0 {
                Direction::Forward
            } else {
                Direction::Backward
            };
            let k = (theta / PI).round();
            if (theta - k * PI).abs() <= ORTHOGONAL_TOL {
                let theta = k * PI;
                let y = theta.cos();
                let Some((kappa, _)) = umbilic_curvatures(theta, p, phi) else {
                    return Err(IntegrateError::InvalidStart {
                        reason: "no umbilic curvature at the axis for hyperbolic data".into(),
                    });
                };
                let s = dir.sign() * AXIS_SERIES_STEP;
                let x = y * s;
                let th = theta + kappa * s;
                let z = y * kappa * s * s / 2.0;
                let axis = ProfileSample::on_axis(0.0, 0.0, theta, kappa, true, p, phi);
                Ok((
                    [x, th, z, s],
                    dir,
                    0.0,
                    (EndpointKind::AxisOrthogonal { theta }, Some(axis)),
                ))
            } else {
                if sin == 0.0 {
                    return Err(IntegrateError::InvalidStart {
                        reason: "degenerate axis start".into(),
                    });
                }
                Ok((
                    [0.0, theta, 0.0, 0.0],
                    dir,
                    0.0,
                    (EndpointKind::AxisCusp { theta }, None),
                ))
            }
        }
    }
}

/// Lines `kπ/2` strictly crossed from `t0` to `t1` (a start on a line does
/// not count).
fn lines_between(t0: f64, t1: f64) -> Vec<f64> {
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let k0 = (lo / FRAC_PI_2).floor() as i64;
    let k1 = (hi / FRAC_PI_2).ceil() as i64;
    (k0..=k1)
        .map(|k| k as f64 * FRAC_PI_2)
        .filter(|&l| crossed(t0, t1, l))
        .collect()
}

fn section_lines_between(seed: f64, t0: f64, t1: f64) -> Vec<f64> {
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let m0 = ((lo - seed) / TAU).floor() as i64;
    let m1 = ((hi - seed) / TAU).ceil() as i64;
    (m0..=m1)
        .map(|m| seed + m as f64 * TAU)
        .filter(|&l| crossed(t0, t1, l))
        .collect()
}

/// Roots of `b κ² + 2a κ = φ(cos θ)`, the curvature of an umbilic axis
/// point. The first root stays bounded as `b → 0`.
pub fn umbilic_curvatures(theta: f64, p: &Params, phi: &PrescribedFunction) -> Option<(f64, f64)> {
    let phi_y = phi.value(theta.cos());
    let disc = p.a * p.a + p.b * phi_y;
    if disc < 0.0 {
        return None;
    }
    let q = p.a + p.a.signum() * disc.sqrt();
    Some((phi_y / q, -q / p.b))
}

/// The umbilic curvature closest to `estimate`, or `estimate` itself when
/// there is none.
fn umbilic_near(theta: f64, estimate: f64, p: &Params, phi: &PrescribedFunction) -> f64 {
    match umbilic_curvatures(theta, p, phi) {
        Some((k0, k1)) if (k1 - estimate).abs() < (k0 - estimate).abs() => k1,
        Some((k0, _)) => k0,
        None => estimate,
    }
}

fn crossed(t0: f64, t1: f64, l: f64) -> bool {
    t0 != l && (t0 - l) * (t1 - l) <= 0.0
}

/// Integrates both ways from a seed and joins the two halves. When the
/// forward half closes up, the backward half is skipped.
pub fn integrate_full(
    start: PhasePoint,
    p: &Params,
    phi: &PrescribedFunction,
    opts: &IntegratorOptions,
) -> Result<Orbit, IntegrateError> {
    let fwd = integrate(StartPoint::Phase(start), Direction::Forward, p, phi, opts)?;
    if fwd.closed {
        return Ok(fwd);
    }
    let bwd = integrate(StartPoint::Phase(start), Direction::Backward, p, phi, opts)?;
    Ok(join(bwd, fwd))
}

/// Concatenates a backward orbit ending at the seed with a forward orbit
/// starting there.
pub fn join(bwd: Orbit, fwd: Orbit) -> Orbit {
    let mut samples = bwd.samples;
    samples.extend(fwd.samples.into_iter().skip(1));
    let mut crossings = bwd.crossings;
    crossings.extend(fwd.crossings);
    let mut notes = bwd.notes;
    for n in fwd.notes {
        if !notes.contains(&n) {
            notes.push(n);
        }
    }
    Orbit {
        params: fwd.params,
        phi: fwd.phi,
        samples,
        start_end: bwd.start_end,
        finish_end: fwd.finish_end,
        crossings,
        closed: false,
        notes,
    }
}

/// The section through which returns are measured: `θ = π/2`, or `3π/2`
/// when `aφ(0) < 0`.
pub fn section_angle(p: &Params, phi: &PrescribedFunction) -> f64 {
    if p.a * phi.value(0.0) > 0.0 {
        FRAC_PI_2
    } else {
        3.0 * FRAC_PI_2
    }
}

/// Next crossing of the section after leaving `(x0, section)`, following
/// the orbit forward. Absent when another terminal event comes first.
pub fn poincare_return(
    x0: f64,
    p: &Params,
    phi: &PrescribedFunction,
) -> Result<Option<f64>, IntegrateError> {
    poincare_return_with(x0, p, phi, &IntegratorOptions::default())
}

pub fn poincare_return_with(
    x0: f64,
    p: &Params,
    phi: &PrescribedFunction,
    opts: &IntegratorOptions,
) -> Result<Option<f64>, IntegrateError> {
    let section = section_angle(p, phi);
    let pt = PhasePoint::new(x0, section, p).map_err(|e| IntegrateError::InvalidStart {
        reason: e.to_string(),
    })?;
    let (n, d) = crate::geometry::theta_prime_parts(x0, section, p, phi);
    if (n / d).abs() <= 1e-12 {
        return Ok(Some(x0));
    }
    let opts = IntegratorOptions {
        stops: vec![Stop::Line(section)],
        ..opts.clone()
    };
    let orbit = integrate(StartPoint::Phase(pt), Direction::Forward, p, phi, &opts)?;
    Ok(match orbit.finish_end {
        EndpointKind::LineCrossing { x, .. } => Some(x),
        _ => None,
    })
}
