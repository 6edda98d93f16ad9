//! Curvature-sign and height signatures read off an integrated orbit.

use serde::Serialize;

use crate::integrate::Orbit;

/// `|K|` at or below this is treated as zero.
pub const ZERO_GAUSS: f64 = 1e-10;
/// `|sin θ|` at or below this does not count against monotonicity.
pub const ZERO_SLOPE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussSign {
    Positive,
    Negative,
    Changes,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroCause {
    /// `κ₁ = 0`: the orbit crosses the nullcline.
    Gamma,
    /// `κ₂ = 0`: the orbit crosses a line `θ = kπ`.
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignChange {
    pub s: f64,
    pub x: f64,
    pub theta: f64,
    pub cause: ZeroCause,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussProfile {
    /// Signs of `K` along increasing `s`, consecutive repeats merged.
    pub pattern: Vec<i8>,
    pub changes: Vec<SignChange>,
    pub overall: GaussSign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightProfile {
    pub monotone: bool,
    /// Points where `z' = sin θ` vanishes, at crossings of `θ = kπ`.
    pub extrema: Vec<(f64, f64, f64)>,
}

pub fn gauss_sign_profile(o: &Orbit) -> GaussProfile {
    let mut pattern: Vec<i8> = Vec::new();
    let mut changes = Vec::new();
    let mut prev: Option<(i8, f64)> = None;
    for s in o
        .samples
        .iter()
        .filter(|s| s.x > 0.0 && s.gauss.is_finite())
    {
        if s.gauss.abs() <= ZERO_GAUSS {
            continue;
        }
        let sign = if s.gauss > 0.0 { 1 } else { -1 };
        if let Some((p, p_sin)) = prev {
            if p != sign {
                let cause = if p_sin * s.theta.sin() <= 0.0 {
                    ZeroCause::Line
                } else {
                    ZeroCause::Gamma
                };
                changes.push(SignChange {
                    s: s.s,
                    x: s.x,
                    theta: s.theta,
                    cause,
                });
            }
        }
        if pattern.last() != Some(&sign) {
            pattern.push(sign);
        }
        prev = Some((sign, s.theta.sin()));
    }
    let overall = match pattern.as_slice() {
        [] => GaussSign::Zero,
        [1] => GaussSign::Positive,
        [-1] => GaussSign::Negative,
        _ => GaussSign::Changes,
    };
    GaussProfile {
        pattern,
        changes,
        overall,
    }
}

pub fn height_monotonicity(o: &Orbit) -> HeightProfile {
    let n = o.samples.len();
    let interior = o
        .samples
        .iter()
        .enumerate()
        .filter(|(i, s)| *i > 0 && *i + 1 < n && s.x > 0.0);
    let (mut pos, mut neg) = (false, false);
    for (_, s) in interior {
        let v = s.theta.sin();
        if v > ZERO_SLOPE {
            pos = true;
        } else if v < -ZERO_SLOPE {
            neg = true;
        }
    }
    let extrema = o
        .crossings
        .iter()
        .filter(|c| c.k % 2 == 0)
        .map(|c| (c.s, c.x, c.theta))
        .collect();
    HeightProfile {
        monotone: !(pos && neg),
        extrema,
    }
}
