//! Surfaces of revolution as polygon meshes.

use std::f64::consts::TAU;
use std::fmt::Write;

use serde::Serialize;

use super::ExportError;
use crate::geometry::ProfileSample;
use crate::integrate::EPS_AXIS;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub generator: String,
    pub segments: usize,
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, oriented so that the right-hand normal is
    /// the profile's unit normal `(−sin θ cos φ, −sin θ sin φ, cos θ)`.
    pub faces: Vec<Vec<usize>>,
}

enum Ring {
    Pole(usize),
    Circle(usize),
}

/// Rotates the profile about the `z`-axis with `segments` angular steps.
/// Samples on the axis collapse to a single vertex.
pub fn revolve(
    samples: &[ProfileSample],
    segments: usize,
    generator: &str,
) -> Result<Mesh, ExportError> {
    if segments < 3 {
        return Err(ExportError::Segments { segments });
    }
    let m = segments;
    let mut vertices = Vec::new();
    let mut rings = Vec::with_capacity(samples.len());
    for s in samples {
        if s.x <= EPS_AXIS {
            rings.push(Ring::Pole(vertices.len()));
            vertices.push([0.0, 0.0, s.z]);
        } else {
            rings.push(Ring::Circle(vertices.len()));
            for j in 0..m {
                let phi = TAU * j as f64 / m as f64;
                vertices.push([s.x * phi.cos(), s.x * phi.sin(), s.z]);
            }
        }
    }
    let mut faces = Vec::new();
    for pair in rings.windows(2) {
        for j in 0..m {
            let k = (j + 1) % m;
            match (&pair[0], &pair[1]) {
                (Ring::Circle(a), Ring::Circle(b)) => faces.push(vec![a + j, b + j, b + k, a + k]),
                (Ring::Pole(a), Ring::Circle(b)) => faces.push(vec![*a, b + j, b + k]),
                (Ring::Circle(a), Ring::Pole(b)) => faces.push(vec![a + j, *b, a + k]),
                (Ring::Pole(_), Ring::Pole(_)) => {}
            }
        }
    }
    Ok(Mesh {
        generator: generator.to_string(),
        segments: m,
        vertices,
        faces,
    })
}

/// `n` samples equally spaced in arc length. `x` and `z` use cubic Hermite
/// interpolation with the exact tangent `(cos θ, sin θ)`; the remaining
/// fields are interpolated linearly.
pub fn resample(samples: &[ProfileSample], n: usize) -> Vec<ProfileSample> {
    if samples.len() < 2 || n < 2 {
        return samples.to_vec();
    }
    let (s0, s1) = (samples[0].s, samples[samples.len() - 1].s);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    for k in 0..n {
        let s = if k + 1 == n {
            s1
        } else {
            s0 + (s1 - s0) * k as f64 / (n - 1) as f64
        };
        while i + 2 < samples.len() && samples[i + 1].s < s {
            i += 1;
        }
        let (a, b) = (&samples[i], &samples[i + 1]);
        let h = b.s - a.s;
        if h <= 0.0 {
            out.push(*a);
            continue;
        }
        let t = ((s - a.s) / h).clamp(0.0, 1.0);
        let hermite = |p0: f64, m0: f64, p1: f64, m1: f64| {
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * p0
                + (t3 - 2.0 * t2 + t) * h * m0
                + (-2.0 * t3 + 3.0 * t2) * p1
                + (t3 - t2) * h * m1
        };
        let lerp = |u: f64, v: f64| u + t * (v - u);
        out.push(ProfileSample {
            s,
            x: hermite(a.x, a.theta.cos(), b.x, b.theta.cos()).max(0.0),
            z: hermite(a.z, a.theta.sin(), b.z, b.theta.sin()),
            theta: lerp(a.theta, b.theta),
            kappa1: lerp(a.kappa1, b.kappa1),
            kappa2: lerp(a.kappa2, b.kappa2),
            mean: lerp(a.mean, b.mean),
            gauss: lerp(a.gauss, b.gauss),
            angle_fn: lerp(a.angle_fn, b.angle_fn),
            residual: lerp(a.residual, b.residual),
        });
    }
    out
}

/// Wavefront text with one-based indices.
pub fn to_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# generator {}", mesh.generator);
    let _ = writeln!(out, "# segments {}", mesh.segments);
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        out.push('f');
        for i in f {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}
