//! Phase portraits in the `(x, θ)` strip as SVG.
//!
//! Output depends only on the inputs: elements are emitted in a fixed order
//! and every coordinate is printed with three decimals.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{orbit_for_seed, Seed};
use crate::geometry::Params;
use crate::integrate::{IntegratorOptions, Orbit};
use crate::phase::{equilibrium, nullcline, reduce_angle, singular_curve};
use crate::phi::PrescribedFunction;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const CURVE_SAMPLES: usize = 721;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone, Serialize)]
pub struct Portrait {
    pub svg: String,
    pub warnings: Vec<String>,
}

struct Frame {
    x_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + x / self.x_max * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, theta: f64) -> f64 {
        HEIGHT - MARGIN - theta / TAU * (HEIGHT - 2.0 * MARGIN)
    }

    fn inside(&self, x: f64) -> bool {
        x.is_finite() && (0.0..=self.x_max).contains(&x)
    }
}

/// Integrates every seed and draws the result. Seeds that fail are listed
/// as warnings and annotated on the picture.
pub fn render_phase_portrait(
    p: &Params,
    phi: &PrescribedFunction,
    seeds: &[Seed],
    opts: &IntegratorOptions,
) -> Portrait {
    let results: Vec<_> = seeds
        .par_iter()
        .map(|s| orbit_for_seed(p, phi, *s, opts))
        .collect();
    let mut orbits = Vec::new();
    let mut warnings = Vec::new();
    for (seed, r) in seeds.iter().zip(results) {
        match r {
            Ok(o) => orbits.push(o),
            Err(e) => warnings.push(format!("seed {seed:?}: {e}")),
        }
    }
    Portrait {
        svg: render_orbits(p, phi, &orbits, &warnings),
        warnings,
    }
}

fn natural_scale(p: &Params, phi: &PrescribedFunction) -> f64 {
    let e0 = (p.a / phi.value(0.0)).abs();
    let s = (p.b / p.a).abs();
    2.0 * e0.max(s).max(0.5)
}

fn polyline(out: &mut String, pts: &[(f64, f64)], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let _ = write!(out, "<polyline fill=\"none\" {style} points=\"");
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.3},{y:.3}");
    }
    out.push_str("\"/>\n");
}

/// Splits a curve into drawable runs. A run breaks where the curve leaves
/// the frame or, when `wrap` is set, where `θ` jumps across `0 ≡ 2π`.
fn runs(
    f: &Frame,
    pts: impl Iterator<Item = (f64, f64)>,
    wrap: bool,
) -> (Vec<Vec<(f64, f64)>>, Vec<(f64, f64)>) {
    let mut runs = vec![Vec::new()];
    let mut wraps = Vec::new();
    let mut last: Option<f64> = None;
    for (x, theta) in pts {
        if !f.inside(x) || !theta.is_finite() {
            runs.push(Vec::new());
            last = None;
            continue;
        }
        let t = if wrap { reduce_angle(theta) } else { theta };
        if let Some(prev) = last {
            if (t - prev).abs() > PI {
                let cur = runs.last().expect("non-empty").last().copied();
                wraps.extend(cur);
                runs.push(Vec::new());
                wraps.push((f.px(x), f.py(t)));
            }
        }
        runs.last_mut().expect("non-empty").push((f.px(x), f.py(t)));
        last = Some(t);
    }
    runs.retain(|r| r.len() > 1);
    (runs, wraps)
}

fn sampled_curve(curve: impl Fn(f64) -> Option<f64>) -> impl Iterator<Item = (f64, f64)> {
    (0..CURVE_SAMPLES).map(move |i| {
        let theta = TAU * i as f64 / (CURVE_SAMPLES - 1) as f64;
        (curve(theta).filter(|x| *x > 0.0).unwrap_or(f64::NAN), theta)
    })
}

/// Draws already integrated orbits over the fixed curves of the plane.
pub fn render_orbits(
    p: &Params,
    phi: &PrescribedFunction,
    orbits: &[Orbit],
    warnings: &[String],
) -> String {
    let data_max = orbits
        .iter()
        .flat_map(|o| o.samples.iter().map(|s| s.x))
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max);
    let cap = 4.0 * natural_scale(p, phi);
    let f = Frame {
        x_max: (1.05 * data_max).max(natural_scale(p, phi)).min(cap),
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{MARGIN}\" y=\"30\" font-family=\"sans-serif\" font-size=\"14\">a = {}, b = {}, φ(y) = {}</text>",
        p.a,
        p.b,
        escape(phi.source())
    );

    // Frame and the lines θ = kπ/2.
    let (x0, x1) = (f.px(0.0), f.px(f.x_max));
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\"/>",
        f.py(TAU),
        x1 - x0,
        f.py(0.0) - f.py(TAU)
    );
    for (k, label) in [(1, "π/2"), (2, "π"), (3, "3π/2")] {
        let y = f.py(k as f64 * FRAC_PI_2);
        let _ = writeln!(
            out,
            "<line x1=\"{x0:.3}\" y1=\"{y:.3}\" x2=\"{x1:.3}\" y2=\"{y:.3}\" stroke=\"#cccccc\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{label}</text>",
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{x1:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">x = {:.3}</text>",
        f.py(0.0) + 20.0,
        f.x_max
    );

    // The singular curve and the nullcline.
    let (s_runs, _) = runs(&f, sampled_curve(|t| singular_curve(t, p)), false);
    for r in &s_runs {
        polyline(
            &mut out,
            r,
            "stroke=\"black\" stroke-dasharray=\"6,4\" class=\"singular\"",
        );
    }
    let (g_runs, _) = runs(&f, sampled_curve(|t| nullcline(t, p, phi)), false);
    for r in &g_runs {
        polyline(
            &mut out,
            r,
            "stroke=\"#555555\" stroke-dasharray=\"1,3\" class=\"nullcline\"",
        );
    }

    for (i, o) in orbits.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let (o_runs, wraps) = runs(&f, o.samples.iter().map(|s| (s.x, s.theta)), true);
        let style = format!("stroke=\"{colour}\" stroke-width=\"1.5\" class=\"orbit\"");
        for r in &o_runs {
            polyline(&mut out, r, &style);
        }
        for (x, y) in wraps {
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"none\" stroke=\"{colour}\" class=\"wrap\"/>"
            );
        }
    }

    if let Some(e0) = equilibrium(p, phi) {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"black\" class=\"equilibrium\"/>",
            f.px(e0.x),
            f.py(e0.theta)
        );
    }

    for (i, w) in warnings.iter().enumerate() {
        let _ = writeln!(
            out,
            "<text x=\"{MARGIN}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#b00000\" class=\"warning\">warning: {}</text>",
            HEIGHT - 30.0 + 12.0 * i as f64,
            escape(w)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
