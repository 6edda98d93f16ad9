//! Profile-curve tables: one [`ProfileSample`] per CSV row.

use std::io;

use serde::Serialize;

use super::ExportError;
use crate::geometry::{weingarten_residual, Params, ProfileSample};
use crate::phi::PrescribedFunction;

pub const COLUMNS: [&str; 10] = [
    "s", "x", "z", "theta", "kappa1", "kappa2", "mean", "gauss", "angle_fn", "residual",
];
/// Default bound on the recomputed residual.
pub const VERIFY_TOL: f64 = 1e-5;

fn cell(v: f64) -> String {
    // 17 significant digits round-trip every f64.
    format!("{v:.16e}")
}

fn row(s: &ProfileSample) -> [String; 10] {
    [
        s.s, s.x, s.z, s.theta, s.kappa1, s.kappa2, s.mean, s.gauss, s.angle_fn, s.residual,
    ]
    .map(cell)
}

pub fn write_profile_csv<W: io::Write>(samples: &[ProfileSample], w: W) -> Result<(), ExportError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(COLUMNS)?;
    for s in samples {
        out.write_record(row(s))?;
    }
    out.flush()?;
    Ok(())
}

pub fn profile_csv(samples: &[ProfileSample]) -> String {
    let mut buf = Vec::new();
    write_profile_csv(samples, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn read_profile_csv<R: io::Read>(r: R) -> Result<Vec<ProfileSample>, ExportError> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(ExportError::Header { found: header });
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let mut v = [0.0; 10];
        for (j, field) in rec.iter().enumerate() {
            v[j] = field.trim().parse().map_err(|_| ExportError::Field {
                row: i + 1,
                column: COLUMNS[j],
                value: field.to_string(),
            })?;
        }
        out.push(ProfileSample {
            s: v[0],
            x: v[1],
            z: v[2],
            theta: v[3],
            kappa1: v[4],
            kappa2: v[5],
            mean: v[6],
            gauss: v[7],
            angle_fn: v[8],
            residual: v[9],
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: usize,
    pub checked: usize,
    /// Cusp rows and rows with non-finite data carry no residual.
    pub skipped: usize,
    pub max_residual: f64,
    pub worst_s: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

/// `2aH + bK − φ(cos θ)` rebuilt from `x`, `θ` and `κ₁` alone.
pub fn recomputed_residual(s: &ProfileSample, p: &Params, phi: &PrescribedFunction) -> Option<f64> {
    if !(s.x.is_finite() && s.theta.is_finite() && s.kappa1.is_finite()) {
        return None;
    }
    let r = if s.x > 0.0 {
        weingarten_residual(s, p, phi).ok()?
    } else if s.kappa2.is_finite() {
        // Orthogonal axis point: both principal curvatures agree.
        let k = s.kappa1;
        2.0 * p.a * k + p.b * k * k - phi.value(s.theta.cos())
    } else {
        return None;
    };
    r.is_finite().then_some(r)
}

pub fn verify_samples(
    samples: &[ProfileSample],
    p: &Params,
    phi: &PrescribedFunction,
    tol: f64,
) -> VerifyReport {
    let mut checked = 0;
    let mut worst = (0.0f64, None);
    for s in samples {
        if let Some(r) = recomputed_residual(s, p, phi) {
            checked += 1;
            if r.abs() > worst.0 || worst.1.is_none() {
                worst = (worst.0.max(r.abs()), Some(s.s));
            }
        }
    }
    VerifyReport {
        rows: samples.len(),
        checked,
        skipped: samples.len() - checked,
        max_residual: worst.0,
        worst_s: worst.1,
        tol,
        passed: checked > 0 && worst.0 <= tol,
    }
}
