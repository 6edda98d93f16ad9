//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, Rng, SeedableRng};
use weingarten::classify::{
    classify, classify_options, find_x_infinity, find_x_plus, hyperbolic_classify, ClassifyError,
    Family,
};
use weingarten::export::verify_samples;
use weingarten::integrate::check_character;
use weingarten::phase::{equilibrium, first_integral_residual_raw, reflect, CharacterKind};
use weingarten::phi::{validate_allow_vanishing, Expr};
use weingarten::radial::{solve_radial, solve_radial_on, Orientation, RadialSolution};
use weingarten::{
    integrate, integrate_full, Direction, EndpointKind, IntegratorOptions, Orbit, Params,
    PhasePoint, PrescribedFunction, ProfileSample, StartPoint, Stop,
};

// Tolerances and budgets, one block per criterion.
const C1_TOL: f64 = 1e-9;
const C1_ARC: f64 = 10.0;
const C1_BUDGET: Duration = Duration::from_millis(100);
const C2_TOL: f64 = 1e-6;
const C2_BUDGET: Duration = Duration::from_secs(1);
const C3_TOL: f64 = 1e-8;
const C3_DELTA: f64 = 0.3;
const C4_ARC: f64 = 50.0;
const C4_REL_TOL: f64 = 1e-6;
const C5_TARGET: f64 = 0.25;
const C5_TOL: f64 = 1e-5;
const C6_TOL: f64 = 1e-6;
const C6_OFFSET: f64 = 1e-4;
const C6_BRACKET: f64 = 1e-6;
/// Seeds this close to `x∞` pass within the axis-touch tolerance of the
/// axis, so the class boundary may sit off `x∞` by this much.
const C6_BAND: f64 = 1e-5;
const C7_BUDGET: Duration = Duration::from_secs(30);
const C8_TOL: f64 = 1e-5;
const C9_CASES: usize = 100;
const C9_TOL: f64 = 1e-6;
const C9_SEED: u64 = 0x5eed_0009;
const C10_ODE_RATIO: f64 = 8.0;
/// Fixed pseudo-time steps; coarser steps misplace the axis endpoint by more
/// than the Runge–Kutta error and are not in the asymptotic range.
const C10_STEPS: [f64; 3] = [0.02, 0.01, 0.005];
const C10_GRID_RATIO: f64 = 3.5;

/// Everything an orbit needs to be re-verified by criterion 8.
struct Artifact {
    label: String,
    params: Params,
    phi: PrescribedFunction,
    samples: Vec<ProfileSample>,
}

#[derive(Default)]
struct Ledger {
    artifacts: Vec<Artifact>,
}

impl Ledger {
    fn keep(
        &mut self,
        label: impl Into<String>,
        p: &Params,
        phi: &PrescribedFunction,
        s: &[ProfileSample],
    ) {
        self.artifacts.push(Artifact {
            label: label.into(),
            params: *p,
            phi: phi.clone(),
            samples: s.to_vec(),
        });
    }

    fn keep_orbit(
        &mut self,
        label: impl Into<String>,
        p: &Params,
        phi: &PrescribedFunction,
        o: &Orbit,
    ) {
        self.keep(label, p, phi, &o.samples);
    }

    fn keep_radial(
        &mut self,
        label: impl Into<String>,
        p: &Params,
        phi: &PrescribedFunction,
        sol: &RadialSolution,
    ) {
        // The node on the axis carries no residual; the rest must solve the
        // equation like any orbit.
        self.keep(label, p, phi, &sol.profile(p, phi)[1..]);
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn params(a: f64, b: f64) -> Params {
    Params::new(a, b).unwrap()
}

fn constant(c: f64) -> PrescribedFunction {
    PrescribedFunction::constant(c).unwrap()
}

fn sphere_oracle_error(o: &Orbit) -> f64 {
    o.samples
        .iter()
        .map(|s| (s.x - s.theta.sin()).abs())
        .fold(0.0, f64::max)
}

fn c1_cylinder(l: &mut Ledger) -> Outcome {
    let (p, phi) = (params(1.0, 1.0), constant(3.0));
    let t = Instant::now();
    let e0 = equilibrium(&p, &phi).unwrap();
    let opts = IntegratorOptions::default().with_s_max(C1_ARC);
    let o = integrate(StartPoint::Phase(e0), Direction::Forward, &p, &phi, &opts).unwrap();
    let dt = t.elapsed();
    let dev = o
        .samples
        .iter()
        .map(|s| (s.x - e0.x).abs().max((s.theta - e0.theta).abs()))
        .fold(0.0, f64::max);
    let arc = o.arc_length();
    l.keep_orbit("cylinder", &p, &phi, &o);
    outcome(
        dev < C1_TOL && dt < C1_BUDGET && arc >= C1_ARC - 1e-9,
        format!(
            "e0 = ({:.6}, π/2), arc {arc:.3}, max deviation {dev:.1e} (tol {C1_TOL:.0e}), {dt:.1?} (budget {C1_BUDGET:?})",
            e0.x
        ),
    )
}

fn c2_sphere(l: &mut Ledger) -> Outcome {
    let (p, phi) = (params(1.0, 1.0), constant(3.0));
    let t = Instant::now();
    let seed = PhasePoint::new(1.0, FRAC_PI_2, &p).unwrap();
    let o = integrate_full(seed, &p, &phi, &IntegratorOptions::default()).unwrap();
    let x_plus = find_x_plus(&p, &phi).unwrap();
    let dt = t.elapsed();
    let err = sphere_oracle_error(&o);
    let ends_ok = matches!(o.start_end, EndpointKind::AxisOrthogonal { .. })
        && matches!(o.finish_end, EndpointKind::AxisOrthogonal { .. });
    let closed_form = (1.0 + (1.0f64 + 3.0).sqrt()) / 3.0;
    l.keep_orbit("sphere", &p, &phi, &o);
    outcome(
        err < C2_TOL && ends_ok && (x_plus - closed_form).abs() < C2_TOL && dt < C2_BUDGET,
        format!(
            "sup|x − sin θ| = {err:.1e} (tol {C2_TOL:.0e}), ends {:?}/{:?}, x₊ = {x_plus:.9} vs {closed_form}, {dt:.1?} (budget {C2_BUDGET:?})",
            o.start_end, o.finish_end
        ),
    )
}

fn c3_radial(l: &mut Ledger) -> Outcome {
    let (p, phi) = (params(1.0, 1.0), constant(3.0));
    let sol = solve_radial(&p, &phi, C3_DELTA, Orientation::Up).unwrap();
    let err = sol
        .grid
        .iter()
        .zip(&sol.u)
        .map(|(r, u)| (u - (1.0 - (1.0 - r * r).sqrt())).abs())
        .fold(0.0, f64::max);
    let ratio = sol.contraction.iter().copied().fold(0.0, f64::max);
    l.keep_radial("radial cap δ = 0.3", &p, &phi, &sol);
    outcome(
        err < C3_TOL && ratio < 1.0,
        format!(
            "n = {}, sup|u − cap| = {err:.1e} (tol {C3_TOL:.0e}), {} Picard steps, max contraction ratio {ratio:.2e}",
            sol.grid.len() - 1,
            sol.iterations
        ),
    )
}

fn c4_first_integral(l: &mut Ledger) -> Outcome {
    let p = params(1.0, 1.0);
    let opts = IntegratorOptions::default().with_s_max(C4_ARC);
    let mut worst = (0.0f64, String::new());
    let mut failures = Vec::new();
    let mut count = 0;
    for c in [3.0, 1.0, -1.5, -2.0, -3.0] {
        let phi = constant(c);
        let tol = C4_REL_TOL * (1.0 + c.abs());
        let mut starts: Vec<(String, StartPoint)> = Vec::new();
        for x in [0.2, 0.5, 0.8, 1.2, 1.5, 2.5] {
            for theta in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
                if let Ok(pt) = PhasePoint::new(x, theta, &p) {
                    starts.push((format!("({x}, {theta:.4})"), StartPoint::Phase(pt)));
                }
            }
        }
        for theta in [FRAC_PI_4, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4, 7.0 * FRAC_PI_4] {
            starts.push((format!("axis {theta:.4}"), StartPoint::Axis { theta }));
        }
        for (name, start) in starts {
            let run = match start {
                StartPoint::Phase(pt) => integrate_full(pt, &p, &phi, &opts),
                StartPoint::Axis { .. } => integrate(start, Direction::Forward, &p, &phi, &opts),
            };
            let o = match run {
                Ok(o) => o,
                Err(e) => {
                    failures.push(format!("c = {c}, {name}: {e}"));
                    continue;
                }
            };
            count += 1;
            let s0 = o.first();
            let dev = o
                .samples
                .iter()
                .map(|s| first_integral_residual_raw(s0.x, s0.theta, s.x, s.theta, &p, c).abs())
                .fold(0.0, f64::max);
            if dev / tol > worst.0 {
                worst = (dev / tol, format!("c = {c}, {name}: {dev:.1e}"));
            }
            if dev >= tol {
                failures.push(format!("c = {c}, {name}: drift {dev:.1e} ≥ {tol:.1e}"));
            }
            l.keep_orbit(format!("first integral c = {c}, {name}"), &p, &phi, &o);
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{count} orbits, worst drift/tol {:.2} at {}{}",
            worst.0,
            worst.1,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join("; "))
            }
        ),
    )
}

fn c5_vanishing_landmark(l: &mut Ledger) -> Outcome {
    let p = params(1.0, 1.0);
    let phi = validate_allow_vanishing(Expr::Const(0.0)).unwrap();
    let opts = IntegratorOptions::default().with_stop(Stop::Line(3.0 * FRAC_PI_2));
    let o = integrate(
        StartPoint::Axis {
            theta: 7.0 * FRAC_PI_4,
        },
        Direction::Forward,
        &p,
        &phi,
        &opts,
    )
    .unwrap();
    l.keep_orbit("vanishing φ from the axis at 7π/4", &p, &phi, &o);
    match o.finish_end {
        EndpointKind::LineCrossing { x, theta } => outcome(
            (x - C5_TARGET).abs() < C5_TOL,
            format!("crosses θ = {theta:.6} at x = {x:.9} (target {C5_TARGET} ± {C5_TOL:.0e})"),
        ),
        other => outcome(
            false,
            format!("no crossing of 3π/2, orbit ends at {other:?}"),
        ),
    }
}

fn c6_hyperbolic(l: &mut Ledger) -> Outcome {
    let p = params(1.0, 1.0);
    let phi = constant(-1.5);
    let mut notes = Vec::new();
    let mut ok = true;

    let xi = find_x_infinity(&p, &phi).unwrap();
    ok &= (xi - 4.0 / 3.0).abs() < C6_TOL;
    notes.push(format!("x∞ = {xi:.9}"));

    let family = |x0: f64, l: &mut Ledger| -> Result<Family, ClassifyError> {
        let r = hyperbolic_classify(&p, &phi, x0)?;
        l.keep_orbit(
            format!("hyperbolic φ ≡ −1.5, x₀ = {x0}"),
            &p,
            &phi,
            &r.classification.orbit,
        );
        Ok(r.classification.class.family)
    };
    let below = family(4.0 / 3.0 - C6_OFFSET, l);
    let above = family(4.0 / 3.0 + C6_OFFSET, l);
    ok &= below == Ok(Family::H42CuspSphereLike) && above == Ok(Family::H4NodoidComplete);
    notes.push(format!(
        "4/3 ∓ {C6_OFFSET:.0e}: {} / {}",
        below.map_or_else(|e| e.to_string(), |f| f.to_string()),
        above.map_or_else(|e| e.to_string(), |f| f.to_string())
    ));

    // Bisection on the classification itself.
    let (mut lo, mut hi) = (1.2, 1.5);
    while hi - lo >= C6_BRACKET {
        let mid = 0.5 * (lo + hi);
        match hyperbolic_classify(&p, &phi, mid).map(|r| r.classification.class.family) {
            Ok(Family::H42CuspSphereLike) => lo = mid,
            Ok(Family::H4NodoidComplete) => hi = mid,
            other => {
                ok = false;
                notes.push(format!("bisection hit {other:?} at {mid}"));
                break;
            }
        }
    }
    let offset = 0.5 * (lo + hi) - 4.0 / 3.0;
    ok &= offset.abs() < C6_BAND && hi - lo < C6_BRACKET;
    notes.push(format!(
        "class bracket [{lo:.9}, {hi:.9}] width {:.1e} (< {C6_BRACKET:.0e}), offset from 4/3 {offset:.1e} (band {C6_BAND:.0e})",
        hi - lo
    ));

    for c in [-2.0, -3.0] {
        let phi = constant(c);
        match find_x_infinity(&p, &phi) {
            Err(ClassifyError::NoCrossing { limit }) => {
                let expected = match limit {
                    EndpointKind::SingularCircle { x, theta } if c == -2.0 => {
                        (x - 1.0).abs() < 1e-3 && (theta - 3.0 * FRAC_PI_2).abs() < 1e-2
                    }
                    EndpointKind::SingularCircle { .. } => true,
                    _ => false,
                };
                ok &= expected;
                notes.push(format!("φ ≡ {c}: NoCrossing, limit {limit:?}"));
            }
            other => {
                ok = false;
                notes.push(format!("φ ≡ {c}: expected NoCrossing, got {other:?}"));
            }
        }
    }

    let phi = constant(-3.0);
    let mut all_h4 = true;
    for x0 in [1.05, 1.2, 1.5, 2.0, 3.0, 5.0] {
        let r = hyperbolic_classify(&p, &phi, x0);
        match &r {
            Ok(r) => {
                all_h4 &= r.classification.class.family == Family::H4NodoidComplete;
                l.keep_orbit(
                    format!("hyperbolic φ ≡ −3, x₀ = {x0}"),
                    &p,
                    &phi,
                    &r.classification.orbit,
                );
            }
            Err(_) => all_h4 = false,
        }
    }
    ok &= all_h4;
    notes.push(format!("φ ≡ −3, x₀ ∈ (1, 5]: all H4 = {all_h4}"));
    outcome(ok, notes.join(", "))
}

/// Elliptic families allowed for `a > 0` and the sign of `b`, with the
/// topology that distinguishes the two tables.
fn allowed_elliptic(b: f64, family: Family, start: &EndpointKind, finish: &EndpointKind) -> bool {
    let cusps = matches!(start, EndpointKind::AxisCusp { .. })
        && matches!(finish, EndpointKind::AxisCusp { .. });
    let annulus = matches!(start, EndpointKind::SingularCircle { .. })
        && matches!(finish, EndpointKind::SingularCircle { .. });
    match family {
        Family::Cylinder | Family::Sphere | Family::Unduloid | Family::Nodoid => true,
        Family::E15CuspMonotone => cusps,
        Family::E16AnnulusMonotone => annulus,
        Family::E17NonMonotone => (b > 0.0 && annulus) || (b < 0.0 && cusps),
        Family::E18KSignChange => (b > 0.0 && cusps) || (b < 0.0 && annulus),
        _ => false,
    }
}

fn c7_taxonomy(l: &mut Ledger) -> Outcome {
    use weingarten::classify::Seed;
    let t = Instant::now();
    let cases = [
        (1.0, 1.0, "3"),
        (1.0, 1.0, "2 + y^2"),
        (1.0, -1.0, "0.5"),
        (1.0, -1.0, "0.5 + 0.25*y^2"),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (a, b, src) in cases {
        let p = params(a, b);
        let phi = PrescribedFunction::parse(src).unwrap();
        assert_eq!(check_character(&p, &phi), Ok(CharacterKind::Elliptic));
        let r0 = a / phi.value(0.0);
        let singular = |x: f64, theta: f64| (a * x + b * theta.sin()).abs() < 1e-3;
        let mut seeds = vec![Seed::Equilibrium, Seed::Radial];
        for f in [0.1, 0.3, 0.55, 0.8, 0.95] {
            let x = f * r0;
            if !singular(x, FRAC_PI_2) {
                seeds.push(Seed::Section {
                    x,
                    theta: FRAC_PI_2,
                });
            }
        }
        for x in [1.2, 1.5, 2.0] {
            seeds.push(Seed::Section {
                x,
                theta: 3.0 * FRAC_PI_2,
            });
        }
        // Axis angles: one opening upwards into Θ₁ and its analogue in Θ₂.
        seeds.push(Seed::Axis { theta: FRAC_PI_4 });
        seeds.push(Seed::Axis {
            theta: 7.0 * FRAC_PI_4,
        });
        let results = weingarten::classify::classify_sweep(&p, &phi, &seeds, &classify_options());
        let mut seen = Vec::new();
        for (seed, r) in seeds.iter().zip(results) {
            match r {
                Ok(c) => {
                    let fam = c.class.family;
                    if !allowed_elliptic(b, fam, &c.orbit.start_end, &c.orbit.finish_end) {
                        ok = false;
                        notes.push(format!(
                            "{src}, b = {b}: {seed:?} gave {fam} with ends {:?}/{:?}",
                            c.orbit.start_end, c.orbit.finish_end
                        ));
                    }
                    if !seen.contains(&fam) {
                        seen.push(fam);
                    }
                    l.keep_orbit(
                        format!("taxonomy b = {b}, φ = {src}, {seed:?}"),
                        &p,
                        &phi,
                        &c.orbit,
                    );
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{src}, b = {b}: {seed:?} failed: {e}"));
                }
            }
        }
        let names: Vec<&str> = seen.iter().map(|f| f.name()).collect();
        notes.push(format!("b = {b}, φ = {src}: {}", names.join(" ")));
    }
    // The radial graphs themselves are checked by criterion 8 as well.
    for (a, b, src) in [(1.0, 1.0, "3"), (1.0, -1.0, "0.5 + 0.25*y^2")] {
        let p = params(a, b);
        let phi = PrescribedFunction::parse(src).unwrap();
        let sol = weingarten::radial::solve_radial_auto(&p, &phi, Orientation::Up).unwrap();
        l.keep_radial(format!("radial b = {b}, φ = {src}"), &p, &phi, &sol);
    }
    let dt = t.elapsed();
    ok &= dt < C7_BUDGET;
    notes.push(format!("{dt:.1?} (budget {C7_BUDGET:?})"));
    outcome(ok, notes.join("; "))
}

fn c8_residuals(l: &Ledger) -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut failed = Vec::new();
    let mut rows = 0;
    for a in &l.artifacts {
        let rep = verify_samples(&a.samples, &a.params, &a.phi, C8_TOL);
        rows += rep.checked;
        if rep.max_residual > worst.0 {
            worst = (rep.max_residual, a.label.clone());
        }
        if !rep.passed {
            failed.push(format!("{} ({:.1e})", a.label, rep.max_residual));
        }
    }
    outcome(
        failed.is_empty(),
        format!(
            "{} artifacts, {rows} rows, worst {:.1e} at {} (tol {C8_TOL:.0e}){}",
            l.artifacts.len(),
            worst.0,
            worst.1,
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failed.join(", "))
            }
        ),
    )
}

/// Final state of the reintegration from the reflected orbit's first sample,
/// against the reflected orbit's last sample.
fn reflect_and_reintegrate(p: &Params, phi: &PrescribedFunction, o: &Orbit) -> Result<f64, String> {
    let m = reflect(o).map_err(|e| e.to_string())?;
    let (first, last) = (m.first(), m.last());
    let seed = PhasePoint::new(first.x, first.theta, p).map_err(|e| e.to_string())?;
    let opts = IntegratorOptions::default().with_s_max(last.s - first.s);
    let r = integrate(StartPoint::Phase(seed), Direction::Forward, p, phi, &opts)
        .map_err(|e| e.to_string())?;
    let end = r.last();
    Ok((end.x - last.x).abs().max((end.theta - last.theta).abs()))
}

fn c9_symmetry() -> Outcome {
    let mut rng = StdRng::seed_from_u64(C9_SEED);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for case in 0..C9_CASES {
        let coeffs: [f64; 3] = [
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.5..3.0),
        ];
        let src = format!("{} + {}*y^2 + {}*y^4", coeffs[0], coeffs[1], coeffs[2]);
        let phi = PrescribedFunction::parse(&src).unwrap();
        let a = rng.gen_range(0.5..2.0);
        let b = rng.gen_range(0.2..2.0);
        let p = params(a, b);
        // An unduloid period stays inside Θ₁, where the mirror is defined.
        let x0 = rng.gen_range(0.2..0.8) * a / phi.value(0.0);
        let seed = PhasePoint::new(x0, FRAC_PI_2, &p).unwrap();
        let tag = format!("#{case} a = {a:.3}, b = {b:.3}, φ = {src}, x₀ = {x0:.4}");
        let o = match integrate_full(seed, &p, &phi, &classify_options()) {
            Ok(o) => o,
            Err(e) => {
                failures.push(format!("{tag}: {e}"));
                continue;
            }
        };
        match reflect_and_reintegrate(&p, &phi, &o) {
            Ok(d) => {
                worst = worst.max(d);
                if d >= C9_TOL {
                    failures.push(format!("{tag}: reflection gap {d:.1e}"));
                }
            }
            Err(e) => failures.push(format!("{tag}: {e}")),
        }
        // Orientation flip: (−a, b, φ) through the seed shifted by π.
        let flipped = params(-a, b);
        let fam = |p: &Params, theta: f64| {
            classify(
                p,
                &phi,
                weingarten::classify::Seed::Section { x: x0, theta },
                &classify_options(),
            )
            .map(|c| c.class.family)
        };
        let (f0, f1) = (fam(&p, FRAC_PI_2), fam(&flipped, 3.0 * FRAC_PI_2));
        if f0.is_err() || f0 != f1 {
            failures.push(format!("{tag}: orientation flip {f0:?} vs {f1:?}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{C9_CASES} random even φ, worst reflection gap {worst:.1e} (tol {C9_TOL:.0e}){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {} failures, first: {}", failures.len(), failures[0])
            }
        ),
    )
}

fn c10_order() -> Outcome {
    let (p, phi) = (params(1.0, 1.0), constant(3.0));
    let seed = PhasePoint::new(1.0, FRAC_PI_2, &p).unwrap();
    let errors: Vec<f64> = C10_STEPS
        .iter()
        .map(|&h| {
            let opts = IntegratorOptions {
                fixed_step: Some(h),
                ..IntegratorOptions::default()
            };
            sphere_oracle_error(&integrate_full(seed, &p, &phi, &opts).unwrap())
        })
        .collect();
    let ode_ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();

    let cap = |n: usize| {
        let sol = solve_radial_on(&p, &phi, C3_DELTA, n, Orientation::Up).unwrap();
        sol.grid
            .iter()
            .zip(&sol.u)
            .map(|(r, u)| (u - (1.0 - (1.0 - r * r).sqrt())).abs())
            .fold(0.0, f64::max)
    };
    let grid_errors: Vec<f64> = [16, 32, 64, 128].iter().map(|&n| cap(n)).collect();
    let grid_ratios: Vec<f64> = grid_errors.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = ode_ratios.iter().all(|r| *r >= C10_ODE_RATIO)
        && grid_ratios.iter().all(|r| *r >= C10_GRID_RATIO);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.2e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    outcome(
        ok,
        format!(
            "step halving errors {} ratios {} (≥ {C10_ODE_RATIO}); grid doubling errors {} ratios {} (≥ {C10_GRID_RATIO})",
            fmt(&errors),
            fmt(&ode_ratios),
            fmt(&grid_errors),
            fmt(&grid_ratios)
        ),
    )
}

fn main() {
    let mut ledger = Ledger::default();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!(
            "[{verdict}] criterion {n:>2} {name}: {} [{:.2?}]",
            o.detail,
            t.elapsed()
        );
    };
    report(1, "cylinder fixed point", &mut || c1_cylinder(&mut ledger));
    report(2, "sphere oracle", &mut || c2_sphere(&mut ledger));
    report(3, "radial solver vs spherical cap", &mut || {
        c3_radial(&mut ledger)
    });
    report(4, "first-integral conservation", &mut || {
        c4_first_integral(&mut ledger)
    });
    report(5, "vanishing-φ landmark", &mut || {
        c5_vanishing_landmark(&mut ledger)
    });
    report(6, "hyperbolic threshold", &mut || {
        c6_hyperbolic(&mut ledger)
    });
    report(7, "taxonomy sweep", &mut || c7_taxonomy(&mut ledger));
    report(8, "Weingarten residual", &mut || c8_residuals(&ledger));
    report(9, "symmetry properties", &mut c9_symmetry);
    report(10, "convergence order", &mut c10_order);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
