//! One function per subcommand. Each renders its artifacts completely
//! before anything is written.

use std::fmt::Write;
use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use weingarten::classify::{
    classify, classify_sweep, orbit_for_seed, thresholds, Classification, Seed,
};
use weingarten::export::{
    profile_csv, read_profile_csv, render_phase_portrait, resample, revolve, to_obj, verify_samples,
};
use weingarten::integrate::check_character;
use weingarten::radial::{solve_radial_auto, solve_radial_on, Orientation, RadialSolution};
use weingarten::{integrate, integrate_full, Direction, Orbit, PhasePoint, StartPoint};

use crate::args::{Command, Common, DirectionArg, OrientationArg, Problem, SeedArgs};
use crate::error::{validation, CliError};
use crate::output::{emit, Artifact};

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Portrait { common, seeds, out } => portrait(&common, &seeds, out),
        Command::Orbit {
            common,
            seeds,
            direction,
            allow_vanishing,
            out,
        } => orbit(&common, &seeds, direction, allow_vanishing, out),
        Command::Classify { common, seeds, csv } => classify_cmd(&common, &seeds, csv),
        Command::Radial {
            common,
            delta,
            nodes,
            orientation,
            out,
            orbit_out,
        } => radial(&common, delta, nodes, orientation, out, orbit_out),
        Command::Mesh {
            common,
            seeds,
            segments,
            samples,
            out,
        } => mesh(&common, &seeds, segments, samples, out),
        Command::Verify {
            csv,
            common,
            tol,
            allow_vanishing,
        } => verify(&common, csv, tol, allow_vanishing),
    }
}

fn stdout(contents: String) -> Artifact {
    Artifact {
        path: None,
        contents,
    }
}

fn portrait(common: &Common, seeds: &SeedArgs, out: Option<PathBuf>) -> Result<(), CliError> {
    let pb = common.resolve(false)?;
    check_character(&pb.params, &pb.phi)?;
    let seeds = seeds.collect(&pb)?;
    let pic = render_phase_portrait(&pb.params, &pb.phi, &seeds, &pb.opts);
    for w in &pic.warnings {
        eprintln!("warning: {w}");
    }
    emit(&[Artifact {
        path: out,
        contents: pic.svg,
    }])
}

fn seed_orbit(pb: &Problem, seed: Seed, direction: DirectionArg) -> Result<Orbit, CliError> {
    let (p, phi, opts) = (&pb.params, &pb.phi, &pb.opts);
    let dir = match direction {
        DirectionArg::Both => None,
        DirectionArg::Forward => Some(Direction::Forward),
        DirectionArg::Backward => Some(Direction::Backward),
    };
    match (seed, dir) {
        (Seed::Section { x, theta }, Some(dir)) => {
            let pt = PhasePoint::new(x, theta, p).map_err(|e| validation(e.to_string()))?;
            Ok(integrate(StartPoint::Phase(pt), dir, p, phi, opts)?)
        }
        (Seed::Section { x, theta }, None) => {
            let pt = PhasePoint::new(x, theta, p).map_err(|e| validation(e.to_string()))?;
            Ok(integrate_full(pt, p, phi, opts)?)
        }
        _ => Ok(orbit_for_seed(p, phi, seed, opts)?),
    }
}

fn orbit(
    common: &Common,
    seeds: &SeedArgs,
    direction: DirectionArg,
    allow_vanishing: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let pb = common.resolve(allow_vanishing)?;
    check_character(&pb.params, &pb.phi)?;
    let seed = seeds.single(&pb)?;
    let o = seed_orbit(&pb, seed, direction)?;
    emit(&[Artifact {
        path: out,
        contents: profile_csv(&o.samples),
    }])
}

fn report(c: &Classification, seed: Seed) -> Value {
    let [start, finish] = c.orbit.endpoints();
    json!({
        "verdict": c.class.to_string(),
        "seed": seed,
        "family": c.class.family,
        "parameter": c.class.parameter,
        "complete": c.class.complete,
        "gauss_sign": c.class.gauss_sign,
        "height_monotone": c.class.height_monotone,
        "endpoints": { "start": start, "finish": finish },
        "arc_length": c.orbit.arc_length(),
        "signature": c.signature,
    })
}

fn classify_cmd(common: &Common, seeds: &SeedArgs, csv: Option<PathBuf>) -> Result<(), CliError> {
    let pb = common.resolve(false)?;
    check_character(&pb.params, &pb.phi)?;
    let seeds = seeds.collect(&pb)?;
    if seeds.is_empty() {
        return Err(validation("a seed is required"));
    }
    if csv.is_some() && seeds.len() > 1 {
        return Err(validation("--csv needs exactly one seed"));
    }
    let results = if seeds.len() == 1 {
        vec![classify(&pb.params, &pb.phi, seeds[0], &pb.opts)]
    } else {
        classify_sweep(&pb.params, &pb.phi, &seeds, &pb.opts)
    };
    let th = thresholds(&pb.params, &pb.phi).ok();

    let mut text = String::new();
    let mut reports = Vec::new();
    let mut first_error = None;
    for (seed, r) in seeds.iter().zip(results) {
        match r {
            Ok(c) => {
                let _ = writeln!(text, "{}", c.class);
                let mut rep = report(&c, *seed);
                rep["orbit_csv"] = json!(csv.as_ref().map(|p| p.display().to_string()));
                reports.push((rep, Some(c.orbit)));
            }
            Err(e) => {
                let e = CliError::from(e);
                eprintln!("error: seed {seed:?}: {e}");
                reports.push((json!({ "seed": seed, "error": e.to_string() }), None));
                first_error.get_or_insert(e);
            }
        }
    }
    let body: Vec<Value> = reports.iter().map(|(r, _)| r.clone()).collect();
    let doc = json!({
        "a": pb.params.a,
        "b": pb.params.b,
        "phi": pb.phi.source(),
        "thresholds": th,
        "orbits": body,
    });
    let _ = writeln!(
        text,
        "{}",
        serde_json::to_string_pretty(&doc).expect("report serializes")
    );

    let mut artifacts = Vec::new();
    if let (Some(path), Some((_, Some(orbit)))) = (csv, reports.first()) {
        artifacts.push(Artifact {
            path: Some(path),
            contents: profile_csv(&orbit.samples),
        });
    }
    artifacts.push(stdout(text));
    emit(&artifacts)?;
    first_error.map_or(Ok(()), Err)
}

fn radial_table(sol: &RadialSolution, pb: &Problem) -> String {
    let residuals = sol.residuals(&pb.params, &pb.phi);
    let mut out = String::from("r,u,uprime,residual\n");
    for i in 0..sol.grid.len() {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            sol.grid[i], sol.u[i], sol.uprime[i], residuals[i]
        );
    }
    out
}

fn radial(
    common: &Common,
    delta: Option<f64>,
    nodes: usize,
    orientation: OrientationArg,
    out: Option<PathBuf>,
    orbit_out: Option<PathBuf>,
) -> Result<(), CliError> {
    let pb = common.resolve(false)?;
    check_character(&pb.params, &pb.phi)?;
    if nodes < 2 {
        return Err(validation("--nodes must be at least 2"));
    }
    let orientation = Orientation::from(orientation);
    let sol = match delta {
        Some(d) => solve_radial_on(&pb.params, &pb.phi, d, nodes, orientation)?,
        None if nodes == weingarten::radial::DEFAULT_NODES => {
            solve_radial_auto(&pb.params, &pb.phi, orientation)?
        }
        None => {
            let d = weingarten::radial::default_delta(&pb.params, &pb.phi);
            solve_radial_on(&pb.params, &pb.phi, d, nodes, orientation)?
        }
    };
    eprintln!(
        "radial: delta = {}, iterations = {}, last contraction ratio = {}",
        sol.delta,
        sol.iterations,
        sol.contraction.last().copied().unwrap_or(f64::NAN)
    );
    let mut artifacts = Vec::new();
    if let Some(path) = orbit_out {
        let orbit = sol.continue_orbit(&pb.params, &pb.phi, &pb.opts)?;
        artifacts.push(Artifact {
            path: Some(path),
            contents: profile_csv(&orbit.samples),
        });
    }
    artifacts.push(Artifact {
        path: out,
        contents: radial_table(&sol, &pb),
    });
    emit(&artifacts)
}

fn mesh(
    common: &Common,
    seeds: &SeedArgs,
    segments: usize,
    samples: usize,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let pb = common.resolve(false)?;
    check_character(&pb.params, &pb.phi)?;
    if segments < 3 {
        return Err(validation("--segments must be at least 3"));
    }
    if samples < 2 {
        return Err(validation("--samples must be at least 2"));
    }
    let seed = seeds.single(&pb)?;
    let o = seed_orbit(&pb, seed, DirectionArg::Both)?;
    let profile = resample(&o.samples, samples);
    let m = revolve(&profile, segments, &format!("{seed:?}"))?;
    emit(&[Artifact {
        path: out,
        contents: to_obj(&m),
    }])
}

fn verify(common: &Common, csv: PathBuf, tol: f64, allow_vanishing: bool) -> Result<(), CliError> {
    let pb = common.resolve(allow_vanishing)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(validation("--tol must be positive and finite"));
    }
    let file = fs::File::open(&csv)
        .map_err(|e| validation(format!("cannot read {}: {e}", csv.display())))?;
    let rows = read_profile_csv(file).map_err(|e| validation(format!("{}: {e}", csv.display())))?;
    let rep = verify_samples(&rows, &pb.params, &pb.phi, tol);
    let text = format!(
        "max residual {:e} over {} rows ({} skipped), tolerance {:e}: {}\n{}\n",
        rep.max_residual,
        rep.checked,
        rep.skipped,
        rep.tol,
        if rep.passed { "PASS" } else { "FAIL" },
        serde_json::to_string_pretty(&rep).expect("report serializes")
    );
    emit(&[stdout(text)])?;
    if rep.passed {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "verification failed: max residual {:e} exceeds {:e}",
            rep.max_residual, rep.tol
        )))
    }
}
