//! Command-line flags, the `key = value` config file and the merge of the
//! two. Flags win over file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weingarten::classify::{classify_options, section_for, Seed};
use weingarten::phi::{parse_phi, validate, validate_allow_vanishing};
use weingarten::radial::Orientation;
use weingarten::{IntegratorOptions, Params, PrescribedFunction};

use crate::error::{validation, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "weingarten",
    version,
    about = "Integrate, classify and export rotational surfaces with 2aH + bK = φ(N)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw the phase plane with the orbits of the given seeds as SVG.
    Portrait {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seeds: SeedArgs,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate one orbit and write its profile table as CSV.
    Orbit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seeds: SeedArgs,
        #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
        direction: DirectionArg,
        /// Admit φ ≡ 0 (comparison runs only).
        #[arg(long)]
        allow_vanishing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Name the family of the orbit through each seed.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seeds: SeedArgs,
        /// Also write the orbit table to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve the radial graph problem near the axis.
    Radial {
        #[command(flatten)]
        common: Common,
        /// Radial extent; halved automatically from a default when absent.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = weingarten::radial::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = OrientationArg::Up)]
        orientation: OrientationArg,
        /// Graph table `r,u,uprime,residual`; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue the graph with the integrator and write the whole orbit.
        #[arg(long)]
        orbit_out: Option<PathBuf>,
    },
    /// Revolve one orbit about the axis and write a Wavefront mesh.
    Mesh {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seeds: SeedArgs,
        #[arg(long, default_value_t = 64)]
        segments: usize,
        /// Profile samples, equally spaced in arc length.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the Weingarten residual of every row of an orbit table.
    Verify {
        csv: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = weingarten::export::VERIFY_TOL)]
        tol: f64,
        #[arg(long)]
        allow_vanishing: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Prescribed function of `y = ⟨N, e₃⟩`, e.g. "3 + y^2".
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub h_max: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SeedArgs {
    /// Radius of a seed on the line `--section`.
    #[arg(long, allow_negative_numbers = true)]
    pub seed_x: Option<f64>,
    /// Angle of the seed line; defaults to π/2 or 3π/2 by the sign of aφ(0).
    #[arg(long, requires = "seed_x")]
    pub section: Option<String>,
    /// Seed on the axis with this tangent angle.
    #[arg(long)]
    pub axis_theta: Option<String>,
    #[arg(long)]
    pub equilibrium: bool,
    /// Seed from the radial graph solver.
    #[arg(long)]
    pub radial: bool,
    /// `equilibrium`, `radial`, `X@ANGLE` or `axis@ANGLE`; repeatable.
    #[arg(long = "seed")]
    pub seed: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Both,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Up,
    Down,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Up => Orientation::Up,
            OrientationArg::Down => Orientation::Down,
        }
    }
}

/// Entries of a config file. Keys other than `seed` appear at most once.
#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    seeds: Vec<String>,
}

const CONFIG_KEYS: [&str; 7] = ["a", "b", "phi", "rtol", "atol", "h_max", "s_max"];

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(validation(format!(
                    "config line {}: expected key = value",
                    i + 1
                )));
            };
            let key = key.trim().replace('-', "_");
            let value = unquote(value.trim());
            if key == "seed" || key == "seeds" {
                cfg.seeds.extend(
                    value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty()),
                );
            } else if CONFIG_KEYS.contains(&key.as_str()) {
                if cfg.values.insert(key.clone(), value.to_string()).is_some() {
                    return Err(validation(format!(
                        "config line {}: duplicate key {key}",
                        i + 1
                    )));
                }
            } else {
                return Err(validation(format!(
                    "config line {}: unknown key {key}",
                    i + 1
                )));
            }
        }
        Ok(cfg)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| validation(format!("config key {key}: not a number: {v:?}")))
            })
            .transpose()
    }
}

fn unquote(v: &str) -> &str {
    for q in ['"', '\''] {
        if v.len() >= 2 && v.starts_with(q) && v.ends_with(q) {
            return &v[1..v.len() - 1];
        }
    }
    v
}

/// Fully validated problem data shared by every subcommand.
pub struct Problem {
    pub params: Params,
    pub phi: PrescribedFunction,
    pub opts: IntegratorOptions,
    /// Seed specs from the config file.
    pub config_seeds: Vec<String>,
}

impl Common {
    pub fn resolve(&self, allow_vanishing: bool) -> Result<Problem, CliError> {
        let cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    validation(format!("cannot read config {}: {e}", path.display()))
                })?;
                Config::parse(&text)?
            }
            None => Config::default(),
        };
        let pick = |flag: Option<f64>, key: &str| -> Result<Option<f64>, CliError> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => cfg.number(key),
            }
        };
        let a = pick(self.a, "a")?.ok_or_else(|| validation("missing --a"))?;
        let b = pick(self.b, "b")?.ok_or_else(|| validation("missing --b"))?;
        let src = self
            .phi
            .clone()
            .or_else(|| cfg.values.get("phi").cloned())
            .ok_or_else(|| validation("missing --phi"))?;
        let expr = parse_phi(&src).map_err(|e| validation(format!("phi: {e}")))?;
        let phi = if allow_vanishing {
            validate_allow_vanishing(expr)?
        } else {
            validate(expr)?
        };
        let params = Params::new(a, b)?;

        let mut opts = classify_options();
        for (flag, key, slot) in [
            (self.rtol, "rtol", &mut opts.rtol),
            (self.atol, "atol", &mut opts.atol),
            (self.h_max, "h_max", &mut opts.h_max),
            (self.s_max, "s_max", &mut opts.s_max),
        ] {
            if let Some(v) = pick(flag, key)? {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(validation(format!("{key} must be positive and finite")));
                }
                *slot = v;
            }
        }
        Ok(Problem {
            params,
            phi,
            opts,
            config_seeds: cfg.seeds,
        })
    }
}

/// A constant angle written in the expression language, e.g. `3*pi/2`.
pub fn parse_angle(src: &str) -> Result<f64, CliError> {
    let expr = parse_phi(src).map_err(|e| validation(format!("angle {src:?}: {e}")))?;
    if !expr.is_constant() {
        return Err(validation(format!("angle {src:?} must not depend on y")));
    }
    let v = expr
        .eval(0.0)
        .map_err(|e| validation(format!("angle {src:?}: {e}")))?;
    if !v.is_finite() {
        return Err(validation(format!("angle {src:?} is not finite")));
    }
    Ok(v)
}

pub fn parse_seed(spec: &str, p: &Params, phi: &PrescribedFunction) -> Result<Seed, CliError> {
    let spec = spec.trim();
    match spec {
        "equilibrium" => return Ok(Seed::Equilibrium),
        "radial" => return Ok(Seed::Radial),
        _ => {}
    }
    let (head, angle) = match spec.split_once('@') {
        Some((h, t)) => (h.trim(), Some(parse_angle(t)?)),
        None => (spec, None),
    };
    if head == "axis" {
        let theta = angle.ok_or_else(|| validation("axis seed needs an angle: axis@ANGLE"))?;
        return Ok(Seed::Axis { theta });
    }
    let x: f64 = head
        .parse()
        .map_err(|_| validation(format!("cannot read seed {spec:?}")))?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(validation(format!("seed radius must be positive, got {x}")));
    }
    Ok(Seed::Section {
        x,
        theta: angle.unwrap_or_else(|| section_for(p, phi)),
    })
}

impl SeedArgs {
    /// Seeds named by flags, in a fixed order, or else those of the config.
    pub fn collect(&self, problem: &Problem) -> Result<Vec<Seed>, CliError> {
        let (p, phi) = (&problem.params, &problem.phi);
        let mut out = Vec::new();
        if let Some(x) = self.seed_x {
            let spec = match &self.section {
                Some(angle) => format!("{x}@{angle}"),
                None => x.to_string(),
            };
            out.push(parse_seed(&spec, p, phi)?);
        }
        if let Some(t) = &self.axis_theta {
            out.push(Seed::Axis {
                theta: parse_angle(t)?,
            });
        }
        if self.equilibrium {
            out.push(Seed::Equilibrium);
        }
        if self.radial {
            out.push(Seed::Radial);
        }
        for s in &self.seed {
            out.push(parse_seed(s, p, phi)?);
        }
        if out.is_empty() {
            for s in &problem.config_seeds {
                out.push(parse_seed(s, p, phi)?);
            }
        }
        Ok(out)
    }

    pub fn single(&self, problem: &Problem) -> Result<Seed, CliError> {
        match self.collect(problem)?.as_slice() {
            [s] => Ok(*s),
            [] => Err(validation("a seed is required")),
            _ => Err(validation("exactly one seed is allowed here")),
        }
    }
}
