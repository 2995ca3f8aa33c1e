use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use nstar_core::dual::{
    dual_zero_halving, functional_norm_formula, nonconvexity_demo, operator_norm_bruteforce, standard_halving_input,
    AtomicFunctional, HalvingConfig,
};
use nstar_core::lphi::{luxemburg_norm, metric, modular};
use nstar_core::measure::{MeasurableFn, MeasureSpace};
use nstar_core::nstar::{delta2_auto, delta2_solve, log_grid, validate_nstar, NStarFunction};
use nstar_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::docs::{embedded_text, CheckDoc, DemoDoc, DocError, FnDoc, FunctionalDoc, PhiDoc, SpaceDoc};
use crate::report::{Format, Report};
use crate::suite::{run_suite, select, SuiteConfig};

#[derive(Debug, Parser)]
#[command(
    name = "nstar",
    version,
    about = "N*-functions and the quasi-normed spaces L_Phi: evaluation, checks and demonstrations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Allowed negative slack in asserted inequalities.
    #[arg(long, global = true, env = "NSTAR_DEFAULT_TOL", default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Smallest grid point.
    #[arg(long, default_value_t = 1e-3)]
    pub lo: f64,
    /// Largest grid point.
    #[arg(long, default_value_t = 1e3)]
    pub hi: f64,
    /// Number of log-spaced grid points.
    #[arg(long, default_value_t = 13)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the defining properties of an N*-function.
    Validate {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Modular and Luxemburg quasi-norm of a function.
    Norm {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        /// Measure space: `interval:L=..,N=..`, `atomic:masses=a/b/..`, `equal:n`, or JSON
        #[arg(long)]
        space: String,
        /// Function: values JSON, or a generator such as `identity`, `constant:c`, `random:seed,lo,hi`
        #[arg(long = "fn")]
        func: String,
    },
    /// The metric d(f, g) = rho(f - g).
    Metric {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        /// Measure space: `interval:L=..,N=..`, `atomic:masses=a/b/..`, `equal:n`, or JSON
        #[arg(long)]
        space: String,
        /// Function: values JSON, or a generator such as `identity`, `constant:c`, `random:seed,lo,hi`
        #[arg(long = "fn")]
        func: String,
        /// Second function; defaults to zero.
        #[arg(long = "fn2", default_value = "zero")]
        func2: String,
    },
    /// Tabulate Phi, its inverse N-function, that function's conjugate, and the complementary Phi_hat.
    Conjugate {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Solve 2 Phi(x) = Phi(k x) per grid point.
    Delta2 {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        /// Doubling constant of Phi^{-1}; searched when omitted.
        #[arg(long)]
        k0: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the inequality suite on seeded random functions.
    Check {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long, required_unless_present = "config")]
        phi: Option<String>,
        /// Measure space: `interval:L=..,N=..`, `atomic:masses=a/b/..`, `equal:n`, or JSON
        #[arg(long, required_unless_present = "config")]
        space: Option<String>,
        /// `all` or a comma-separated list of checks.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Check-suite document (JSON); its fields override the flags.
        #[arg(long)]
        config: Option<String>,
    },
    /// Norm formula versus brute-force operator norm of an atomic functional.
    DualNorm {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        /// Measure space: `interval:L=..,N=..`, `atomic:masses=a/b/..`, `equal:n`, or JSON
        #[arg(long)]
        space: String,
        /// Coefficients document; seeded random coefficients when omitted.
        #[arg(long)]
        functional: Option<String>,
        /// Random starting points for the brute-force search.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Constructive demonstrations on the sampled interval and atoms.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Averages of disjoint bumps of modular epsilon leave every small ball.
    Nonconvex {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        n: usize,
        /// Space carrying the n disjoint pieces.
        #[arg(long, default_value = "interval:L=1,N=1000")]
        atoms: String,
        #[arg(long)]
        config: Option<String>,
    },
    /// Halving by modular mass drives rho to zero while a kernel functional stays large.
    Halving {
        /// N*-function: `name:k=v,...` shorthand, inline JSON, or a JSON file
        #[arg(long)]
        phi: String,
        /// Measure space: `interval:L=..,N=..`, `atomic:masses=a/b/..`, `equal:n`, or JSON
        #[arg(long, default_value = "interval:L=1,N=65536")]
        space: String,
        #[arg(long, default_value_t = 20)]
        iterations: usize,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Starting function; a steep profile scaled so that phi(f0) >= 1 when omitted.
        #[arg(long = "fn")]
        func: Option<String>,
        /// Kernel u of phi(f) = integral of f u; an indicator near 0 when omitted.
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long)]
        config: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        CliError { code: 2, message: e.to_string() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::Domain(_)
            | Error::DimensionMismatch(_)
            | Error::Capacity { .. } => 2,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: 2, message: message.into() }
}

fn grid(g: &GridArgs) -> Result<Vec<f64>, CliError> {
    if !(g.lo > 0.0 && g.hi > g.lo && g.hi.is_finite() && g.points >= 2) {
        return Err(usage(format!(
            "grid needs 0 < lo < hi and at least 2 points, got [{}, {}] x {}",
            g.lo, g.hi, g.points
        )));
    }
    Ok(log_grid(g.lo, g.hi, g.points))
}

fn phi_of(s: &str) -> Result<NStarFunction, CliError> {
    Ok(PhiDoc::parse(s)?.build()?)
}

fn space_of(s: &str) -> Result<Arc<MeasureSpace>, CliError> {
    Ok(SpaceDoc::parse(s)?.build()?)
}

fn fn_of(s: &str, space: &Arc<MeasureSpace>, what: &str) -> Result<MeasurableFn, CliError> {
    Ok(FnDoc::parse_as(s, what)?.build(space, what)?)
}

/// Builds the report for `cli` without writing it.
pub fn report(cli: &Cli) -> Result<Report, CliError> {
    if !(cli.tol >= 0.0 && cli.tol.is_finite()) {
        return Err(usage(format!("--tol must be finite and >= 0, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Validate { phi, grid: g } => {
            let phi = phi_of(phi)?;
            let v = validate_nstar(&phi, &grid(g)?);
            let mut r = Report::new("validate", "check", &["worst_residual"]);
            for e in &v.entries {
                r.push(e.name.clone(), &[e.worst_residual], Some(e.passed));
                if !e.passed {
                    r.note(format!("{}: {}", e.name, e.detail));
                }
            }
            Ok(r)
        }
        Command::Norm { phi, space, func } => {
            let phi = phi_of(phi)?;
            let space = space_of(space)?;
            let f = fn_of(func, &space, "--fn")?;
            let rho = modular(&phi, &f);
            let n = luxemburg_norm(&phi, &f)?;
            let mut r = Report::new("norm", "quantity", &["value"]);
            r.push("modular", &[rho.value], None);
            r.push("luxemburg_norm", &[n.value], None);
            r.push("lambda_residual", &[n.lambda_residual], None);
            r.push("iterations", &[n.iterations as f64], None);
            Ok(r)
        }
        Command::Metric { phi, space, func, func2 } => {
            let phi = phi_of(phi)?;
            let space = space_of(space)?;
            let f = fn_of(func, &space, "--fn")?;
            let g = fn_of(func2, &space, "--fn2")?;
            let mut r = Report::new("metric", "quantity", &["value"]);
            r.push("metric", &[metric(&phi, &f, &g)?], None);
            Ok(r)
        }
        Command::Conjugate { phi, grid: g } => {
            let phi = phi_of(phi)?;
            let m = phi.inverse_nfunction();
            let conj = m.conjugate_checked()?;
            let hat = phi.complementary();
            let mut r = Report::new("conjugate", "t", &["phi", "phi_inverse", "conjugate_of_inverse", "complementary"]);
            for t in grid(g)? {
                r.push(format!("{t:.6e}"), &[phi.eval(t), m.try_eval(t)?, conj.try_eval(t)?, hat.try_eval(t)?], None);
            }
            Ok(r)
        }
        Command::Delta2 { phi, k0, grid: g } => {
            let phi = phi_of(phi)?;
            let g = grid(g)?;
            let cert = match k0 {
                Some(k0) => delta2_solve(&phi, *k0, &g)?,
                None => delta2_auto(&phi, &g)?,
            };
            let mut r = Report::new("delta2", "x", &["k"]);
            for (x, k) in &cert.k_per_x {
                r.push(format!("{x:.6e}"), &[*k], None);
            }
            match cert.k_global {
                Some(k) => r.note(format!("global constant k = {k} (k0 = {})", cert.k0)),
                None => r.note(format!(
                    "k varies with x: k in [{}, {}] (k0 = {}); no single constant is claimed",
                    cert.k_min, cert.k_max, cert.k0
                )),
            }
            r.note(format!("largest residual |2 Phi(x) - Phi(k x)| = {:e}", cert.max_residual));
            Ok(r)
        }
        Command::Check { phi, space, suite, samples, config } => {
            let (mut phi_s, mut space_s) = (phi.clone(), space.clone());
            let (mut names, mut samples, mut seed, mut tol) = (suite.clone(), *samples, cli.seed, cli.tol);
            if let Some(c) = config {
                let doc = CheckDoc::parse(c)?;
                phi_s = Some(embedded_text(&doc.phi));
                space_s = Some(embedded_text(&doc.space));
                if let Some(list) = doc.checks {
                    names = list.join(",");
                }
                samples = doc.samples.unwrap_or(samples);
                seed = doc.seed.unwrap_or(seed);
                tol = doc.tolerances.and_then(|t| t.slack).unwrap_or(tol);
            }
            let phi = phi_of(phi_s.as_deref().ok_or_else(|| usage("--phi is required"))?)?;
            let space = space_of(space_s.as_deref().ok_or_else(|| usage("--space is required"))?)?;
            let checks = select(&names).map_err(usage)?;
            let records = run_suite(&phi, &space, &checks, &SuiteConfig { samples, seed, tol })?;
            let mut r = Report::new("check", "check", &["slack_min", "slack_max", "samples"]);
            for rec in records {
                r.push(rec.name.clone(), &[rec.slack_min, rec.slack_max, rec.samples as f64], Some(rec.pass));
                for n in rec.notes {
                    r.note(format!("{}: {n}", rec.name));
                }
            }
            Ok(r)
        }
        Command::DualNorm { phi, space, functional, budget } => {
            let phi = phi_of(phi)?;
            let space = space_of(space)?;
            let coefficients = match functional {
                Some(doc) => FunctionalDoc::parse(doc)?.coefficients,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
                }
            };
            let u = AtomicFunctional::new(&space, coefficients)?;
            let s = functional_norm_formula(&u, &phi)?;
            let cert = delta2_auto(&phi, &log_grid(1e-3, 1e3, 25))?;
            let k = cert.k();
            let b = operator_norm_bruteforce(&u, &phi, *budget, cli.seed)?;
            let rel = 1e-6;
            let mut r = Report::new("dual-norm", "quantity", &["value"]);
            r.push("norm_formula", &[s], None);
            r.push("bruteforce", &[b.value], None);
            r.push("k_times_norm_formula", &[k * s], None);
            r.push("lower_bracket", &[b.value - s], Some(b.value >= s * (1.0 - rel) - cli.tol));
            r.push("upper_bracket", &[k * s - b.value], Some(b.value <= k * s * (1.0 + rel) + cli.tol));
            r.note(format!("brute force evaluated {} candidates", b.candidates));
            Ok(r)
        }
        Command::Demo { demo: Demo::Nonconvex { phi, epsilon, n, atoms, config } } => {
            let phi = phi_of(phi)?;
            let space = Arc::new(SpaceDoc::parse_as(atoms, "--atoms")?.build()?);
            let doc = match config {
                Some(c) => DemoDoc::parse(c)?,
                None => DemoDoc::default(),
            };
            let epsilon = doc.epsilon.unwrap_or(*epsilon);
            let t = nonconvexity_demo(&phi, &space, epsilon, *n)?;
            let mut r = Report::new("demo nonconvex", "n", &["modular", "epsilon"]);
            for (m, rho) in t.modular.iter().enumerate() {
                r.push((m + 1).to_string(), &[*rho, epsilon], Some(*rho >= epsilon * (1.0 - 1e-9)));
            }
            r.note(format!("final modular {} from pieces of modular {epsilon} each", t.last()));
            Ok(r)
        }
        Command::Demo { demo: Demo::Halving { phi, space, iterations, theta, func, kernel, config } } => {
            let phi = phi_of(phi)?;
            let space = space_of(space)?;
            let doc = match config {
                Some(c) => DemoDoc::parse(c)?,
                None => DemoDoc::default(),
            };
            if space.is_atomic() {
                return Err(Error::IndivisibleAtoms.into());
            }
            let (default_f0, default_u) = standard_halving_input(&space)?;
            let f0 = match func {
                Some(s) => fn_of(s, &space, "--fn")?,
                None => default_f0,
            };
            let kernel_text = kernel.clone().or_else(|| doc.kernel.as_ref().map(embedded_text));
            let u = match kernel_text {
                Some(s) => fn_of(&s, &space, "--kernel")?,
                None => default_u,
            };
            let cfg = HalvingConfig {
                iterations: doc.iterations.unwrap_or(*iterations),
                theta: doc.theta.unwrap_or(*theta),
                functional_tol: 1e-6,
            };
            let t = dual_zero_halving(&phi, &f0, &u, &cfg)?;
            let mut r = Report::new("demo halving", "iteration", &["modular", "functional_value", "bound"]);
            for s in &t.steps {
                r.push(s.iteration.to_string(), &[s.modular, s.functional_value, s.bound], None);
            }
            r.pass = t.all_steps_ok && t.functional_floor_ok;
            r.note(format!(
                "c_phi = {}, per-step factor c_phi*max(theta,1-theta) = {}, modular ratio after {} steps = {:e}",
                t.c_phi,
                t.decay_factor(),
                cfg.iterations,
                t.modular_ratio()
            ));
            if !t.all_steps_ok {
                r.note("a step exceeded its modular bound");
            }
            if !t.functional_floor_ok {
                r.note("the functional value dropped below its starting value");
            }
            Ok(r)
        }
    }
}

/// Builds and writes the report; returns whether every asserted check passed.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let r = report(cli)?;
    let text = r.render(cli.format);
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError { code: 2, message: format!("{}: {e}", path.display()) })?
        }
        None => print!("{text}"),
    }
    Ok(r.pass)
}
