mod table;
mod word;

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use ncc_core::cones::{build_cone_with, check_causal_euler, SAMPLE_RADIUS, CausalEulerReport, ExactCone};
use ncc_core::flows::{geodesic_orbit_test, in_m_x, wedge_factor_witness, CosetPoint, OrbitKind};
use ncc_core::grading::{check_euler, euler_element, symmetric_structure, SubspaceDims, SymmetricStructure};
use ncc_core::jts::{BallStatus, TripleSystem};
use ncc_core::lie::{build_algebra_with, AlgebraSpec, Family};
use ncc_core::numerics::Tolerances;
use ncc_core::par::ExecMode;
use ncc_core::verify::{run_suite, Suite, VerifyConfig};
use ncc_core::NccError;
use serde::Serialize;

use word::{build_word, parse_word, Letter};

#[derive(Debug, Parser)]
#[command(name = "ncc", version, about = "Checks for non-compactly causal symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Algebra spec: sl:N, gl:N, so:P,Q or sp:2N.
    #[arg(long, global = true)]
    algebra: Option<String>,
    /// Euler element label (h1, h2, boost, diag:a,b,...).
    #[arg(long, global = true)]
    euler: Option<String>,
    /// Equality tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Boundary band around cone, ball and wedge boundaries.
    #[arg(long, global = true)]
    band: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count (cone orbit samples for info/wedge, per-check samples for verify).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Grid side length for the grid scans of verify.
    #[arg(long, global = true, default_value_t = 100)]
    grid: usize,
    /// Observer-domain time horizon.
    #[arg(long, global = true, default_value_t = 20.0)]
    tmax: f64,
    /// Run sampling loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimensions of the grading, the symmetric pair and the cone.
    Info,
    /// Positivity, orbit type and cell data for a group word.
    Wedge {
        /// Word like `z:0.5,h:1.0`, read as exp(0.5 z) exp(1.0 h).
        #[arg(default_value = "", allow_hyphen_values = true)]
        word: String,
    },
    /// Runs a property suite; exits 1 on any failure.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
    },
}

#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    algebra: String,
    euler: String,
    tolerances: Tolerances,
    seed: u64,
    samples: usize,
}

#[derive(Debug, Serialize)]
struct AlgebraInfo {
    name: String,
    dim: usize,
    defining_dim: usize,
    basis: Vec<String>,
}

#[derive(Debug, Serialize)]
struct ConeSummary {
    exact: Option<ExactCone>,
    orbit_samples: usize,
    sample_radius: f64,
    exact_generators: usize,
    causal_euler: CausalEulerReport,
}

#[derive(Debug, Serialize)]
struct InfoReport {
    command: &'static str,
    config: RunConfig,
    algebra: AlgebraInfo,
    euler: bool,
    grading_dims: [usize; 3],
    subspaces: SubspaceDims,
    cone: ConeSummary,
}

#[derive(Debug, Serialize)]
struct OmegaData {
    found: bool,
    rho: Option<f64>,
    x: Option<Vec<f64>>,
    a: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct WedgeReport {
    command: &'static str,
    config: RunConfig,
    word: Vec<Letter>,
    positivity_member: bool,
    geodesic_orbit: OrbitKind,
    in_m_h: bool,
    ball_status: Option<BallStatus>,
    omega: Option<OmegaData>,
}

const DEFAULT_CONE_SAMPLES: usize = 512;

fn is_usage(e: &NccError) -> bool {
    matches!(e, NccError::Parse(_) | NccError::Construction(_))
}

fn tolerances(c: &Common) -> Result<Tolerances, NccError> {
    let d = Tolerances::default();
    let eq = c.tol.unwrap_or(d.eq_tol);
    let band = c.band.unwrap_or(d.boundary_band.max(eq));
    let spec = d.spec_tol.clamp(eq.min(band), band.max(eq));
    Tolerances::new(eq, spec, band)
}

fn default_label(spec: &AlgebraSpec) -> String {
    match spec.family {
        Family::Sl | Family::Gl => "h1".into(),
        Family::SoPq => "boost".into(),
        Family::Sp => "h".into(),
    }
}

fn structure(c: &Common, tol: Tolerances) -> Result<(Arc<SymmetricStructure>, RunConfig), NccError> {
    let name = c
        .algebra
        .clone()
        .ok_or_else(|| NccError::Parse("--algebra is required".into()))?;
    let spec: AlgebraSpec = name.parse()?;
    let label = c.euler.clone().unwrap_or_else(|| default_label(&spec));
    let alg = build_algebra_with(spec.family, &spec.params, tol)?;
    let h = euler_element(&alg, &label)?;
    let s = symmetric_structure(&h).map_err(|e| match e {
        NccError::Precondition(m) => NccError::Parse(format!("`{label}` does not define a symmetric pair: {m}")),
        other => other,
    })?;
    let cfg = RunConfig {
        algebra: spec.to_string(),
        euler: label,
        tolerances: tol,
        seed: c.seed,
        samples: c.samples.unwrap_or(DEFAULT_CONE_SAMPLES),
    };
    Ok((s, cfg))
}

fn mode(c: &Common) -> ExecMode {
    if c.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    }
}

fn cmd_info(c: &Common) -> Result<(serde_json::Value, bool), NccError> {
    let tol = tolerances(c)?;
    let (s, cfg) = structure(c, tol)?;
    if cfg.samples == 0 {
        return Err(NccError::Parse("--samples must be positive".into()));
    }
    let alg = s.algebra();
    let cone = build_cone_with(&s, cfg.samples, cfg.seed, mode(c))?;
    let report = InfoReport {
        command: "info",
        algebra: AlgebraInfo {
            name: alg.name.clone(),
            dim: alg.dim(),
            defining_dim: alg.defining_dim,
            basis: alg.basis_names.clone(),
        },
        euler: check_euler(s.h(), &tol),
        grading_dims: s.grading.dims,
        subspaces: s.dims(),
        cone: ConeSummary {
            exact: cone.exact,
            orbit_samples: cone.orbit_samples.len(),
            sample_radius: SAMPLE_RADIUS,
            exact_generators: cone.exact_generators.as_ref().map_or(0, |g| g.len()),
            causal_euler: check_causal_euler(&cone, s.h())?,
        },
        config: cfg,
    };
    Ok((serde_json::to_value(report).expect("serializable report"), true))
}

fn cmd_wedge(c: &Common, word: &str) -> Result<(serde_json::Value, bool), NccError> {
    let tol = tolerances(c)?;
    let (s, cfg) = structure(c, tol)?;
    if cfg.samples == 0 {
        return Err(NccError::Parse("--samples must be positive".into()));
    }
    let letters = parse_word(word)?;
    let g = build_word(s.algebra(), s.h(), &letters)?;
    let cone = build_cone_with(&s, cfg.samples, cfg.seed, mode(c))?;
    let p = CosetPoint::new(&s, g.clone());
    let positive = cone.positivity_member(&g)?;
    let ball_status = match TripleSystem::new(&s) {
        Ok(ts) => Some(ts.ball_status(&g)?),
        Err(_) => None,
    };
    let omega = if positive && s.q_k.dim() > 0 {
        Some(match wedge_factor_witness(&p, &cone, cfg.seed) {
            Ok(Some(w)) => OmegaData {
                found: true,
                rho: Some(w.rho),
                x: Some(s.q_k.basis_coords(&w.x).iter().copied().collect()),
                a: Some(s.grading.zero.basis_coords(&w.a).iter().copied().collect()),
            },
            Ok(None) | Err(NccError::Precondition(_)) => OmegaData { found: false, rho: None, x: None, a: None },
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    let report = WedgeReport {
        command: "wedge",
        word: letters,
        positivity_member: positive,
        geodesic_orbit: geodesic_orbit_test(&p, &cone)?,
        in_m_h: in_m_x(&p, s.h())?,
        ball_status,
        omega,
        config: cfg,
    };
    Ok((serde_json::to_value(report).expect("serializable report"), true))
}

fn cmd_verify(c: &Common, suite: &str) -> Result<(serde_json::Value, bool), NccError> {
    let suite: Suite = suite.parse()?;
    let tolerances = tolerances(c)?;
    if let Some(a) = &c.algebra {
        let spec: AlgebraSpec = a.parse()?;
        let label = c.euler.clone().unwrap_or_else(|| default_label(&spec));
        let alg = build_algebra_with(spec.family, &spec.params, tolerances)?;
        euler_element(&alg, &label)?;
    }
    if c.samples == Some(0) || c.grid < 2 || !(c.tmax > 0.0) {
        return Err(NccError::Parse("need --samples > 0, --grid >= 2 and --tmax > 0".into()));
    }
    let cfg = VerifyConfig {
        algebra: c.algebra.clone(),
        euler: c.euler.clone().or_else(|| {
            c.algebra.as_ref().and_then(|a| a.parse::<AlgebraSpec>().ok()).map(|s| default_label(&s))
        }),
        tolerances,
        seed: c.seed,
        samples: c.samples.unwrap_or(VerifyConfig::default().samples),
        grid: c.grid,
        t_max: c.tmax,
        mode: mode(c),
    };
    let report = run_suite(suite, &cfg)?;
    let pass = report.pass;
    let mut value = serde_json::to_value(report).expect("serializable report");
    value["command"] = "verify".into();
    Ok((value, pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let c = &cli.common;
    let result = match &cli.command {
        Command::Info => cmd_info(c),
        Command::Wedge { word } => cmd_wedge(c, word),
        Command::Verify { suite } => cmd_verify(c, suite),
    };
    match result {
        Ok((mut value, pass)) => {
            if let Some(cfg) = value.get_mut("config").and_then(|v| v.as_object_mut()) {
                let name = match c.output {
                    Output::Json => "json",
                    Output::Table => "table",
                };
                cfg.insert("output".into(), name.into());
            }
            match c.output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
                Output::Table => print!("{}", table::render(&value)),
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("ncc: {e}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
