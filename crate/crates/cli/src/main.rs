mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use ulamfloat_core::asa::{self, ExperimentOptions, ExperimentRecord};
use ulamfloat_core::caps::{Backend, BackendChoice, CapOptions};
use ulamfloat_core::floating::{self, BodyApproximation, CheckReport, WeightedBody};
use ulamfloat_core::special::{alternative_constant, shrinkage_constant};
use ulamfloat_core::weights::{Extension, WeightFunction, WeightSpec};
use ulamfloat_core::{calculus, floatsim, BodyHandle, BodySpec, Direction};

use output::{Emitter, Table};

#[derive(Parser, Debug)]
#[command(name = "ulamfloat", version, about = "Ulam floating bodies and affine surface area experiments")]
struct Cli {
    /// Worker threads (default: available parallelism). ULAMFLOAT_THREADS overrides.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; `.csv` selects CSV, anything else JSON. Default: stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Force the output format.
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize, Clone)]
struct BodyArgs {
    /// Body spec: a JSON file or an inline JSON object.
    #[arg(long)]
    body: String,
}

#[derive(Args, Debug, Serialize, Clone)]
struct WeightArgs {
    /// Weight spec: a JSON file or an inline JSON object (default uniform).
    #[arg(long)]
    weight: Option<String>,
    /// Cap backend.
    #[arg(long, default_value = "auto", value_parser = ["auto", "analytic", "exact-clip", "slice-quadrature", "monte-carlo"])]
    backend: String,
    /// Relative tolerance of the slice quadrature.
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    /// Monte Carlo samples per cap.
    #[arg(long, default_value_t = 200_000)]
    mc_samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Summary of a body.
    Body(BodyArgs),
    /// Cap cut of mass delta in direction theta.
    Cut {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        weight: WeightArgs,
        /// Comma-separated direction (normalized internally).
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        delta: f64,
    },
    /// Ulam floating body M_delta on a direction grid.
    Ulam {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 512)]
        dirs: usize,
        /// Planar only: refine until |outer| - |inner| <= gap.
        #[arg(long)]
        gap: Option<f64>,
    },
    /// Weighted floating body F_delta on a direction grid.
    Floating {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 512)]
        dirs: usize,
    },
    /// L_p centroid body Z_p.
    Zp {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 512)]
        dirs: usize,
    },
    /// Inclusion and identity checks; exit code 1 on failure.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
    /// L_p affine surface area of a ball or ellipsoid.
    Asa {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    /// Ratios (|K| - |M_delta|)/delta^{2/(n+1)} on a geometric schedule.
    Limit {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        #[serde(flatten)]
        schedule: ScheduleArgs,
    },
    /// The limit experiment with weight phi_p against c_n as_p(K).
    Pasa {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        /// Extend phi_p off the boundary as the boundary value on a collar of
        /// this relative width instead of radially.
        #[arg(long)]
        collar: Option<f64>,
        #[command(flatten)]
        #[serde(flatten)]
        schedule: ScheduleArgs,
    },
    /// Finite-difference check of the cap gradient formulas.
    GradCheck {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Planar flotation equilibria (the body is normalized first).
    Float2d {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 4096)]
        angles: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Roundness score of M_delta.
    Roundness {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 512)]
        dirs: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CheckCommand {
    /// F_{(1-1/e) delta} ⊆ M_delta ⊆ F_{delta/e}.
    Sandwich {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[command(flatten)]
        #[serde(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 512)]
        dirs: usize,
    },
    /// K_delta ⊆ M_delta ⊆ e Z_{log(1/delta)} (body normalized first).
    ZpSandwich {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 128)]
        dirs: usize,
    },
    /// M_{1-delta} versus M_delta (body normalized first).
    Symmetry {
        #[command(flatten)]
        #[serde(flatten)]
        body: BodyArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 64)]
        dirs: usize,
    },
}

#[derive(Args, Debug, Serialize, Clone)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 1e-2)]
    delta0: f64,
    #[arg(long, default_value_t = 6)]
    steps: usize,
    /// Directions for n = 3 and the starting grid for n = 2.
    #[arg(long, default_value_t = 2048)]
    dirs: usize,
    /// delta_{k+1} = delta_k / factor (default 10^0.8).
    #[arg(long)]
    factor: Option<f64>,
    /// Planar refinement target relative to |K| - |inner|.
    #[arg(long, default_value_t = 1e-4)]
    gap_fraction: f64,
}

impl ScheduleArgs {
    fn options(&self) -> ExperimentOptions {
        let d = ExperimentOptions::default();
        ExperimentOptions {
            delta0: self.delta0,
            steps: self.steps,
            directions: self.dirs,
            schedule_factor: self.factor.unwrap_or(d.schedule_factor),
            gap_fraction: self.gap_fraction,
            ..d
        }
    }
}

/// Errors in the user's input: exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn read_spec(arg: &str) -> anyhow::Result<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| UsageError(format!("cannot read `{arg}`: {e}")).into())
}

fn load_body(a: &BodyArgs) -> anyhow::Result<BodyHandle> {
    let text = read_spec(&a.body)?;
    BodySpec::from_json(&text).map_err(|e| UsageError(format!("body spec: {e}")).into())
}

fn load_weighted(body: BodyHandle, a: &WeightArgs) -> anyhow::Result<WeightedBody> {
    let weight = match &a.weight {
        None => WeightFunction::uniform(),
        Some(w) => {
            let text = read_spec(w)?;
            WeightSpec::from_json(&text, &body).map_err(|e| UsageError(format!("weight spec: {e}")))?
        }
    };
    let backend = match a.backend.as_str() {
        "analytic" => BackendChoice::Force(Backend::Analytic),
        "exact-clip" => BackendChoice::Force(Backend::ExactClip),
        "slice-quadrature" => BackendChoice::Force(Backend::SliceQuadrature),
        "monte-carlo" => BackendChoice::Force(Backend::MonteCarlo),
        _ => BackendChoice::Auto,
    };
    if !(a.rel_tol > 0.0) {
        return Err(UsageError("--rel-tol must be positive".into()).into());
    }
    let opts = CapOptions {
        backend,
        rel_tol: a.rel_tol,
        mc_samples: a.mc_samples,
        seed: a.seed,
        ..CapOptions::default()
    };
    Ok(WeightedBody::with_options(body, weight, opts)?)
}

fn parse_direction(s: &str, n: usize) -> anyhow::Result<Direction> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| UsageError(format!("--theta: {e}")))?;
    if v.len() != n {
        return Err(UsageError(format!("--theta: expected {n} coordinates, got {}", v.len())).into());
    }
    Direction::new(DVector::from_vec(v)).map_err(|e| UsageError(format!("--theta: {e}")).into())
}

fn normalized(body: BodyHandle) -> anyhow::Result<BodyHandle> {
    Ok(body.normalized()?)
}

fn approximation_output(a: &BodyApproximation) -> (Value, Table) {
    let n = a.directions.first().map_or(0, |d| d.len());
    let mut header: Vec<String> = (0..n).map(|i| format!("theta{i}")).collect();
    header.push("support".into());
    header.extend((0..n).map(|i| format!("x{i}")));
    let rows = a
        .directions
        .iter()
        .zip(&a.support_values)
        .zip(&a.boundary_points)
        .map(|((t, h), x)| t.iter().copied().chain([*h]).chain(x.iter().copied()).collect())
        .collect();
    let bracket = a.volume_bracket().map(|(lo, hi)| vec![lo, hi]);
    let value = json!({
        "kind": format!("{:?}", a.kind),
        "param": a.param,
        "weight": a.weight,
        "directions": a.len(),
        "volume": bracket,
        "hausdorff": finite(a.hausdorff),
        "gap_estimate": finite(a.gap_estimate),
        "support": a.directions.iter().zip(&a.support_values)
            .map(|(t, h)| json!({"theta": t.as_slice(), "h": h})).collect::<Vec<_>>(),
        "boundary_points": a.boundary_points.iter().map(|x| x.as_slice().to_vec()).collect::<Vec<_>>(),
    });
    (value, Table { header, rows })
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn check_output(r: &CheckReport) -> Value {
    json!({
        "check": r.name,
        "holds": r.holds,
        "worst": r.worst,
        "tolerance": r.tolerance,
        "witness": r.witness,
        "details": r.details.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
    })
}

fn experiment_output(r: &ExperimentRecord) -> (Value, Table) {
    let header = ["k", "delta", "ratio_lo", "ratio_hi", "extrapolated", "reference"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = r
        .steps
        .iter()
        .map(|s| vec![s.k as f64, s.delta, s.ratio_lo, s.ratio_hi, r.extrapolated, r.reference])
        .collect();
    let value = json!({
        "body": r.body,
        "weight": r.weight,
        "n": r.n,
        "steps": r.steps.iter().map(|s| json!({
            "k": s.k, "delta": s.delta, "ratio": [s.ratio_lo, s.ratio_hi], "directions": s.directions,
        })).collect::<Vec<_>>(),
        "extrapolated": [r.extrapolated - r.uncertainty, r.extrapolated + r.uncertainty],
        "extrapolated_estimate": r.extrapolated,
        "reference": r.reference,
        "constant": r.constant,
        "constant_candidates": {
            "shrinkage": shrinkage_constant(r.n),
            "alternative": alternative_constant(r.n),
            "measured": if r.reference > 0.0 { json!(r.extrapolated * r.constant / r.reference) } else { Value::Null },
        },
        "non_monotone": r.non_monotone,
    });
    (value, Table { header, rows })
}

/// Runs one command; `Ok(false)` means a check failed.
fn run(cli: &Cli, em: &mut Emitter) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Body(b) => {
            let body = load_body(b)?;
            em.json(json!({
                "dim": body.dim(),
                "volume": body.volume(),
                "barycenter": body.barycenter().as_slice(),
                "diameter": body.diameter(),
                "interior_point": body.interior_point().as_slice(),
                "inradius": body.inradius(),
                "spec": body.to_spec(),
            }))
        }
        Command::Cut { body, weight, theta, delta } => {
            let wb = load_weighted(load_body(body)?, weight)?;
            let th = parse_direction(theta, wb.dim())?;
            let cut = wb.cap_cut(&th, *delta)?;
            em.json(json!({
                "d": cut.d,
                "barycenter": cut.barycenter.as_slice(),
                "mass": cut.mass,
                "backend": cut.backend,
                "error_estimate": cut.error_estimate,
            }))
        }
        Command::Ulam { body, weight, delta, dirs, gap } => {
            let wb = load_weighted(load_body(body)?, weight)?;
            let a = match gap {
                Some(g) => floating::build_ulam_body_adaptive(&wb, *delta, (*dirs).min(256), *g, (*dirs).max(256) * 64)?,
                None => floating::build_ulam_body(&wb, *delta, *dirs)?,
            };
            let (v, t) = approximation_output(&a);
            em.both(v, t)
        }
        Command::Floating { body, weight, delta, dirs } => {
            let wb = load_weighted(load_body(body)?, weight)?;
            let (v, t) = approximation_output(&floating::build_floating_body(&wb, *delta, *dirs)?);
            em.both(v, t)
        }
        Command::Zp { body, p, dirs } => {
            let (v, t) = approximation_output(&floating::build_zp_body(&load_body(body)?, *p, *dirs)?);
            em.both(v, t)
        }
        Command::Check { which } => {
            let r = match which {
                CheckCommand::Sandwich { body, weight, delta, dirs } => {
                    let wb = load_weighted(load_body(body)?, weight)?;
                    floating::sandwich_check(&wb, *delta, *dirs)?
                }
                CheckCommand::ZpSandwich { body, delta, dirs } => {
                    floating::zp_sandwich_check(&normalized(load_body(body)?)?, *delta, *dirs)?
                }
                CheckCommand::Symmetry { body, delta, dirs } => {
                    floating::symmetry_check(&normalized(load_body(body)?)?, *delta, *dirs)?
                }
            };
            em.json(check_output(&r))?;
            return Ok(r.holds);
        }
        Command::Asa { body, p } => {
            let b = load_body(body)?;
            em.json(json!({"p": p, "as_p": asa::asa_p(&b, *p)?}))
        }
        Command::Limit { body, weight, schedule } => {
            let wb = load_weighted(load_body(body)?, weight)?;
            let (v, t) = experiment_output(&asa::limit_experiment(&wb, &schedule.options())?);
            em.both(v, t)
        }
        Command::Pasa { body, p, collar, schedule } => {
            let b = load_body(body)?;
            let ext = collar.map_or(Extension::Radial, |width| Extension::Collar { width });
            let (v, t) = experiment_output(&asa::pasa_experiment(&b, *p, ext, &schedule.options())?);
            em.both(v, t)
        }
        Command::GradCheck { body, samples, seed } => {
            let b = load_body(body)?;
            let checks = calculus::grad_check_random(&b, *samples, *seed)?;
            let max_grad = checks.iter().map(|c| c.grad_deviation).fold(0.0, f64::max);
            let max_jac = checks.iter().map(|c| c.jac_deviation).fold(0.0, f64::max);
            let passes = checks.iter().all(|c| c.passes);
            eprintln!("max FD deviation: gradient {max_grad:.3e}, jacobian {max_jac:.3e}");
            em.json(json!({
                "passes": passes,
                "max_grad_deviation": max_grad,
                "max_jac_deviation": max_jac,
                "checks": checks,
            }))?;
            return Ok(passes);
        }
        Command::Float2d { body, rho, angles, tol } => {
            if !(*tol > 0.0) {
                bail!(UsageError("--tol must be positive".into()));
            }
            let b = normalized(load_body(body)?)?;
            let e = floatsim::equilibrium_directions(&b, *rho, *angles, *tol)?;
            em.json(json!({
                "rho": rho,
                "floats-in-every-position": e.floats_in_every_position,
                "equilibrium_angles": if e.floats_in_every_position { vec![] } else { e.angles.clone() },
                "count": if e.floats_in_every_position { Value::Null } else { json!(e.angles.len()) },
                "max_abs_torque": e.max_abs_torque,
            }))
        }
        Command::Roundness { body, weight, delta, dirs } => {
            let wb = load_weighted(load_body(body)?, weight)?;
            em.json(json!({"roundness": floatsim::ulam_m_body_roundness(&wb, *delta, *dirs)?}))
        }
    }?;
    Ok(true)
}

fn configure_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let env = std::env::var("ULAMFLOAT_THREADS").ok();
    let threads = match env {
        Some(s) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| UsageError(format!("ULAMFLOAT_THREADS must be a positive integer, got `{s}`")))?,
        ),
        None => flag,
    };
    if let Some(t) = threads {
        if t == 0 {
            bail!(UsageError("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("thread pool")?;
    }
    Ok(())
}

fn find_seed(v: &Value) -> Option<u64> {
    let o = v.as_object()?;
    o.get("seed").and_then(Value::as_u64).or_else(|| o.values().find_map(find_seed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|_| {
        let config = serde_json::to_value(&cli.command).context("config")?;
        let seed = find_seed(&config);
        let mut em = Emitter::new(cli.out.clone(), cli.format.clone(), config, seed);
        let ok = run(&cli, &mut em)?;
        em.finish()?;
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
