//! Command-line verification harness: seeded randomized sweeps over the
//! operator identities and power recurrences, single-geodesic curvature
//! analysis, full verification matrices, and integrator cross-checks, all
//! with machine-readable JSON (and CSV) output.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed,
//! 2 configuration or usage error.

mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spaceform::algebra::{SpaceFormKind, SpaceFormSpec, StructureSet};
use spaceform::geodesic::{random_initial, BundleKind, InitialDataFile};
use spaceform::suite::{
    crosscheck_run, curvature_trial_from_init, default_stack_len, run_lemma_suite, Tolerances,
    SAMPLE_SIGMAS,
};

use output::{default_out_path, profile_svg, write_atomic};
use sweep::{run_sweep, SweepConfig};

#[derive(Parser)]
#[command(
    name = "spaceform",
    version,
    about = "Numerical verification of space-form curvature algebra and tangent-bundle geodesics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Real,
    Complex,
    Quaternionic,
}

impl From<KindArg> for SpaceFormKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Real => SpaceFormKind::Real,
            KindArg::Complex => SpaceFormKind::Complex,
            KindArg::Quaternionic => SpaceFormKind::Quaternionic,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BundleArg {
    Tm,
    T1m,
}

impl From<BundleArg> for BundleKind {
    fn from(b: BundleArg) -> Self {
        match b {
            BundleArg::Tm => BundleKind::TangentBundle,
            BundleArg::T1m => BundleKind::UnitTangentBundle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Randomized verification of the operator product tables, auxiliary
    /// identities, and power recurrences for one space form
    VerifyLemmas {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Real dimension (even for complex, multiple of 4 for quaternionic)
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        curvature: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Base tolerance for table/identity/closed-form checks; the
        /// least-squares reduction checks gate at 10x this value
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Report path (default: verify-lemmas.json under SPACEFORM_OUT_DIR
        /// or the current directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Curvature profile and structure certificates for one projected
    /// geodesic
    Curvatures {
        #[arg(long, value_enum, required_unless_present = "init")]
        kind: Option<KindArg>,
        #[arg(long, required_unless_present = "init")]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        curvature: f64,
        #[arg(long, value_enum, default_value = "t1m")]
        bundle: BundleArg,
        /// Vertical fraction of the bundle geodesic: 0 horizontal,
        /// 1 vertical, in between umbilical
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Load initial data from a fixture instead of drawing it
        #[arg(long)]
        init: Option<PathBuf>,
        /// Derivative-stack length (default: family-dependent, at least dim)
        #[arg(long)]
        max_derivative: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a bar chart of the curvature profile
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the full verification matrix described by a JSON config,
    /// producing an aggregate JSON report and a per-trial CSV table
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// RK4 integration against the closed-form flow: per-step errors,
    /// empirical convergence order, and conservation drift
    Crosscheck {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        curvature: f64,
        #[arg(long, value_enum, default_value = "t1m")]
        bundle: BundleArg,
        #[arg(long, default_value_t = 0.7)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma_max: f64,
        /// Comma-separated step sizes, largest first
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 5e-3, 2.5e-3, 1e-3])]
        steps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

impl From<spaceform::Error> for CliError {
    fn from(e: spaceform::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::VerifyLemmas {
            kind,
            dim,
            curvature,
            trials,
            seed,
            tol,
            out,
        } => cmd_verify_lemmas(kind.into(), dim, curvature, trials, seed, tol, out),
        Command::Curvatures {
            kind,
            dim,
            curvature,
            bundle,
            rho,
            seed,
            init,
            max_derivative,
            out,
            svg,
        } => cmd_curvatures(
            kind.map(Into::into),
            dim,
            curvature,
            bundle.into(),
            rho,
            seed,
            init,
            max_derivative,
            out,
            svg,
        ),
        Command::Sweep { config } => cmd_sweep(&config),
        Command::Crosscheck {
            kind,
            dim,
            curvature,
            bundle,
            rho,
            sigma_max,
            steps,
            seed,
            out,
        } => cmd_crosscheck(
            kind.into(),
            dim,
            curvature,
            bundle.into(),
            rho,
            sigma_max,
            &steps,
            seed,
            out,
        ),
    }
}

fn lemma_tolerances(tol: f64) -> Result<Tolerances, CliError> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(CliError::Usage(format!("tol must be positive, got {tol}")));
    }
    Ok(Tolerances {
        table: tol,
        closed_form_power: tol,
        quintic: tol,
        cubic: tol,
        reduction: 10.0 * tol,
        ..Tolerances::default()
    })
}

fn cmd_verify_lemmas(
    kind: SpaceFormKind,
    dim: usize,
    curvature: f64,
    trials: usize,
    seed: u64,
    tol: f64,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    if trials < 1 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let spec = SpaceFormSpec::new(kind, dim, curvature)?;
    let structures = StructureSet::for_spec(&spec)?;
    let tolerances = lemma_tolerances(tol)?;
    let (reports, summary) = run_lemma_suite(&spec, &structures, trials, seed, &tolerances);
    let doc = serde_json::json!({
        "command": "verify-lemmas",
        "config": {
            "kind": kind,
            "dim": dim,
            "curvature": curvature,
            "trials": trials,
            "seed": seed,
            "tol": tol,
        },
        "summary": summary,
        "trials": reports,
    });
    let path = out.unwrap_or_else(|| default_out_path("verify-lemmas"));
    write_atomic(&path, &pretty(&doc))?;
    println!("verify-lemmas kind={kind} dim={dim} curvature={curvature} trials={trials} seed={seed}");
    for (name, residual) in &summary.max_residuals {
        println!("  {name}: max residual {residual:.3e}");
    }
    if let Some(v) = &summary.quintic_variants {
        println!(
            "  quintic tail coefficient: {} holds (max {:.3e}); {} rejected (min {:.3e})",
            v.resolved, v.resolved_max_residual, v.rejected, v.rejected_min_residual
        );
    }
    if let Some(v) = &summary.product_line1 {
        println!(
            "  product identity line 1: {} holds (max {:.3e}); {} rejected (min {:.3e})",
            v.resolved, v.resolved_max_residual, v.rejected, v.rejected_min_residual
        );
    }
    println!(
        "  report: {} — {}",
        path.display(),
        if summary.all_pass { "PASS" } else { "FAIL" }
    );
    Ok(summary.all_pass)
}

#[allow(clippy::too_many_arguments)]
fn cmd_curvatures(
    kind: Option<SpaceFormKind>,
    dim: Option<usize>,
    curvature: f64,
    bundle: BundleKind,
    rho: f64,
    seed: u64,
    init_path: Option<PathBuf>,
    max_derivative: Option<usize>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<bool, CliError> {
    let (spec, bundle, init, seed, source) = match &init_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: InitialDataFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid fixture {}: {e}", path.display())))?;
            let (spec, bundle, init) = file.into_parts()?;
            (spec, bundle, init, 0, path.display().to_string())
        }
        None => {
            let kind = kind.ok_or_else(|| CliError::Usage("--kind is required".into()))?;
            let dim = dim.ok_or_else(|| CliError::Usage("--dim is required".into()))?;
            let spec = SpaceFormSpec::new(kind, dim, curvature)?;
            let init = random_initial(&spec, bundle, rho, seed)?;
            (spec, bundle, init, seed, "seeded".to_string())
        }
    };
    let structures = StructureSet::for_spec(&spec)?;
    let tolerances = Tolerances::default();
    let stack_len = max_derivative.unwrap_or_else(|| default_stack_len(spec.kind, spec.dim));
    if stack_len < 1 {
        return Err(CliError::Usage("max-derivative must be at least 1".into()));
    }
    let report = curvature_trial_from_init(
        &spec,
        &structures,
        bundle,
        &init,
        0,
        seed,
        &tolerances,
        &SAMPLE_SIGMAS,
        stack_len,
    )?;
    let status = if report.profile.is_some() { "ok" } else { "degenerate" };
    let initial = InitialDataFile::from_parts(&spec, bundle, &init);
    let doc = serde_json::json!({
        "command": "curvatures",
        "config": {
            "kind": spec.kind,
            "dim": spec.dim,
            "curvature": spec.curvature,
            "bundle": bundle,
            "rho": init.rho,
            "seed": seed,
            "source": source,
            "max_derivative": stack_len,
        },
        "status": status,
        "initial": initial,
        "trial": report,
    });
    let path = out.unwrap_or_else(|| default_out_path("curvatures"));
    write_atomic(&path, &pretty(&doc))?;
    if let Some(svg_path) = svg {
        let chart = report
            .profile
            .as_ref()
            .map(profile_svg)
            .unwrap_or_else(|| profile_svg(&spaceform::frenet::CurvatureProfile {
                speed: 0.0,
                curvatures: vec![],
                frenet_rank: 1,
            }));
        write_atomic(&svg_path, &chart)?;
    }
    println!(
        "curvatures kind={} dim={} curvature={} bundle={bundle} rho={} ({source})",
        spec.kind, spec.dim, spec.curvature, init.rho
    );
    match &report.profile {
        Some(p) => {
            let ks: Vec<String> = p.curvatures.iter().map(|k| format!("{k:.6}")).collect();
            println!("  speed {:.6}, curvatures [{}]", p.speed, ks.join(", "));
        }
        None => println!("  degenerate (vertical geodesic): no projected curve"),
    }
    for c in &report.checks {
        println!(
            "  {}: residual {:.3e} {}",
            c.name,
            c.residual,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    let pass = report.all_pass();
    println!(
        "  report: {} — {}",
        path.display(),
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(pass)
}

fn cmd_sweep(config_path: &PathBuf) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(config_path)?;
    let config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", config_path.display())))?;
    let outcome = run_sweep(&config).map_err(CliError::Usage)?;
    let json_path = config.out.with_extension("json");
    let csv_path = config.out.with_extension("csv");
    write_atomic(&json_path, &pretty(&outcome.aggregate))?;
    write_atomic(&csv_path, &outcome.csv)?;
    println!(
        "sweep: {} cells × {} trials — {}",
        outcome.aggregate["cells"], config.trials,
        if outcome.all_pass { "PASS" } else { "FAIL" }
    );
    println!("  aggregate: {}", json_path.display());
    println!("  table: {}", csv_path.display());
    Ok(outcome.all_pass)
}

#[allow(clippy::too_many_arguments)]
fn cmd_crosscheck(
    kind: SpaceFormKind,
    dim: usize,
    curvature: f64,
    bundle: BundleKind,
    rho: f64,
    sigma_max: f64,
    steps: &[f64],
    seed: u64,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    if steps.is_empty() {
        return Err(CliError::Usage("at least one step size is required".into()));
    }
    for &s in steps {
        if s <= 0.0 || !s.is_finite() {
            return Err(CliError::Usage(format!("invalid step size {s}")));
        }
    }
    if sigma_max <= 0.0 || !sigma_max.is_finite() {
        return Err(CliError::Usage(format!("invalid sigma-max {sigma_max}")));
    }
    let spec = SpaceFormSpec::new(kind, dim, curvature)?;
    let structures = StructureSet::for_spec(&spec)?;
    let report = crosscheck_run(
        &spec,
        &structures,
        bundle,
        rho,
        seed,
        sigma_max,
        steps,
        &Tolerances::default(),
    )?;
    let doc = serde_json::json!({
        "command": "crosscheck",
        "config": {
            "kind": kind,
            "dim": dim,
            "curvature": curvature,
            "bundle": bundle,
            "rho": rho,
            "sigma_max": sigma_max,
            "steps": steps,
            "seed": seed,
        },
        "report": report,
    });
    let path = out.unwrap_or_else(|| default_out_path("crosscheck"));
    write_atomic(&path, &pretty(&doc))?;
    println!("crosscheck kind={kind} dim={dim} curvature={curvature} bundle={bundle} rho={rho}");
    for r in &report.runs {
        println!(
            "  step {:9.1e}: max state error {:.3e}, conservation drift {:.3e}",
            r.step, r.max_state_error, r.conservation_drift
        );
    }
    if report.measured_order.is_finite() {
        println!("  measured order {:.4}", report.measured_order);
    } else {
        println!("  measured order: not measurable at these step sizes");
    }
    println!(
        "  report: {} — {}",
        path.display(),
        if report.pass { "PASS" } else { "FAIL" }
    );
    Ok(report.pass)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
