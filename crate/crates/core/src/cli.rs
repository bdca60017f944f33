//! Command-line interface.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{verify_interaction_inequalities_with, CertificateGrid, DampingCurve, HFunctions, DEFAULT_DAMPING_RESOLUTION};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fronttracker::run;
use crate::model::{PressureModel, State};
use crate::output::{describe_fan, write_damping, write_fan, write_run};
use crate::riemann::RiemannSolver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "phasefront", version, about = "Front tracking for the isothermal phase-transition system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run front tracking from a TOML config and write CSV/JSON outputs.
    Simulate(SimulateArgs),
    /// Solve one Riemann problem and print the fan.
    Riemann(RiemannArgs),
    /// Tabulate the damping coefficient d(m) with c(m) and k(m).
    Damping(DampingArgs),
    /// Check the same-family interaction inequalities and weighted-variation bounds on grids.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: the config's output.dir, else `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run even if the smallness hypotheses fail.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct RiemannArgs {
    /// Left state `v,u,lambda`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub left: Vec<f64>,
    /// Right state `v,u,lambda`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub right: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub k0: f64,
    #[arg(long, default_value_t = 4.0)]
    pub k1: f64,
    /// Also write the fan as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DampingArgs {
    #[arg(long)]
    pub m_max: f64,
    /// Number of equally spaced budgets in `(0, m_max]`.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_DAMPING_RESOLUTION)]
    pub resolution: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// TOML grid description; defaults are used for missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace h by a wrong function to exercise failure reporting.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Audit(_) => EXIT_AUDIT,
        _ => EXIT_ERROR,
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<PathBuf> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.run.seed = s;
    }
    if let Some(t) = args.t_end {
        cfg.run.t_end = t;
    }
    if let Some(s) = &args.snapshots {
        cfg.run.snapshots = s.clone();
    }
    cfg.run.force |= args.force;
    cfg.validate()?;
    let out = args.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let model = cfg.model()?;
    let raw = cfg.profile(&model)?;
    let tr = run(&model, &raw, &cfg.setup())?;
    write_run(&out, &tr, cfg.output.k_max)?;
    Ok(out)
}

fn parse_state(v: &[f64]) -> Result<State> {
    match v {
        [v, u, lam] => State::new(*v, *u, *lam),
        _ => Err(Error::Config(format!("a state needs three components v,u,lambda, got {v:?}"))),
    }
}

pub fn riemann(args: &RiemannArgs) -> Result<String> {
    let model = PressureModel::affine(args.k0, args.k1)?;
    let fan = RiemannSolver::default().solve(&model, &parse_state(&args.left)?, &parse_state(&args.right)?)?;
    if let Some(path) = &args.csv {
        let mut buf = Vec::new();
        write_fan(&mut buf, &fan)?;
        write_file(path, &buf)?;
    }
    Ok(describe_fan(&fan))
}

pub fn damping(args: &DampingArgs) -> Result<PathBuf> {
    if !(args.m_max > 0.0) || args.points == 0 {
        return Err(Error::Config(format!("need m_max > 0 and points ≥ 1, got {} and {}", args.m_max, args.points)));
    }
    let curve = DampingCurve::uniform(args.m_max, args.points, args.resolution);
    let mut buf = Vec::new();
    write_damping(&mut buf, &curve)?;
    let path = args.out.join("damping.csv");
    write_file(&path, &buf)?;
    Ok(path)
}

fn broken_h(e: f64) -> f64 {
    if e >= 0.0 { 3.0 * e } else { e.sinh() }
}

fn broken_h_prime(e: f64) -> f64 {
    if e >= 0.0 { 3.0 } else { e.cosh() }
}

/// Returns the report path and whether every check passed.
pub fn verify(args: &VerifyArgs) -> Result<(PathBuf, bool)> {
    let mut grid = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            toml::from_str::<CertificateGrid>(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => CertificateGrid::default(),
    };
    if let Some(s) = args.seed {
        grid.seed = s;
    }
    let hf = if args.inject_fault { HFunctions { h: broken_h, h_prime: broken_h_prime } } else { HFunctions::default() };
    let report = verify_interaction_inequalities_with(&grid, hf);
    let path = args.out.join("certificates.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(&path, text.as_bytes())?;
    Ok((path, report.passed))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Run a parsed command and return the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a).map(|out| {
            println!("wrote {}", out.display());
            EXIT_OK
        }),
        Command::Riemann(a) => riemann(a).map(|text| {
            print!("{text}");
            EXIT_OK
        }),
        Command::Damping(a) => damping(a).map(|path| {
            println!("wrote {}", path.display());
            EXIT_OK
        }),
        Command::Verify(a) => verify(a).map(|(path, passed)| {
            println!("wrote {} ({})", path.display(), if passed { "all checks passed" } else { "FAILED" });
            if passed { EXIT_OK } else { EXIT_CERTIFICATE }
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}
