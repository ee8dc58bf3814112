//! `liouville`: verify, integrate and construct (b-)integrable systems from system files.
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liouville_core::actionangle::{action_integrals_with, find_period_lattice};
use liouville_core::flow::{self, Method};
use liouville_core::lift::{build_lift, parse_base_spec, ActionSpec, LiftKind};
use liouville_core::sysfile::{SystemFile, VerifySection};
use liouville_core::{catalog, Error};

const SEED_VAR: &str = "LIOUVILLE_SEED";
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "liouville", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check involutivity, independence, Jacobi identity and transversality; prints a JSON report
    Validate {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        jacobi_tol: Option<f64>,
        #[arg(long)]
        involutivity_tol: Option<f64>,
        #[arg(long)]
        independence: Option<f64>,
    },
    /// Integrate the Hamiltonian flow of one integral; writes CSV
    Flow {
        file: PathBuf,
        /// Name of the Hamiltonian in [integrals]
        #[arg(long)]
        integral: String,
        /// Initial point, comma-separated in chart order
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1e-2)]
        dt: f64,
        /// Final time
        #[arg(long = "T", visible_alias = "t-final", default_value_t = 10.0)]
        t_final: f64,
        #[arg(long, default_value = "implicit_midpoint")]
        method: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Period lattice, action integrals and modular period at a point; prints JSON
    Actions {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Cotangent lift of an abelian action; writes a system file
    Lift {
        /// e.g. S1xR2, T2, R1
        #[arg(long)]
        base: String,
        /// e.g. "rot(theta);rotation(x1,x2)"
        #[arg(long)]
        action: String,
        /// canonical, twisted_b:c=1[,angle=theta] or canonical_b:x1
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "lift")]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List catalog systems, or export one as a system file
    Catalog {
        #[command(subcommand)]
        action: Option<CatalogAction>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    Export {
        id: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure with its exit code: 1 for failed checks, 2 for usage and parse errors.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. }
            | Error::UnknownIdentifier(_)
            | Error::Format(_)
            | Error::InvalidArgument(_)
            | Error::ChartMismatch(_)
            | Error::UnknownCatalogId(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_system_file(path: &Path) -> Result<SystemFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    SystemFile::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_output(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: 2, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    // Going through `Value` sorts object keys.
    let v = serde_json::to_value(value).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    s.push('\n');
    Ok(s)
}

fn parse_point(src: &str, names: &[&str]) -> Result<Vec<f64>, Failure> {
    let values: Vec<f64> = src
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::usage(format!("`{}` is not a number", s.trim()))))
        .collect::<Result<_, _>>()?;
    if values.len() != names.len() {
        return Err(Failure::usage(format!(
            "point has {} values, expected dimension {} ({})",
            values.len(),
            names.len(),
            names.join(",")
        )));
    }
    Ok(values)
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{SEED_VAR} must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

#[allow(clippy::too_many_arguments)]
fn validate(
    file: &Path,
    seed: Option<u64>,
    samples: Option<usize>,
    jacobi_tol: Option<f64>,
    involutivity_tol: Option<f64>,
    independence: Option<f64>,
) -> CmdResult {
    let sf = read_system_file(file)?;
    let sys = sf.to_system().map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    let mut cfg = sf.verify_config();
    let file_seed = sf.verify.as_ref().and_then(|v| v.seed);
    cfg.seed = seed.or(file_seed).or(env_seed()?).unwrap_or(DEFAULT_SEED);
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if cfg.samples == 0 {
        return Err(Failure::usage("need at least one sample"));
    }
    if let Some(t) = jacobi_tol {
        cfg.tolerances.jacobi = t;
    }
    if let Some(t) = involutivity_tol {
        cfg.tolerances.involutivity = t;
    }
    if let Some(t) = independence {
        cfg.tolerances.independence = t;
    }
    let report = sys.verify(&cfg);
    print!("{}", to_json(&report)?);
    for f in &report.failures {
        eprintln!("check failed: {f}");
    }
    Ok(if report.passed { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn flow_cmd(
    file: &Path,
    integral: &str,
    x0: &str,
    dt: f64,
    t_final: f64,
    method: &str,
    output: Option<&Path>,
) -> CmdResult {
    let sf = read_system_file(file)?;
    let sys = sf.to_system().map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    let names = sys.chart().names();
    let index = sys.integral_index(integral).ok_or_else(|| {
        let known: Vec<&str> = sys.integrals().iter().map(|i| i.name.as_str()).collect();
        Failure::usage(format!("unknown integral `{integral}` (have {})", known.join(", ")))
    })?;
    let x0 = parse_point(x0, &names)?;
    let method: Method = method.parse()?;
    let tr = flow::integrate(&sys, index, &x0, dt, t_final, method)?;
    let mut csv = String::new();
    csv.push_str("t,");
    csv.push_str(&names.join(","));
    csv.push_str(",drift\n");
    for ((t, x), d) in tr.times.iter().zip(&tr.states).zip(&tr.drift) {
        let _ = write!(csv, "{t:.16e}");
        for v in x {
            let _ = write!(csv, ",{v:.16e}");
        }
        let _ = writeln!(csv, ",{d:.16e}");
    }
    write_output(output, &csv)?;
    Ok(0)
}

fn actions(file: &Path, point: &str, samples: usize) -> CmdResult {
    let sf = read_system_file(file)?;
    let sys = sf.to_system().map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
    let m = parse_point(point, &sys.chart().names())?;
    let lattice = find_period_lattice(&sys, &m)?;
    let report = action_integrals_with(&sys, &lattice, &m, samples, flow::DEFAULT_MAX_STEP)?;
    print!("{}", to_json(&report)?);
    Ok(0)
}

fn lift(base: &str, action: &str, kind: &str, name: &str, output: Option<&Path>) -> CmdResult {
    let base = parse_base_spec(base)?;
    let action = ActionSpec::parse(action, &base)?;
    let kind = LiftKind::parse(kind)?;
    let mut lift = build_lift(base, &action, &kind)?;
    for w in &lift.warnings {
        eprintln!("warning: {w}");
    }
    lift.system.name = name.to_string();
    let text = SystemFile::from_system(&lift.system, None::<VerifySection>).to_toml()?;
    write_output(output, &text)?;
    Ok(0)
}

fn catalog_cmd(action: Option<&CatalogAction>) -> CmdResult {
    match action {
        None => {
            for (id, about) in catalog::FAMILIES {
                println!("{id:<22} {about}");
            }
            Ok(0)
        }
        Some(CatalogAction::Export { id, output }) => {
            let entry = catalog::get(id)?;
            let text = SystemFile::from_system(&entry.system, None).to_toml()?;
            write_output(output.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file, seed, samples, jacobi_tol, involutivity_tol, independence } => {
            validate(file, *seed, *samples, *jacobi_tol, *involutivity_tol, *independence)
        }
        Command::Flow { file, integral, x0, dt, t_final, method, output } => {
            flow_cmd(file, integral, x0, *dt, *t_final, method, output.as_deref())
        }
        Command::Actions { file, point, samples } => actions(file, point, *samples),
        Command::Lift { base, action, kind, name, output } => lift(base, action, kind, name, output.as_deref()),
        Command::Catalog { action } => catalog_cmd(action.as_ref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
