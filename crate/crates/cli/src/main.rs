//! `fluxlab`: run identity suites, evaluate invariants of library words, and
//! run convergence studies.
//!
//! Exit codes: 0 success, 2 identity failure or numerical error, 3 bad
//! configuration or usage.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fluxlab::geometry::QuadratureSpec;
use fluxlab::invariants::convergence::{default_ladder, identity_convergence, IdentityConvergence};
use fluxlab::invariants::identities::{check_all, convergence_instances, CheckConfig, IdentityId, Verdict};
use fluxlab::invariants::report::{Environment, Report};
use fluxlab::invariants::{calabi, flux, kappa, tau, tau_prime, InvariantValue};
use fluxlab::{Error, MapWord64};

use config::{Selection, SuiteConfig};

const EXIT_FAIL: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "fluxlab", version, about = "Flux, Calabi and ILM cocycle identity checks for disk maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Suite configuration (JSON).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Multiplies every identity tolerance.
    #[arg(long, value_name = "X")]
    tol_scale: Option<f64>,
    /// Worker threads.
    #[arg(long, value_name = "N", env = "FLUXLAB_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity checkers and write a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated identity ids, or "all"; overrides the config.
        #[arg(long, value_name = "IDS")]
        suite: Option<String>,
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Evaluate one invariant of a library word and print it as JSON.
    Eval {
        #[command(flatten)]
        common: Common,
        word: String,
        #[arg(value_enum)]
        op: Op,
    },
    /// Residual of an identity across a quadrature ladder.
    Convergence {
        #[command(flatten)]
        common: Common,
        id: String,
        /// Increasing resolutions: Gauss–Legendre order, or radial nodes for STOKES_5_4.
        #[arg(long, value_delimiter = ',', value_name = "N,N,N")]
        ladder: Option<Vec<usize>>,
        /// Library word to use instead of generated instances.
        #[arg(long, value_name = "NAME")]
        word: Option<String>,
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Op {
    Tau,
    Flux,
    Calabi,
    Kappa,
    #[value(name = "tau_prime", alias = "tau-prime")]
    TauPrime,
}

#[derive(Serialize)]
struct EvalOutput {
    word: String,
    op: Op,
    value: f64,
    est_error: f64,
    quadrature: QuadratureSpec,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConfigError(_) | Error::InvalidSpec(_) => EXIT_CONFIG,
            _ => EXIT_FAIL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(common: &Common) -> Result<(SuiteConfig, CheckConfig), Failure> {
    let mut suite = match &common.config {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = common.seed {
        suite.seed = s;
    }
    if let Some(x) = common.tol_scale {
        suite.tol_scale = x;
    }
    let check = suite.check_config()?;
    check.validate()?;
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(config_error("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| config_error(format!("cannot start worker pool: {e}")))?;
    }
    Ok((suite, check))
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify { common, suite, report } => {
            let (mut cfg, check) = load(&common)?;
            if let Some(s) = suite {
                cfg.identities = Selection::parse_list(&s);
            }
            let ids = cfg.identities.resolve()?;
            let rep = Report::new(check_all(&ids, &check), Environment::from_config(&check));
            print_summary(&rep);
            if let Some(p) = report {
                write_file(&p, &rep.to_json())?;
            }
            Ok(if rep.all_pass() { 0 } else { EXIT_FAIL })
        }
        Command::Eval { common, word, op } => {
            let (cfg, check) = load(&common)?;
            let w = cfg.word(&word)?;
            let (v, quadrature) = evaluate(&w, op, &check)?;
            let out = EvalOutput { word, op, value: v.value, est_error: v.est_error, quadrature };
            println!("{}", serde_json::to_string(&out).expect("output serializes"));
            Ok(0)
        }
        Command::Convergence { common, id, ladder, word, report } => {
            let (cfg, check) = load(&common)?;
            let id: IdentityId = id.parse()?;
            let ladder = ladder.unwrap_or_else(|| default_ladder(id));
            let words = match word {
                Some(name) => {
                    let w = cfg.word(&name)?;
                    let partner = if id == IdentityId::TauEuler { w.clone() } else { MapWord64::identity() };
                    vec![(w, partner)]
                }
                None => convergence_instances(id, &check, 4)?,
            };
            let study = identity_convergence(id, &words, &check.quadrature, &ladder)?;
            print_convergence(&study);
            if let Some(p) = report {
                write_file(&p, &serde_json::to_string_pretty(&study).expect("study serializes"))?;
            }
            Ok(if study.record.monotone { 0 } else { EXIT_FAIL })
        }
    }
}

fn evaluate(w: &MapWord64, op: Op, check: &CheckConfig) -> Result<(InvariantValue<f64>, QuadratureSpec), Error> {
    let (line, area) = (check.quadrature, check.area_quadrature);
    Ok(match op {
        Op::Tau => (tau(w, &line)?, line),
        Op::Flux => (flux(w, &line)?, line),
        Op::Calabi => (calabi(w, &area)?, area),
        Op::Kappa => (kappa(w, &area)?, area),
        Op::TauPrime => (tau_prime(w, &area)?, area),
    })
}

fn print_summary(rep: &Report) {
    println!("{:<20} {:>7} {:>4} {:>12} {:>10}", "identity", "verdict", "n", "max_resid", "tolerance");
    for s in &rep.suites {
        let verdict = match s.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        };
        let max = s.max_residual.map_or_else(|| "-".to_string(), |m| format!("{m:.3e}"));
        println!("{:<20} {:>7} {:>4} {:>12} {:>10.1e}", s.id.as_str(), verdict, s.n, max, s.tolerance);
        if let Some(e) = &s.error {
            println!("    {e}");
        }
    }
    let passed = rep.suites.iter().filter(|s| s.verdict == Verdict::Pass).count();
    println!("{passed}/{} passed", rep.suites.len());
}

fn print_convergence(study: &IdentityConvergence) {
    println!("{} convergence", study.id);
    println!("{:>10} {:>12}", "resolution", "residual");
    for (r, e) in study.record.resolutions.iter().zip(&study.record.errors) {
        println!("{r:>10} {e:>12.3e}");
    }
    println!("order {:?}, monotone {}", study.record.order, study.record.monotone);
}
