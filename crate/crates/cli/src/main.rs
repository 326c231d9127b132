//! `nicesos`: solve NPA and one-sided NPA relaxations, and extract, verify
//! and nicify sum-of-squares certificates.
//!
//! Exit codes: 0 success, 1 a check failed, 2 the solver did not reach an
//! optimal solution, 3 bad input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nicesos::certificate::{extract, is_nice, load_cert, save_cert, verify, DEFAULT_CLAMP_TOL};
use nicesos::games::{builtin, builtin_names, load_spec, save_spec, GameSpec};
use nicesos::nicify::nicify_level1;
use nicesos::relaxation::{build_npa, build_onesided};
use nicesos::sdp::{solve, SolveStatus, SolverOptions};
use nicesos::{Error, GamePolynomial};

const DEFAULT_SOLVE_TOL: f64 = 1e-8;
const DEFAULT_VERIFY_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "nicesos", version, about = "Quantum value bounds and nice SoS certificates for nonlocal games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and solve a relaxation, print a JSON report.
    Solve(SolveArgs),
    /// Certificate operations.
    #[command(subcommand)]
    Cert(CertCommand),
    /// Built-in games.
    #[command(subcommand)]
    Games(GamesCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum HierarchyArg {
    Npa,
    Onpa,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Built-in game name or path to a game/polynomial file.
    #[arg(long)]
    game: String,
    #[arg(long, value_enum, default_value = "npa")]
    hierarchy: HierarchyArg,
    #[arg(long, default_value_t = 1)]
    level: usize,
    /// Gap and feasibility tolerance of the solver.
    #[arg(long, env = "NICESOS_TOL")]
    tol: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extract the dual certificate and save it here.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CertCommand {
    /// Check `bound − P = Σ λ r†r + Σ μ s` symbolically.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        game: String,
        #[arg(long, env = "NICESOS_TOL")]
        tol: Option<f64>,
    },
    /// Turn a degree-1 certificate into a nice one.
    Nicify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        game: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report terms that involve more than one Alice question.
    CheckNice {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Subcommand)]
enum GamesCommand {
    List,
    /// Write a built-in game (or its polynomial) as a file.
    Export {
        #[arg(long)]
        game: String,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Check,
    Solver,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Accepts `path` or `path.json`.
fn resolve(path: &Path) -> Option<PathBuf> {
    if path.is_file() {
        return Some(path.to_path_buf());
    }
    let mut with_ext = path.as_os_str().to_owned();
    with_ext.push(".json");
    let with_ext = PathBuf::from(with_ext);
    with_ext.is_file().then_some(with_ext)
}

fn load_game(name: &str) -> Result<GameSpec, Failure> {
    if let Some(path) = resolve(Path::new(name)) {
        return Ok(load_spec(&path)?);
    }
    Ok(builtin(name)?)
}

fn target(name: &str) -> Result<GamePolynomial, Failure> {
    Ok(load_game(name)?.target()?)
}

fn read_cert(path: &Path) -> Result<nicesos::SosCertificate, Failure> {
    let p = resolve(path).ok_or_else(|| Failure::Input(format!("{}: no such file", path.display())))?;
    Ok(load_cert(&p)?)
}

fn print_json<S: Serialize>(value: &S) -> String {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    println!("{text}");
    text
}

#[derive(Serialize)]
struct RunReport {
    game: String,
    hierarchy: &'static str,
    level: usize,
    status: String,
    value: Option<f64>,
    win_probability: Option<f64>,
    primal_value: Option<f64>,
    dual_value: Option<f64>,
    gap: f64,
    primal_residual: f64,
    dual_residual: f64,
    iterations: usize,
    dropped_constraints: usize,
    block_dims: Vec<usize>,
    constraints: usize,
    wall_time_s: f64,
    certificate: Option<String>,
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let start = Instant::now();
    let spec = load_game(&args.game)?;
    let gp = spec.target::<f64>()?;
    let (p, hierarchy) = match args.hierarchy {
        HierarchyArg::Npa => (build_npa(&gp, args.level)?, "npa"),
        HierarchyArg::Onpa => (build_onesided(&gp, args.level)?, "onpa"),
    };
    let tol = args.tol.unwrap_or(DEFAULT_SOLVE_TOL);
    if !(tol > 0.0) {
        return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
    }
    let opts = SolverOptions {
        gap_tol: tol,
        feas_tol: tol,
        ..SolverOptions::default()
    };
    let sol = match solve(&p, &opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(Failure::Solver);
        }
    };
    let optimal = sol.status == SolveStatus::Optimal;
    let mut cert_path = None;
    if let (Some(path), true) = (&args.cert, optimal) {
        let cert = extract(&sol, &p, DEFAULT_CLAMP_TOL)?;
        save_cert(&cert, path)?;
        cert_path = Some(path.display().to_string());
    }
    let value = optimal.then_some(sol.dual_obj);
    let report = RunReport {
        game: spec.name().to_string(),
        hierarchy,
        level: args.level,
        status: sol.status.to_string(),
        value,
        win_probability: value.and_then(|v| gp.probability().map(|m| m.probability(v))),
        primal_value: optimal.then_some(sol.primal_obj),
        dual_value: value,
        gap: sol.gap,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        iterations: sol.iterations,
        dropped_constraints: sol.dropped.len(),
        block_dims: p.block_dims().to_vec(),
        constraints: p.constraints().len(),
        wall_time_s: start.elapsed().as_secs_f64(),
        certificate: cert_path,
    };
    let text = print_json(&report);
    if let Some(out) = &args.out {
        std::fs::write(out, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    }
    if optimal {
        Ok(())
    } else {
        eprintln!("solver stopped with status {}", sol.status);
        Err(Failure::Solver)
    }
}

#[derive(Serialize)]
struct Residual {
    word: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct VerifyOutput {
    ok: bool,
    bound: f64,
    max_residual: f64,
    tol: f64,
    terms: usize,
    largest_residuals: Vec<Residual>,
}

#[derive(Serialize)]
struct NiceOutput {
    is_nice: bool,
    terms: usize,
    offending_terms: Vec<(usize, Vec<usize>)>,
}

fn nice_output(cert: &nicesos::SosCertificate) -> NiceOutput {
    let rep = is_nice(cert);
    NiceOutput {
        is_nice: rep.is_nice,
        terms: cert.terms.len(),
        offending_terms: rep
            .offending_terms
            .into_iter()
            .map(|(i, qs)| (i, qs.into_iter().collect()))
            .collect(),
    }
}

fn cmd_cert(cmd: &CertCommand) -> Outcome {
    match cmd {
        CertCommand::Verify { cert, game, tol } => {
            let cert = read_cert(cert)?;
            let gp = target(game)?;
            let tol = tol.unwrap_or(DEFAULT_VERIFY_TOL);
            let rep = verify(&cert, &gp, tol)?;
            print_json(&VerifyOutput {
                ok: rep.ok,
                bound: cert.bound,
                max_residual: rep.max_residual,
                tol,
                terms: cert.terms.len(),
                largest_residuals: rep
                    .residuals
                    .iter()
                    .take(5)
                    .map(|(m, c)| Residual {
                        word: m.to_string(),
                        re: c.re,
                        im: c.im,
                    })
                    .collect(),
            });
            if rep.ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        CertCommand::Nicify { cert, game, out } => {
            let cert = read_cert(cert)?;
            let gp = target(game)?;
            let nice = match nicify_level1(&cert, &gp) {
                Ok(c) => c,
                Err(Error::VerificationFailed(r)) => {
                    eprintln!("error: input certificate does not verify (max residual {r:e})");
                    return Err(Failure::Check);
                }
                Err(e) => return Err(e.into()),
            };
            save_cert(&nice, out)?;
            let report = nice_output(&nice);
            let ok = report.is_nice;
            print_json(&report);
            if ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        CertCommand::CheckNice { cert } => {
            let report = nice_output(&read_cert(cert)?);
            let ok = report.is_nice;
            print_json(&report);
            if ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn cmd_games(cmd: &GamesCommand) -> Outcome {
    match cmd {
        GamesCommand::List => {
            for (name, about) in builtin_names() {
                println!("{name}\t{about}");
            }
            Ok(())
        }
        GamesCommand::Export { game, out } => {
            save_spec(&builtin(game)?, out)?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Cert(c) => cmd_cert(c),
        Command::Games(c) => cmd_games(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Solver) => ExitCode::from(2),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

