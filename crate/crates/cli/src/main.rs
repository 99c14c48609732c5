//! `rtoda`: verification harness and Bethe ansatz solver for the
//! relativistic quantum Toda chain.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 configuration error,
//! 3 solver non-convergence.

mod config;
mod report;
mod solve;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use config::{
    load_file_config, parse_complex, parse_constraint, parse_int_list, parse_tol_overrides,
    OutputFormat, Suite, Tolerances,
};
use report::Report;
use suites::VerifyParams;

#[derive(Parser)]
#[command(
    name = "rtoda",
    version,
    about = "Verify the integrable structure of the relativistic quantum Toda chain and solve its Bethe ansatz equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite with seeded random sampling.
    Verify(VerifyArgs),
    /// Derive parameters from the eta constraint and solve the Bethe system.
    Solve(SolveArgs),
    /// Scan a (q, M, K, branch) grid and emit a CSV table of energies.
    Scan(ScanArgs),
    /// Re-read a JSON report, print its summary and re-emit it.
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonIo {
    /// JSON config file mirroring the flags; flags override the file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the machine-readable result here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// RNG seed; every run is reproducible from (config, seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override `family=value`, repeatable.
    #[arg(long = "tol")]
    tol: Vec<String>,
    /// Allow tolerance overrides looser than 1e-6.
    #[arg(long = "unsafe")]
    unsafe_tolerances: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: ybe, hamiltonian, commutation, vacuum, offshell or all.
    #[arg(long)]
    suite: Option<String>,
    /// Local dimension of the cyclic representation.
    #[arg(long = "L")]
    l: Option<usize>,
    /// Root index of the cyclic representation.
    #[arg(long)]
    r: Option<i64>,
    /// Chain length.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Coupling g, e.g. `0.6065` or `0.3+0.1i` (default: random per sample).
    #[arg(long)]
    g: Option<String>,
    /// Samples per check family.
    #[arg(long)]
    samples: Option<usize>,
    /// Derive eta from the discrete constraint, e.g. `N=2,M=1,q=1`.
    #[arg(long = "eta-from-constraint")]
    eta_from_constraint: Option<String>,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct SolveArgs {
    /// Chain length N.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Number of Bethe roots M.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Constraint integer q.
    #[arg(long)]
    q: Option<i64>,
    /// Coupling g (|g| != 1).
    #[arg(long)]
    g: Option<String>,
    /// Total momentum K (real).
    #[arg(long = "K")]
    k: Option<f64>,
    /// Branch integers, comma separated (default all zeros).
    #[arg(long)]
    branch: Option<String>,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct ScanArgs {
    /// Chain length N.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Coupling g (|g| != 1).
    #[arg(long)]
    g: Option<String>,
    /// Smallest q in the grid.
    #[arg(long, default_value_t = 1)]
    q_min: i64,
    /// Largest q in the grid.
    #[arg(long, default_value_t = 3)]
    q_max: i64,
    /// M values, comma separated.
    #[arg(long, default_value = "1,2")]
    m_list: String,
    /// K values, comma separated.
    #[arg(long, default_value = "0")]
    k_list: String,
    /// Smallest branch integer.
    #[arg(long, default_value_t = 0)]
    branch_min: i64,
    /// Largest branch integer.
    #[arg(long, default_value_t = 0)]
    branch_max: i64,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON to read.
    #[arg(long)]
    input: PathBuf,
    /// Re-emit the report here (byte-identical round trip).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("RTODA_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("config error: RTODA_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(code) => code,
        Err(CmdError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::NonConvergence(msg)) => {
            eprintln!("solver did not converge: {msg}");
            ExitCode::from(3)
        }
        Err(CmdError::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CmdError {
    Config(String),
    NonConvergence(String),
    Io(String),
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}

fn resolve_io(
    io: &CommonIo,
) -> Result<(config::FileConfig, u64, Option<PathBuf>, OutputFormat, Tolerances), CmdError> {
    let file = match &io.config {
        Some(path) => load_file_config(path).map_err(CmdError::Config)?,
        None => config::FileConfig::default(),
    };
    let seed = io.seed.or(file.seed).unwrap_or(0);
    let output = io
        .output
        .clone()
        .or_else(|| file.output.as_ref().map(PathBuf::from));
    let format = match io.format.as_deref().or(file.format.as_deref()) {
        Some(f) => OutputFormat::parse(f).map_err(CmdError::Config)?,
        None => OutputFormat::Json,
    };
    let mut overrides = parse_tol_overrides(&io.tol).map_err(CmdError::Config)?;
    if let Some(table) = &file.tol {
        // File-level overrides apply first; flags win on conflict.
        let mut merged: Vec<(String, f64)> =
            table.iter().map(|(k, v)| (k.clone(), *v)).collect();
        merged.extend(overrides);
        overrides = merged;
    }
    let allow_unsafe = io.unsafe_tolerances || file.unsafe_tolerances.unwrap_or(false);
    let tols = Tolerances::resolve(overrides.into_iter(), allow_unsafe).map_err(CmdError::Config)?;
    Ok((file, seed, output, format, tols))
}

fn write_or_ignore(path: &Option<PathBuf>, content: &str) -> Result<(), CmdError> {
    if let Some(path) = path {
        std::fs::write(path, content)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CmdError> {
    let start = Instant::now();
    let (file, seed, output, format, tols) = resolve_io(&args.io)?;
    let suite = Suite::parse(
        args.suite
            .as_deref()
            .or(file.suite.as_deref())
            .unwrap_or("all"),
    )
    .map_err(CmdError::Config)?;
    let g = match args.g.as_deref().or(file.g.as_deref()) {
        Some(text) => Some(parse_complex(text).map_err(CmdError::Config)?),
        None => None,
    };
    let constraint = match args
        .eta_from_constraint
        .as_deref()
        .or(file.eta_from_constraint.as_deref())
    {
        Some(text) => Some(parse_constraint(text).map_err(CmdError::Config)?),
        None => None,
    };
    let l = args.l.or(file.l).unwrap_or(4);
    let r = args.r.or(file.r).unwrap_or(1);
    let n = args.n.or(file.n).unwrap_or(2);
    if l < 2 || n < 1 {
        return Err(CmdError::Config(format!("invalid rep inputs L={l}, N={n}")));
    }
    if r.rem_euclid(l as i64) == 0 {
        return Err(CmdError::Config(format!(
            "root index r={r} degenerates for L={l}"
        )));
    }
    let params = VerifyParams {
        l,
        r,
        n,
        samples: args.samples.or(file.samples).unwrap_or(20),
        seed,
        g,
        constraint,
    };
    let checks = suites::run_suite(suite, &params, &tols).map_err(CmdError::Config)?;
    let report = Report::new("verify", seed, checks);
    report.print_table(start.elapsed().as_secs_f64());
    match format {
        OutputFormat::Json => write_or_ignore(&output, &report.to_json())?,
        OutputFormat::Csv => write_or_ignore(&output, &report.to_csv())?,
    }
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn solve_error(e: rtoda_core::Error) -> CmdError {
    match e {
        rtoda_core::Error::NonConvergence(msg) => CmdError::NonConvergence(msg),
        rtoda_core::Error::RootCollision(msg) => CmdError::NonConvergence(msg),
        other => CmdError::Config(other.to_string()),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, CmdError> {
    let start = Instant::now();
    let (file, seed, output, format, tols) = resolve_io(&args.io)?;
    let n = args.n.or(file.n).unwrap_or(2);
    let m = args.m.or(file.m).unwrap_or(1);
    let q = args.q.or(file.q).unwrap_or(1);
    let g = match args.g.as_deref().or(file.g.as_deref()) {
        Some(text) => parse_complex(text).map_err(CmdError::Config)?,
        None => C64::new((-0.5f64).exp(), 0.0),
    };
    let k = args.k.or(file.k).unwrap_or(0.0);
    let branch: Option<Vec<i64>> = match args.branch.as_deref() {
        Some(text) => Some(parse_int_list(text).map_err(CmdError::Config)?),
        None => file.branch.clone(),
    };
    let out = solve::run_solve(n, m, q, g, k, branch.as_deref(), seed, &tols)
        .map_err(solve_error)?;
    let report = Report::new("solve", seed, out.checks.clone());
    report.print_table(start.elapsed().as_secs_f64());
    println!(
        "roots: {}",
        out.roots
            .iter()
            .map(|r| format!("{:+.6}{:+.6}i", r.re, r.im))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("energy: {:+.12}{:+.12}i", out.energy.re, out.energy.im);
    match format {
        OutputFormat::Json => write_or_ignore(&output, &out.to_json())?,
        OutputFormat::Csv => write_or_ignore(&output, &out.to_csv())?,
    }
    Ok(if out.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_scan(args: ScanArgs) -> Result<ExitCode, CmdError> {
    let (file, _seed, output, _format, tols) = resolve_io(&args.io)?;
    let n = args.n.or(file.n).unwrap_or(2);
    let g = match args.g.as_deref().or(file.g.as_deref()) {
        Some(text) => parse_complex(text).map_err(CmdError::Config)?,
        None => C64::new((-0.5f64).exp(), 0.0),
    };
    if args.q_min > args.q_max || args.branch_min > args.branch_max {
        return Err(CmdError::Config("empty scan range".into()));
    }
    let m_list: Vec<usize> = args
        .m_list
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map_err(CmdError::Config)?;
    let k_list: Vec<f64> = args
        .k_list
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map_err(CmdError::Config)?;
    let grid = solve::scan_grid(
        (args.q_min, args.q_max),
        &m_list,
        &k_list,
        (args.branch_min, args.branch_max),
    );
    let csv = solve::run_scan(n, g, &grid, &tols);
    match &output {
        Some(_) => write_or_ignore(&output, &csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: ReportArgs) -> Result<ExitCode, CmdError> {
    let text = std::fs::read_to_string(&args.input)?;
    let report = Report::from_json(&text)
        .map_err(|e| CmdError::Config(format!("bad report {}: {e}", args.input.display())))?;
    report.print_table(0.0);
    if let Some(path) = &args.output {
        std::fs::write(path, report.to_json())?;
    }
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
