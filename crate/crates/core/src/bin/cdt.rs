//! `cdt`: command-line front end.
//!
//! Exit codes: 0 success, 1 a self-test or reproduction failed, 2 bad input,
//! 3 no seed converged. Set `CDT_LOG=debug` for diagnostics on stderr.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use canonical_duality::commands::{
    analyze, dual_scan, seed_list, self_check, AnalyzeOptions, ScanSpec,
};
use canonical_duality::document::load_problem;
use canonical_duality::reproduce::reproduce;
use canonical_duality::Tolerances;

#[derive(Parser)]
#[command(
    name = "cdt",
    version,
    about = "Canonical duality analysis of f = q0 + V(q)"
)]
struct Cli {
    #[command(flatten)]
    tol: TolFlags,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TolFlags {
    /// Residual bound for a pair to count as critical
    #[arg(long, global = true, default_value_t = Tolerances::default().critical)]
    tol_critical: f64,
    /// Relative eigenvalue threshold for definiteness tests
    #[arg(long, global = true, default_value_t = Tolerances::default().psd)]
    tol_psd: f64,
    /// Undecided band around 1 for spectral verdicts
    #[arg(long, global = true, default_value_t = Tolerances::default().band)]
    band: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find dual critical points from seeds and classify them
    Analyze {
        file: PathBuf,
        /// Number of Newton seeds
        #[arg(long)]
        seeds: Option<usize>,
        /// Run the seeds on a thread pool
        #[arg(long)]
        parallel: bool,
    },
    /// Sample D over a 1-D or 2-D grid of sigma, as CSV
    DualScan {
        file: PathBuf,
        /// Coordinate(s) of sigma to sweep, 0-based: `i` or `i,j`
        #[arg(long)]
        axis: String,
        /// Sweep interval `a:b`
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Samples per axis, endpoints included
        #[arg(long)]
        steps: usize,
    },
    /// Compare derivatives and conjugates against brute-force oracles
    Check { file: PathBuf },
    /// Run a canned reproduction: example1, doublewell or trustregion
    Reproduce { name: String },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CDT_LOG")).init();
    let cli = Cli::parse();
    let tol = Tolerances {
        critical: cli.tol.tol_critical,
        psd: cli.tol.tol_psd,
        band: cli.tol.band,
        ..Tolerances::default()
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.cmd, tol, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("cdt: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd, tol: Tolerances, out: &mut impl Write) -> Result<u8, String> {
    let emit =
        |out: &mut dyn Write, json: String| writeln!(out, "{json}").map_err(|e| e.to_string());
    match cmd {
        Cmd::Analyze {
            file,
            seeds,
            parallel,
        } => {
            let (p, doc_seeds) = load_problem(&file).map_err(|e| e.to_string())?;
            let seeds = seed_list(p.m(), doc_seeds, seeds);
            let opts = AnalyzeOptions {
                parallel,
                tolerances: tol,
            };
            let report = analyze(&p, &seeds, &opts);
            emit(
                out,
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?,
            )?;
            if report.converged() {
                Ok(0)
            } else {
                eprintln!("cdt: no seed converged");
                Ok(3)
            }
        }
        Cmd::DualScan {
            file,
            axis,
            range,
            steps,
        } => {
            let (p, _) = load_problem(&file).map_err(|e| e.to_string())?;
            let spec = ScanSpec::parse(p.m(), &axis, &range, steps).map_err(|e| e.to_string())?;
            dual_scan(&p, &spec, &tol, out).map_err(|e| e.to_string())?;
            Ok(0)
        }
        Cmd::Check { file } => {
            let (p, doc_seeds) = load_problem(&file).map_err(|e| e.to_string())?;
            let report =
                self_check(&p, &doc_seeds.unwrap_or_default(), &tol).map_err(|e| e.to_string())?;
            emit(
                out,
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?,
            )?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Cmd::Reproduce { name } => {
            let ok = reproduce(&name, out).map_err(|e| e.to_string())?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}
