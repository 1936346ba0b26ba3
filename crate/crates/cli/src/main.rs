//! `fracleib` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracleib::audit::DEFAULT_TOLERANCE;
use fracleib::Error;

use commands::{CliError, CmdResult};
use render::Format;

const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_TOLERANCE: u8 = 4;
const EXIT_IO: u8 = 1;

const HADAMARD_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "fracleib", version, about = "Fractional derivatives and the Leibniz rule")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; `convergence` defaults to csv, everything else to text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance; overrides FRACLEIB_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator to a function.
    Deriv {
        #[arg(long)]
        op: String,
        #[arg(long = "fn")]
        function: String,
        /// Comma-separated evaluation points.
        #[arg(long, conflicts_with = "grid")]
        points: Option<String>,
        /// `h,N`: evaluate at h, 2h, ..., N·h.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Pointwise Leibniz defect op(fg) − op(f)·g − f·op(g).
    Defect {
        #[arg(long)]
        op: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        points: Option<String>,
    },
    /// Truncated generalized Leibniz series for D^alpha(f·g).
    Series {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        alpha: f64,
        /// Truncation index; defaults to max(deg g, ceil(alpha) + 2), or 16.
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        points: Option<String>,
    },
    /// Classify an operator as first-order local or not Leibniz.
    Audit {
        #[arg(long)]
        op: String,
        /// `lo,hi`; default 0.2,5.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        points: Option<String>,
    },
    /// Hadamard decomposition of a function around x0.
    Hadamard {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        x0: f64,
        #[arg(long, default_value_t = 1)]
        order: u8,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        points: Option<String>,
    },
    /// Error of Grünwald–Letnikov against the exact derivative over a step ladder.
    Convergence {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        /// Comma-separated steps.
        #[arg(long, default_value = commands::DEFAULT_LADDER)]
        h: String,
    },
}

fn tolerance(flag: Option<f64>, default: f64) -> Result<f64, CliError> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("FRACLEIB_TOL") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("FRACLEIB_TOL: `{v}` is not a number")))?,
            Err(_) => return Ok(default),
        },
    };
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(CliError::Usage(format!("tolerance must be positive, got {tol}")))
    }
}

fn points_or_default(points: Option<String>) -> Result<Vec<f64>, CliError> {
    match points {
        Some(p) => commands::parse_list("points", &p),
        None => Ok(commands::default_eval_points()),
    }
}

fn run(command: Command, tol: Option<f64>) -> CmdResult {
    match command {
        Command::Deriv { op, function, points, grid } => {
            let points = match grid {
                Some(g) => commands::parse_grid(&g)?,
                None => points_or_default(points)?,
            };
            commands::deriv(&op, &function, &points)
        }
        Command::Defect { op, f, g, points } => commands::defect(&op, &f, &g, &points_or_default(points)?),
        Command::Series { f, g, alpha, k, points } => {
            commands::series(&f, &g, alpha, k, &points_or_default(points)?)
        }
        Command::Audit { op, domain, points } => {
            let domain = domain.as_deref().map(commands::parse_domain).transpose()?;
            let points = points.as_deref().map(|p| commands::parse_list("points", p)).transpose()?;
            commands::audit(&op, domain, points, tolerance(tol, DEFAULT_TOLERANCE)?)
        }
        Command::Hadamard { function, x0, order, domain, points } => {
            let domain = match domain {
                Some(d) => commands::parse_domain(&d)?,
                None => commands::hadamard_domain(x0)?,
            };
            let points = points.as_deref().map(|p| commands::parse_list("points", p)).transpose()?;
            commands::hadamard(&function, x0, order, domain, points, tolerance(tol, HADAMARD_TOLERANCE)?)
        }
        Command::Convergence { function, alpha, x, h } => {
            commands::convergence(&function, alpha, x, &commands::parse_list("h", &h)?)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Parse(_) => EXIT_PARSE,
        Error::Quadrature { .. } => EXIT_TOLERANCE,
        _ => EXIT_DOMAIN,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_format = match cli.command {
        Command::Convergence { .. } => Format::Csv,
        _ => Format::Text,
    };
    let format = cli.format.unwrap_or(default_format);
    let outcome = match run(cli.command, cli.tol) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_PARSE);
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let rendered = outcome.report.render(format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        }
        None => print!("{rendered}"),
    }
    match outcome.tolerance_failure {
        Some(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_TOLERANCE)
        }
        None => ExitCode::SUCCESS,
    }
}
