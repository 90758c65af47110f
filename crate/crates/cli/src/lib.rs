//! Command-line front end for `sdpi-core`: divergence tables, joint-range
//! curves, channel reports and privacy amplification sweeps.
//!
//! Exit codes: 0 on success, 2 for rejected input, 3 when a numeric routine
//! (envelope solver, quadrature, contraction search) fails.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use sdpi_core::inequalities::DEFAULT_SOLVER_TOL;
use sdpi_core::privacy::{default_alpha_grid, EtaTvMode};
use sdpi_core::Alpha;

pub mod commands;
pub mod input;
pub mod output;

use output::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] sdpi_core::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric_failure() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sdpi", version, about = "Rényi contraction, Pinsker-type bounds and privacy amplification")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv for tables and json for `analyze` when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Solver tolerance (joint-range bracket width in p).
    #[arg(long, global = true, default_value_t = DEFAULT_SOLVER_TOL)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergences between two distributions, one row per order.
    Div {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        /// Comma-separated, ascending.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_alpha)]
        alpha: Vec<Alpha>,
    },
    /// Lower envelope of the joint range of (TV, f_alpha divergence).
    JointRange {
        #[arg(long, value_parser = parse_alpha)]
        alpha: Alpha,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 0.995)]
        t_max: f64,
        /// Explicit TV grid (comma-separated); overrides --points/--t-max.
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Structural and contraction report for a channel (JSON by default).
    Analyze {
        #[arg(long)]
        channel: PathBuf,
        /// Also search for the Rényi contraction coefficient at this order.
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<Alpha>,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Randomized response followed by uniform blocks of size k.
    Amplify {
        #[arg(long)]
        n: usize,
        /// Plain number or a natural log such as log(2).
        #[arg(long, value_parser = input::parse_epsilon, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long)]
        k: usize,
        /// Comma-separated, ascending; 50 log-spaced orders in [1.1, 100] by default.
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha)]
        alpha: Option<Vec<Alpha>>,
        #[arg(long, value_enum, default_value_t = EtaMode::AssumeOne)]
        eta_mode: EtaMode,
    },
    /// Amplification at a fixed order as the alphabet grows.
    SweepN {
        #[arg(long, value_parser = input::parse_epsilon, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_parser = parse_alpha)]
        alpha: Alpha,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EtaMode {
    AssumeOne,
    Dobrushin,
    FiniteExact,
}

impl From<EtaMode> for EtaTvMode {
    fn from(m: EtaMode) -> Self {
        match m {
            EtaMode::AssumeOne => EtaTvMode::AssumeOne,
            EtaMode::Dobrushin => EtaTvMode::Dobrushin,
            EtaMode::FiniteExact => EtaTvMode::FiniteExact,
        }
    }
}

fn parse_alpha(s: &str) -> Result<Alpha, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("cannot parse {s:?} as a number"))?;
    Alpha::new(v).map_err(|e| e.to_string())
}

/// Runs one invocation and returns the text that was (or would be) written.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let format = cli.common.format.unwrap_or(match cli.command {
        Command::Analyze { .. } => Format::Json,
        _ => Format::Csv,
    });
    let text = match &cli.command {
        Command::Div { p, q, alpha } => {
            let p = input::read_distribution(p, "p")?;
            let q = input::read_distribution(q, "q")?;
            commands::cmd_div(&p, &q, alpha)?.render(format)
        }
        Command::JointRange { alpha, points, t_max, t } => {
            let grid = match t {
                Some(t) => t.clone(),
                None => commands::t_grid(*points, *t_max)?,
            };
            commands::cmd_joint_range(*alpha, &grid, cli.common.tol)?.render(format)
        }
        Command::Analyze { channel, alpha, budget } => {
            let c = input::read_channel(channel, "channel")?;
            let report = commands::cmd_analyze(&c, *alpha, *budget, cli.common.seed)?;
            render_report(&report, format)
        }
        Command::Amplify { n, epsilon, k, alpha, eta_mode } => {
            let alphas = alpha.clone().unwrap_or_else(default_alpha_grid);
            commands::cmd_amplify(*n, *epsilon, *k, &alphas, (*eta_mode).into())?.render(format)
        }
        Command::SweepN { epsilon, m, n, alpha } => commands::cmd_sweep_n(*epsilon, *m, n, *alpha)?.render(format),
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(text)
}

// flat object as JSON, or a header line and a value line as CSV
fn render_report(report: &commands::AnalyzeReport, format: Format) -> String {
    let value = serde_json::to_value(report).expect("plain report");
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("plain report");
            s.push('\n');
            s
        }
        Format::Csv => {
            let obj = value.as_object().expect("flat object");
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            let cells: Vec<String> = obj
                .values()
                .map(|v| match v {
                    serde_json::Value::Number(n) => output::fmt_g12(n.as_f64().unwrap_or(f64::NAN)),
                    serde_json::Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            format!("{}\n{}\n", keys.join(","), cells.join(","))
        }
    }
}
