//! `qhedge`: quantile hedging tables for two-asset claims.

// Negated comparisons reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quantile_hedge::PayoffKind;

use crate::config::{FileConfig, Overrides, RunConfig};
use crate::error::CliResult;

const CONFIG_HELP: &str = "\
CONFIG FILE (TOML, every section and key optional):
  [market]     s0_1 s0_2 alpha_1 alpha_2 sigma_1 sigma_2 rho r maturity
  [payoff]     kind = \"digital\" | \"quanto-dom\" | \"quanto-for\" | \"outperf\" | \"spread\", strike
  [quadrature] abs_tol trunc_sigmas max_subdivisions
  [solver]     budget_rel_tol risk_abs_tol max_iterations
  [mc]         n seed
  [verify]     sigmas duality_tol

The default strike is S¹₀ (S¹₀·S²₀ for quanto-for). A spread needs one explicitly.
Floats are written with 17 significant digits. Every row carries a method tag
and an error estimate; mc_* columns hold the Monte Carlo cross-check.

EXIT CODES: 0 success, 1 bad input, 2 numerical failure, 3 verification failure.";

#[derive(Debug, Parser)]
#[command(name = "qhedge", version, about = "Quantile hedging of two-asset claims", after_help = CONFIG_HELP)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Claim to hedge.
    #[arg(long, global = true, value_parser = parse_payoff, value_name = "KIND")]
    payoff: Option<PayoffKind>,

    /// Strike of the claim.
    #[arg(long, global = true, value_name = "K")]
    strike: Option<f64>,

    /// Output CSV path (default: standard output).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Monte Carlo seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Monte Carlo sample size.
    #[arg(long = "mc-n", global = true, value_name = "N")]
    mc_n: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price p(H) with a Monte Carlo cross-check.
    #[command(after_help = "COLUMNS: payoff,strike,method,price,est_error,mc_price,mc_std_error,mc_n,mc_seed")]
    Price,

    /// Success probability Ψ₁(c) and knocked-out price Ψ₂(c) on a level grid.
    #[command(after_help = "COLUMNS: c,method,psi1,psi1_error,psi2,psi2_error,\
mc_psi1,mc_psi1_std_error,mc_psi2,mc_psi2_std_error")]
    Psi {
        /// Strictly increasing levels c ≥ 0.
        #[arg(long = "c-grid", value_delimiter = ',', required = true, num_args = 1.., allow_negative_numbers = true)]
        c_grid: Vec<f64>,
    },

    /// Largest success probability Φ₁(x) for each budget x.
    #[command(after_help = "COLUMNS: x,branch,method,c_star,phi1,est_error,\
mc_phi1,mc_phi1_std_error,mc_cost,mc_cost_std_error\n\
branch is interior, full-hedge or zero-budget; the mc_* columns simulate the success set at c_star.")]
    Phi1 {
        /// Strictly increasing budgets x ≥ 0.
        #[arg(long = "x-grid", value_delimiter = ',', required = true, num_args = 1.., allow_negative_numbers = true)]
        x_grid: Vec<f64>,
    },

    /// Smallest cost Φ₂(α) for each shortfall probability α.
    #[command(after_help = "COLUMNS: alpha,branch,method,c_star,phi2,est_error,\
mc_success,mc_success_std_error,mc_phi2,mc_phi2_std_error\n\
branch is interior, full-hedge or zero-cost; the mc_* columns simulate the success set at c_star.")]
    Phi2 {
        /// Strictly increasing risk levels in [0, 1].
        #[arg(long = "alpha-grid", value_delimiter = ',', required = true, num_args = 1.., allow_negative_numbers = true)]
        alpha_grid: Vec<f64>,
    },

    /// Monte Carlo versus quadrature and invariant checks; exit 3 on any failure.
    #[command(after_help = "COLUMNS: check,level,status,method,value,est_error,reference,reference_error,detail\n\
status is pass, fail or skipped. Checks the solvers refuse (DegenerateMeasure) and\n\
Monte Carlo samples without variation are reported as skipped.")]
    Verify {
        /// Levels for the Ψ comparison (default: 0.1, 0.2, 0.5, 1 over p(H)).
        #[arg(long = "c-grid", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        c_grid: Option<Vec<f64>>,

        /// Risk levels for the Φ₁(Φ₂(α)) round trip (default: 25 levels in [0.01, 0.5] below P(H ≠ 0)).
        #[arg(long = "alpha-grid", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        alpha_grid: Option<Vec<f64>>,
    },
}

fn parse_payoff(s: &str) -> Result<PayoffKind, String> {
    s.parse().map_err(|e: quantile_hedge::Error| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        payoff: cli.payoff,
        strike: cli.strike,
        seed: cli.seed,
        mc_n: cli.mc_n,
    };
    let cfg = RunConfig::resolve(file, &overrides)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Price => commands::price_table(&cfg)?.write(out),
        Command::Psi { c_grid } => commands::psi_table(&cfg, c_grid)?.write(out),
        Command::Phi1 { x_grid } => commands::phi1_table(&cfg, x_grid)?.write(out),
        Command::Phi2 { alpha_grid } => commands::phi2_table(&cfg, alpha_grid)?.write(out),
        Command::Verify { c_grid, alpha_grid } => {
            let (table, failed) = verify::verify_table(&cfg, c_grid.as_deref(), alpha_grid.as_deref())?;
            table.write(out)?;
            verify::finish(failed, table.rows().len())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qhedge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
