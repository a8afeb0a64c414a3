use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use incentive_policy::cli;
use incentive_policy::{Error, Format, OracleConfig, OracleMode};

#[derive(Parser)]
#[command(name = "incentive-policy", version, about = "Personalized incentive policies under a budget")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic population from a JSON config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Solve for one budget; writes result.json, allocation.csv, curve.csv.
    Solve {
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        budget: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Write the welfare curve breakpoints up to a maximum budget.
    Curve {
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        max_budget: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Compare the greedy solution with the exact optimum.
    Certify {
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        budget: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
        /// Use exhaustive enumeration instead of the DP.
        #[arg(long)]
        enumerate: bool,
        /// DP grid units per EUR.
        #[arg(long, default_value_t = 100)]
        weight_scale: u32,
    },
    /// Imperfect-information simulation against the perfect-information solve.
    Simulate {
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true)]
        budget: f64,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match args.command {
        Command::Generate { config, seed, out, format } => {
            cli::cmd_generate(&config, seed, &out, format)
        }
        Command::Solve { instance, budget, out, format } => {
            cli::cmd_solve(&instance, budget, &out, format)
        }
        Command::Curve { instance, max_budget, out, format } => {
            cli::cmd_curve(&instance, max_budget, &out, format)
        }
        Command::Certify { instance, budget, out, format, enumerate, weight_scale } => {
            let oracle = OracleConfig {
                weight_scale,
                mode: if enumerate { OracleMode::Enumerate } else { OracleMode::Dp },
                ..Default::default()
            };
            cli::cmd_certify(&instance, budget, out.as_deref(), format, &oracle)
        }
        Command::Simulate { instance, mu, seed, budget, reps, out, format } => {
            cli::cmd_simulate(&instance, mu, seed, budget, reps, &out, format)
        }
    };
    match outcome {
        Ok(o) => {
            print!("{}", o.stdout);
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::OracleCap(_) => ExitCode::from(4),
                _ => ExitCode::from(2),
            }
        }
    }
}
