//! `echelon`: validate, solve, simulate, perturb and assess scenario
//! documents, emit templates and run the paradox demonstrations.
//!
//! Exit codes: 0 success, 1 validation failure, 2 solver non-convergence
//! (the failing echelon is named when known), 3 internal error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Relative `--out` paths are resolved under this directory when it is set.
pub const OUTPUT_DIR_ENV: &str = "ECHELON_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "echelon", version, about = "Multi-echelon attacker/defender meta-game solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a scenario document.
    Validate { file: PathBuf },
    /// Find the warfare equilibrium of a scenario.
    Solve {
        file: PathBuf,
        /// Damping η in (0, 1]; defaults to the scenario's solver settings.
        #[arg(long)]
        eta: Option<f64>,
        /// Convergence tolerance ε.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Write the machine report here as well as printing the summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve, then sample operational trajectories from the equilibrium.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Trajectories per operation, seeded `seed, seed + 1, ...`.
        #[arg(long, default_value_t = 1)]
        trajectories: u64,
    },
    /// Solve, shock one site and re-converge.
    Perturb {
        file: PathBuf,
        /// Site path such as `policy.budget` or `tech.cost_scale`.
        #[arg(long)]
        site: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
    },
    /// Solve, then report stability, dominance and winning verdicts.
    Assess {
        file: PathBuf,
        /// Shock set from the scenario; `default` when present.
        #[arg(long)]
        shock_set: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a scenario skeleton for a conflict category.
    Template {
        /// asymmetric, symmetric or escalatory
        category: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact paradox reproductions.
    #[command(subcommand)]
    Paradox(Paradox),
}

#[derive(Subcommand)]
enum Paradox {
    /// Capital-dependent coin games.
    Parrondo {
        #[arg(long, default_value_t = 0.005)]
        epsilon: f64,
        /// Probability of playing A in the random mixture.
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Monte Carlo steps per game.
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Four-node network with a zero-latency shortcut.
    Braess {
        #[arg(long, default_value_t = 4000.0)]
        demand: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not failures
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate { file } => commands::validate(&file),
        Command::Solve { file, eta, tol, max_iter, out } => commands::solve(&file, eta, tol, max_iter, out.as_deref()),
        Command::Simulate { file, seed, trajectories } => commands::simulate(&file, seed, trajectories),
        Command::Perturb { file, site, delta } => commands::perturb(&file, &site, delta),
        Command::Assess { file, shock_set, out } => commands::assess(&file, shock_set.as_deref(), out.as_deref()),
        Command::Template { category, out } => commands::template(&category, out.as_deref()),
        Command::Paradox(Paradox::Parrondo { epsilon, gamma, steps, seed }) => {
            commands::parrondo(epsilon, gamma, steps, seed)
        }
        Command::Paradox(Paradox::Braess { demand }) => commands::braess(demand),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
