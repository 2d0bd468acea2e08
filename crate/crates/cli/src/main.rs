//! `qaep`: conditional entropies, verification suites, finite-n bounds and
//! smoothing from the command line.
//!
//! Exit codes: 0 success, 1 verification or numerical failure, 2 invalid
//! input, 3 I/O error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::{PossibleValue, PossibleValuesParser, TypedValueParser};
use clap::{Parser, Subcommand};
use qaep::verify::Suite;

#[derive(Parser, Debug)]
#[command(
    name = "qaep",
    version,
    about = "Conditional quantum entropies and finite-n equipartition bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropies of a state file: H, H_min, H_max (dual and direct), H_alpha, H_0, H_inf, eta.
    Entropy {
        /// JSON state file.
        state: PathBuf,
        /// Conditioning state file, or `marginal` for rho_B.
        #[arg(long, default_value = "marginal")]
        sigma: String,
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.5,2")]
        alpha: Vec<f64>,
        /// Number of leading subsystems forming A (overrides the file).
        #[arg(long)]
        split: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long, value_parser = suite_parser())]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// (dA,dB) pairs, e.g. `2x2,2x3` or `[(2,2),(3,2)]`.
        #[arg(long, default_value = "2x2,2x3,3x2")]
        dims: String,
        /// Violation slack; defaults to 1e-7 for equalities, 1e-5 for optimizer-backed suites.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Finite-n bound table as CSV (`n,epsilon,eta,h_vn,bound,gap,valid`).
    Aep {
        state: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Conditioning state file, or `marginal` for rho_B.
        #[arg(long, default_value = "marginal")]
        sigma: String,
        #[arg(long)]
        split: Option<usize>,
        /// CSV destination; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smooth a state into the epsilon ball; writes the state and `<out>.meta.json`.
    Smooth {
        state: PathBuf,
        /// Conditioning state file, or `marginal` for rho_B.
        #[arg(long, default_value = "marginal")]
        sigma: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        split: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn suite_parser() -> impl TypedValueParser<Value = Suite> {
    let values = Suite::ALL.map(|s| {
        PossibleValue::new(s.name())
            .help(s.description())
            .aliases(s.aliases().iter().copied())
    });
    PossibleValuesParser::new(values).map(|s| s.parse::<Suite>().expect("listed suite"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Entropy {
            state,
            sigma,
            alpha,
            split,
            json,
        } => commands::entropy(&state, &sigma, &alpha, split, json),
        Command::Verify {
            suite,
            trials,
            seed,
            dims,
            tol,
            out,
            json,
        } => commands::verify(suite, trials, seed, &dims, tol, out.as_deref(), json),
        Command::Aep {
            state,
            eps,
            n,
            sigma,
            split,
            out,
        } => commands::aep(&state, &eps, &n, &sigma, split, out.as_deref()),
        Command::Smooth {
            state,
            sigma,
            eps,
            split,
            out,
        } => commands::smooth(&state, &sigma, eps, split, &out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}
