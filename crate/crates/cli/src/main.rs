//! `deltavc`: command-line frontend.
//!
//! Exit codes: 0 all checks passed, 1 a check failed (the report carries the
//! offending data), 2 usage or input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "deltavc", version, about = "VC-dimension bounds for symmetric-difference families over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// VC dimension of a family.
    Vcdim { file: PathBuf },
    /// The family F Δ F.
    Delta {
        file: PathBuf,
        /// Also write F Δ F in the family file format.
        #[arg(long)]
        write_family: Option<PathBuf>,
    },
    /// Deglex standard monomials of the vanishing ideal of V(F).
    Sm {
        file: PathBuf,
        /// Fail unless the result equals D_{k,n} for this k.
        #[arg(long = "expect-D", value_name = "K")]
        expect_d: Option<usize>,
    },
    /// Indicator polynomial, Gram matrix and rank certificate for a family.
    Certify {
        file: PathBuf,
        /// Write the rank certificate as JSON.
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Check a bound on a family file or exhaustively over a grid.
    Verify {
        /// sauer, dvir, kang, kleitman, main or conjecture.
        #[arg(long)]
        theorem: String,
        file: Option<PathBuf>,
        #[arg(long, requires_all = ["n", "k"], conflicts_with = "file")]
        exhaustive: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Local search for large uniform families with vc_dim(FΔF) <= d.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// RNG seed; generated and recorded in the report when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// greedy or anneal.
        #[arg(long, default_value = "greedy")]
        strategy: String,
        /// Write the best family found in the family file format.
        #[arg(long)]
        write_family: Option<PathBuf>,
    },
    /// Check the Croot–Lev–Pach lemma for a polynomial and a point set.
    ClpCheck {
        /// Point set, in the family file format.
        file: PathBuf,
        /// Polynomial in x1..xn, e.g. "x1*x2 + x3 + 1".
        #[arg(long)]
        poly: String,
        #[arg(long)]
        d: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli.command, &cli.output) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
