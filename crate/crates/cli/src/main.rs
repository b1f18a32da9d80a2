//! `denjoy` command-line front end.
//!
//! Every subcommand prints a JSON report on success (exit 0). Failures print a
//! JSON diagnostic on stderr only: exit 1 for usage errors, 2 when a hypothesis
//! or verification fails, 3 for numeric range or search-budget errors.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "denjoy", version, about = "Denjoy-Carleman class toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

/// Where a weight sequence comes from: a registered family or a spec document.
#[derive(Args, Debug, Clone, Default)]
pub struct SequenceArgs {
    /// Registered family name (gevrey, power-n, nlogn, geometric, doubly-exponential)
    #[arg(long, conflicts_with = "sequence")]
    pub family: Option<String>,
    /// Gevrey order
    #[arg(long)]
    pub s: Option<f64>,
    /// Base of the geometric family
    #[arg(long)]
    pub base: Option<f64>,
    /// Rate of the doubly-exponential family
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Prefix length
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Sequence-spec JSON document
    #[arg(long)]
    pub sequence: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check log-convexity, condition (A) and the analytic constant of a sequence
    Check {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Threshold above which condition (A) is checked
        #[arg(long, default_value_t = 1.0)]
        m0: f64,
        /// Add a vanishing-propagation plan on [a, b]
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
    },
    /// Certify class membership from sparse derivative bounds
    Certify {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Comma-separated gap orders d_0 < d_1 < ...
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        /// JSON array of [order, log_F] pairs
        #[arg(long)]
        bounds: Option<PathBuf>,
        /// Interval length b - a
        #[arg(long)]
        length: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        m0: f64,
        /// Re-verify a previously emitted certify report
        #[arg(long, conflicts_with_all = ["orders", "bounds", "length"])]
        verify: Option<PathBuf>,
    },
    /// Build a sequence matching M on sparse orders with huge excesses elsewhere
    Counterexample {
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long, default_value_t = 2)]
        i0: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Candidates examined per search
        #[arg(long, default_value_t = denjoy_core::counterexample::DEFAULT_INDEX_BUDGET)]
        budget: usize,
        /// Re-verify a previously emitted counterexample report
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Evaluate the extremal series and check its derivative bounds
    Extremal {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Use the N of a counterexample report
        #[arg(long, conflicts_with_all = ["family", "sequence"])]
        counterexample: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
        /// Retained terms (default n_max)
        #[arg(long)]
        k_trunc: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// Highest derivative order reported (capped at n_max)
        #[arg(long, default_value_t = 20)]
        max_order: usize,
    },
    /// Check the Cartan-Gorny bound on corpus functions
    Gorny {
        /// Corpus function; every function when omitted
        #[arg(long)]
        function: Option<String>,
        /// Interval; the standard set (0,1), (0,2pi), (-1,1) when omitted
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
        /// Single m; every 2 <= m <= max-m when omitted
        #[arg(long)]
        m: Option<usize>,
        /// Single k; every admissible k when omitted
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_m: usize,
        #[arg(long, default_value_t = denjoy_core::gorny::DEFAULT_GRID)]
        grid: usize,
    },
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let report = match cli.command {
        Command::Check { seq, m0, interval } => commands::check(&seq, m0, interval)?,
        Command::Certify {
            seq,
            orders,
            bounds,
            length,
            m0,
            verify,
        } => match verify {
            Some(path) => commands::certify_verify(&path)?,
            None => commands::certify(&seq, orders, bounds.as_deref(), length, m0)?,
        },
        Command::Counterexample {
            seq,
            i0,
            rounds,
            budget,
            verify,
        } => match verify {
            Some(path) => commands::counterexample_verify(&path, budget)?,
            None => commands::counterexample(&seq, i0, rounds, budget)?,
        },
        Command::Extremal {
            seq,
            counterexample,
            a,
            b,
            k_trunc,
            grid,
            max_order,
        } => commands::extremal(&seq, counterexample.as_deref(), (a, b), k_trunc, grid, max_order)?,
        Command::Gorny {
            function,
            interval,
            m,
            k,
            max_m,
            grid,
        } => commands::gorny(function.as_deref(), interval, m, k, max_m, grid)?,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let output = cli.output.clone();
    let result = dispatch(cli).and_then(|text| match &output {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_diagnostic());
            ExitCode::from(err.exit_code())
        }
    }
}
