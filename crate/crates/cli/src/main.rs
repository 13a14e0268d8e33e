use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Decide causal precedence between discrete measures, extract causal
/// couplings and certificates, and compute Lorentz-Wasserstein distances.
#[derive(Parser, Debug)]
#[command(name = "causal", version, about)]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Pair {
    /// Instance document (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Label of the earlier measure.
    #[arg(long, default_value = "mu")]
    mu: String,
    /// Label of the later measure.
    #[arg(long, default_value = "nu")]
    nu: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide mu ⪯ nu. Exit 0 if it holds, 1 if not (certificate printed).
    Check(Pair),
    /// Print a causal coupling of mu and nu, or fail with exit 1.
    Coupling(Pair),
    /// Lorentz-Wasserstein distance LW_s(mu, nu).
    Distance {
        #[command(flatten)]
        pair: Pair,
        /// Exponent in (0, 1]; repeat for a sweep.
        #[arg(long = "s", default_value = "1")]
        s: Vec<f64>,
        /// Emit `s,lw` rows instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Produce the coupling or certificate and re-verify it, or verify a
    /// witness document given with --witness.
    Certify {
        #[command(flatten)]
        pair: Pair,
        /// Coupling (`{"entries": ...}`) or certificate (`{"K": ...}`) to check.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Cross-check every implemented formulation of mu ⪯ nu.
    Equiv {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Causal-ladder classification of the instance model.
    Ladder {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Write a demo instance.
    Demo {
        name: DemoName,
        /// Leaked mass for hegerfeldt.
        #[arg(long, default_value = "0.01")]
        leak: String,
        /// Number of terms for geometric.
        #[arg(long, default_value_t = 10)]
        n: u32,
        /// Exponent used to place the geometric atoms.
        #[arg(long = "s", default_value_t = 1.0)]
        s: f64,
        /// Number of points for diamond.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded random instance with measures mu ⪯ nu ⪯ rho.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Dag)]
        kind: Kind,
        #[arg(long, default_value_t = 10)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Order-property suite over measures of an instance.
    Props {
        #[arg(long)]
        instance: PathBuf,
        /// Measures to include (default: all).
        #[arg(long = "label")]
        labels: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DemoName {
    Hegerfeldt,
    Geometric,
    Diamond,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Dag,
    Minkowski,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(output) => match commands::emit(cli.out.as_deref(), &output.text) {
            Ok(()) => ExitCode::from(output.code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
