use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "klsum", version, about = "Twisted Kloosterman-type sums: evaluation, decomposition and bound sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate one twisted sum
    Sum,
    /// Show the band parameters for N
    Bands,
    /// Rough counts for the default window
    Lemma1,
    /// Incomplete inverse-sum sweep
    Lemma2,
    /// gcd pair sums over band primes
    GcdPairs,
    /// Cauchy step per band
    Cauchy,
    /// Main-bound scan over (f, N, q)
    Scan,
    /// Exact identity suite
    Identity,
    /// Throughput of the twisted sum
    Bench,
}

/// Every value is kept as text so flags and config entries share one parser.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML file with defaults for any of the options below
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Coefficient function(s): one, mobius, liouville, nit:<alpha>, rand:<seed>, randpp:<seed>
    #[arg(long = "f", global = true)]
    pub f: Option<String>,
    /// Length N, or a comma-separated grid
    #[arg(long = "n", global = true)]
    pub n: Option<String>,
    /// Modulus q, or a comma-separated grid
    #[arg(long = "q", global = true)]
    pub q: Option<String>,
    /// Twist a (an integer, or rand:<seed>)
    #[arg(long = "a", global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Comma-separated b values
    #[arg(long = "b", global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// `default` (the exponential bands for N) or comma-separated boundaries
    #[arg(long, global = true)]
    pub bands: Option<String>,
    /// Band index
    #[arg(long = "r", global = true)]
    pub r: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// Constant on the right side
    #[arg(long = "c", global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Number of randomized identity configurations
    #[arg(long, global = true)]
    pub configs: Option<String>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<String>,
    /// Output path (default stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,
}
