use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Cohen-Ramanujan sums, Jordan totients, and numerical checks of the
/// Jordan-totient expansion and shifted convolution asymptotic.
///
/// Every run is deterministic: the same invocation (including --threads)
/// prints byte-identical output.
#[derive(Debug, Parser)]
#[command(name = "cohen", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Plain, global = true)]
    pub output: OutputFormat,

    /// Worker threads (>= 1). Defaults to the number of available CPUs.
    #[arg(long, env = "COHEN_THREADS", global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,

    /// Memory allowance for sieve tables, in bytes.
    #[arg(long, env = "COHEN_MEMORY_BUDGET", global = true, default_value_t = 1 << 30)]
    pub memory_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cohen-Ramanujan sum c_r^s(n), or Cohen's k-vector sum c^s(n, r).
    Sum(SumArgs),
    /// Jordan totient J_k(n) with the factorization, Möbius value and τ_s(n).
    Jordan(JordanArgs),
    /// Generalized gcd (m, n)_s: the largest s-th power dividing m and n.
    GcdS(GcdArgs),
    /// Truncated series Σ μ(q) c_q^s(n^s) / J_{s+k}(q) against ζ(s+k) J_k(n)/n^k.
    Expansion(ExpansionArgs),
    /// Exact rational check of the Euler factorization over a finite prime set.
    LocalCheck(LocalCheckArgs),
    /// The same series with Cohen's k-vector sums c^s(n, r) (brute force).
    Sivaramakrishnan(KvectorSeriesArgs),
    /// Σ_{n<=N} J_a(n)/n^a · J_b(n+h)/(n+h)^b against N times the Euler product.
    Asymptotic(AsymptoticArgs),
    /// Σ_{r<=R} f̂(r) ĝ(r) c_r^s(h) with Jordan coefficients, against the Euler product.
    MainTerm(MainTermArgs),
    /// Write or verify a binary sieve cache file.
    SieveCache(SieveCacheArgs),
    /// Run the exact local-factor grid and the default asymptotic check.
    ReproAll(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvaluatorChoice {
    /// Multiplicative prime-power rule.
    Fast,
    /// Literal exponential sum (r^s <= 10^7).
    Direct,
    /// Σ_{d|r, d^s|n} d^s μ(r/d).
    DivisorSum,
    /// Reduce n = m^s k first, then evaluate c_r^s(m^s).
    Shift,
    /// Cohen's k-vector sum with vector length s (r^s <= 10^7).
    Kvector,
    /// Direct, divisor-sum and fast; fails if they disagree.
    All,
}

#[derive(Debug, Args)]
pub struct SumArgs {
    /// Modulus index r >= 1.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub r: u64,
    /// Power parameter s >= 1 (vector length for --evaluator kvector).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub s: u32,
    /// Argument n >= 0 (>= 1 for --evaluator shift).
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = EvaluatorChoice::Fast)]
    pub evaluator: EvaluatorChoice,
}

#[derive(Debug, Args)]
pub struct JordanArgs {
    /// Order k >= 1.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// 1 <= n < 2^63.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Power parameter for τ_s(n).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub s: u32,
    /// Also report ζ(z) (z >= 2) to absolute error 1e-12.
    #[arg(long)]
    pub zeta: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GcdArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub s: u32,
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub s: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Series cutoff Q >= 1.
    #[arg(long = "Q", default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub q_max: u64,
}

#[derive(Debug, Args)]
pub struct LocalCheckArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub s: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Comma-separated primes; empty for the empty set.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11,13")]
    pub primes: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct KvectorSeriesArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub s: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Cutoff R with R^s <= 10^7.
    #[arg(long = "R", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub r_max: u64,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    /// s > 1.
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    /// a > 1 + s/2.
    #[arg(long, default_value_t = 3)]
    pub a: u32,
    /// b > 1 + s/2.
    #[arg(long, default_value_t = 3)]
    pub b: u32,
    /// Shift h >= 1.
    #[arg(long, default_value_t = 12)]
    pub h: u64,
    /// Summation limit N.
    #[arg(long = "N", default_value_t = 1_000_000)]
    pub n_max: u64,
    /// Euler product prime cutoff P.
    #[arg(long = "P", default_value_t = 100_000)]
    pub prime_cutoff: u64,
    /// Acceptance bound on |ratio - 1| at N.
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    /// Write "N ratio" rows to this file.
    #[arg(long)]
    pub emit_plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MainTermArgs {
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    #[arg(long, default_value_t = 3)]
    pub a: u32,
    #[arg(long, default_value_t = 3)]
    pub b: u32,
    #[arg(long, default_value_t = 12)]
    pub h: u64,
    /// Series cutoff R.
    #[arg(long = "R", default_value_t = 10_000)]
    pub r_max: u64,
    /// Euler product prime cutoff P.
    #[arg(long = "P", default_value_t = 10_000)]
    pub prime_cutoff: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SieveKindChoice {
    Mobius,
    Jordan,
    Spf,
}

#[derive(Debug, Args)]
pub struct SieveCacheArgs {
    #[arg(long, value_enum)]
    pub kind: SieveKindChoice,
    /// Jordan order (jordan kind only).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub limit: u64,
    /// Write the table here.
    #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
    pub out: Option<PathBuf>,
    /// Read this cache and compare it with a fresh table.
    #[arg(long)]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Summation limit for the asymptotic check.
    #[arg(long = "N", default_value_t = 1_000_000)]
    pub n_max: u64,
}
