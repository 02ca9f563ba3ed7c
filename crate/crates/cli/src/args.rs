use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ecag",
    version,
    about = "Minimum distance of elliptic-curve AG codes via subset-sum counting"
)]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, visible_alias = "output")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point counts and group structure.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Additive character sums.
    #[command(subcommand)]
    Chars(CharsCmd),
    /// Exact k-subset sum counts.
    #[command(subcommand)]
    Ssp(SspCmd),
    /// The character-sum bound on subset-sum counts.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Code construction and minimum distance.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Parameter scans over many curves.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Randomized checks of the distinct-tuple sieve.
    #[command(subcommand)]
    Sieve(SieveCmd),
}

#[derive(Debug, Args)]
pub struct CurveArg {
    /// Curve JSON file, `-` for stdin, or the JSON itself.
    #[arg(long)]
    pub curve: String,
}

/// The subset D of the point group. Points are `O` or `x,y` with packed
/// element indices, separated by `;`.
#[derive(Debug, Args)]
pub struct SubsetArgs {
    /// Explicit points of D.
    #[arg(long, conflicts_with = "exclude")]
    pub points: Option<String>,
    /// D is every point except these.
    #[arg(long)]
    pub exclude: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CurveCmd {
    /// N, (n1, n2), trace and structure case.
    Info(CurveArg),
}

#[derive(Debug, Subcommand)]
pub enum CharsCmd {
    /// Φ(D), the character attaining it, and |S| for the given k.
    Phi {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SspCmd {
    /// N(k, b, D) for the requested b, or for every b.
    Count {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long)]
        k: usize,
        /// Target sum; repeatable. Defaults to every point.
        #[arg(long = "b")]
        targets: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundCmd {
    /// Every term of the bound as exact rationals.
    Eval {
        #[command(flatten)]
        curve: CurveArg,
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[command(flatten)]
    pub curve: CurveArg,
    #[arg(long)]
    pub k: usize,
    /// Divisor point of (k-1)O + P.
    #[arg(long = "P", default_value = "O")]
    pub p: String,
    /// `auto` (every point except O and P) or extra points to leave out of D,
    /// separated by `;`.
    #[arg(long, default_value = "auto")]
    pub exclude: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Both paths when brute force is within its cap, else ssp.
    Auto,
    Ssp,
    Brute,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum CodeCmd {
    /// Build the code and print [n, k, d] with a JSON descriptor.
    Build(CodeArgs),
    /// Minimum distance and the path that produced it.
    Mindist {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum ScanCmd {
    /// Sampled (curve, D) scan; one row per (curve, D, k).
    Mds {
        /// Field orders, `A..B` inclusive or a single value.
        #[arg(long)]
        q_range: String,
        /// `q+2` or `ratio:R`.
        #[arg(long, default_value = "q+2")]
        n_policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        /// Curves per q, sampled by seed; all when omitted.
        #[arg(long)]
        curves_per_q: Option<usize>,
        #[arg(long, default_value_t = 1)]
        subsets_per_curve: usize,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long, env = "ECAG_JOBS")]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: ScanFormat,
    },
    /// Every evaluation set of size q+2 on every distinct group.
    Exhaustive {
        #[arg(long)]
        q_range: String,
        #[arg(long, default_value_t = 6)]
        k_min: usize,
        /// Defaults to q - 2.
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, env = "ECAG_JOBS")]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SieveCmd {
    /// Sieve against direct enumeration on random instances.
    Check {
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}
