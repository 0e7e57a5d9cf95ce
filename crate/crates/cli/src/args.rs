use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "rainbow-ap",
    version,
    about = "Exact counts of colorings with no rainbow arithmetic progression",
    after_help = CSV_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

pub const CSV_HELP: &str = "\
CSV headers by subcommand:
  gamma          ground,k,gamma
  count/pattern  ground,r,k_or_pattern,method,count,elapsed_ms,nodes
  formula        r,k,s,count,count_by_exact
  ratio          n,r,k,g,ratio,ratio_value,lower,lower_value,target,error_term
  scan/sidon     subset,count,is_max,violation
  aw             ground,k,aw,witness,merge_check,nodes
  cyclic         n,r,k,g_interval,g_cyclic,cyclic_ratio,target
  template-stat  order,r,k,rk,bound,satisfies

Exit codes: 0 success, 1 usage or input error (including cache conflicts),
2 budget exhausted.";

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Bruteforce,
    Pruned,
    Symmetry,
    Ie,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Auto => "auto",
            MethodArg::Bruteforce => "bruteforce",
            MethodArg::Pruned => "pruned",
            MethodArg::Symmetry => "symmetry",
            MethodArg::Ie => "ie",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    #[value(name = "all_subsets", alias = "all-subsets")]
    AllSubsets,
    Deletions,
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Worker threads for counting (default: available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    /// Stop after this many search nodes (exit code 2).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_nodes: Option<u64>,
    /// Stop after this many seconds (exit code 2).
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Largest number of colorings the brute-force method will test.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub bruteforce_ceiling: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Append-only JSON-lines result cache.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Recompute cached counts and fail on disagreement.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Omit timing fields so identical runs print identical bytes.
    #[arg(long, global = true)]
    pub stable: bool,
}

/// Ground set: `[n]`, a subset of `[n]` via `--set`, or `Z_n` via `--cyclic`.
#[derive(Args, Debug, Clone)]
pub struct GroundArgs {
    #[arg(long)]
    pub n: Option<u32>,
    /// Subset literal "1,2,5" or "@FILE" with whitespace or comma separated elements.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long)]
    pub cyclic: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Deletions)]
    pub strategy: StrategyArg,
    /// Draws for the random strategy.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Keep probability per element for the random strategy.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of k-term progressions in the ground set.
    Gamma {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long)]
        k: usize,
    },
    /// Colorings with no rainbow k-term progression.
    Count {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// r-colorings of an s-set that use at most k-1 colors.
    Formula {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        s: u64,
    },
    /// g_{r,k}([n]) / (k-1)^n next to the few-colors lower bound.
    Ratio {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
    },
    /// Compare proper subsets of [n] against [n].
    Scan {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Anti-van der Waerden number with a witness coloring.
    Aw {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long)]
        k: usize,
    },
    /// Counts on [n] and on Z_n.
    Cyclic {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
    },
    /// Colorings with no rainbow solution of a linear pattern.
    Pattern {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long)]
        r: u32,
        /// Matrix file: "rows cols" then one row of integers per line.
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Sidon pattern [1,-1,1,-1] on [n] and scanned subsets.
    Sidon {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Rainbow sub-template count against the container bound.
    TemplateStat {
        /// Order of the template ([n]).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
        /// Template file, one "x: c1 c2 ..." line per element.
        #[arg(long, conflicts_with = "coloring")]
        template: Option<PathBuf>,
        /// Coloring literal "1:1,2:2,3:2" on [n].
        #[arg(long)]
        coloring: Option<String>,
    },
}
