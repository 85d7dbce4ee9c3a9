//! Command-line arguments and the resolved configuration echoed into every
//! report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffacute::search::{SearchMode, DEFAULT_NODE_BUDGET};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Greedy,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => SearchMode::Exact,
            Mode::Greedy => SearchMode::Greedy,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ffacute",
    version,
    about = "Acute-angle point sets over finite fields"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file. Relative paths resolve against $FFACUTE_OUT_DIR when set.
    /// Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output encoding. Tables default to csv, reports to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: log::LevelFilter,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Field characteristic.
    #[arg(long)]
    pub p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Monic modulus coefficients, constant term first (default: smallest
    /// irreducible).
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether a point-set file is acute.
    Verify {
        #[arg(long)]
        set: PathBuf,
    },
    /// Find a large acute set in F_q^n.
    Search {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Node budget of the exact search.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        nodes: u64,
        #[arg(long, default_value_t = 100)]
        restarts: u64,
        #[arg(long, required_if_eq("mode", "greedy"))]
        seed: Option<u64>,
        /// Search over all sets instead of sets through the origin.
        #[arg(long)]
        no_fix_origin: bool,
        /// Write the exact-search state here after the run.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue an exact search from a checkpoint file.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Character sums, counting quantities and their identity checks.
    Charsums {
        #[arg(long, conflicts_with_all = ["p", "random"])]
        set: Option<PathBuf>,
        #[arg(long, requires_all = ["n", "random", "seed"])]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_delimiter = ',')]
        modulus: Option<Vec<u64>>,
        #[arg(long)]
        n: Option<usize>,
        /// Size of a random set drawn with --seed.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Nonresidue code (default: smallest nonresidue).
        #[arg(long)]
        alpha: Option<u64>,
        /// Cap on q^n |Z|^4 for the quadratic-character bound.
        #[arg(long, default_value_t = ffacute::charsums::DEFAULT_QUAD_CAP as u64)]
        quad_cap: u64,
        /// Corrupt one identity value to exercise the checker.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Explicit constructions.
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
    /// Longest run 1..M of quadratic residues for each prime in a range.
    QrRun {
        #[arg(long)]
        p_min: u64,
        #[arg(long)]
        p_max: u64,
    },
    /// Bound table from exact searches or saved search reports.
    Table {
        #[arg(long, required_unless_present = "reports")]
        n: Option<usize>,
        /// Field orders to search exactly.
        #[arg(
            long,
            value_delimiter = ',',
            requires = "n",
            conflicts_with = "reports"
        )]
        fields: Option<Vec<u64>>,
        /// Search report files to merge.
        #[arg(long, num_args = 1..)]
        reports: Option<Vec<PathBuf>>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        nodes: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// The grid {1..m}^n in F_p^n.
    Grid {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
    },
}

/// Resolved run configuration. Search-related keys share their names with
/// the library's search config so search reports parse with either.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SearchMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix_origin: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inject_fault: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reports: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resume: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    pub threads: usize,
    pub log_level: String,
}
