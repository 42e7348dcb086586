//! Command-line grammar.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Jordan-Wigner toolbox for finitely many fermionic modes.
///
/// Mode sets are written `{1,3,4}`; partitions separate parts with `|`, e.g.
/// `{1,3}|{2}`. For ordered partitions the textual order is the tuple order.
/// Input files may be `-` for stdin.
#[derive(Debug, Parser)]
#[command(name = "fermikit", version)]
pub struct Cli {
    /// Absolute tolerance for numeric comparisons.
    #[arg(long, global = true, env = "FERMIKIT_TOL", default_value_t = fermikit_core::DEFAULT_TOL)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit an f, h, l or u sign table.
    Phase(PhaseArgs),
    /// Fermionic (⊗̃) or ordered (⊗̃′) product of operators on disjoint mode sets.
    Tensor(TensorArgs),
    /// Canonical fermionic embedding of an operator into a larger mode set.
    Embed(EmbedArgs),
    /// Fermionic partial trace of an operator or state.
    Reduce(ReduceArgs),
    /// State tools.
    #[command(subcommand)]
    State(StateCommand),
    /// Parity superselection tools.
    #[command(subcommand)]
    Parity(ParityCommand),
    /// Superoperator tools.
    #[command(subcommand)]
    Map(MapCommand),
    /// Run invariant suites and print a JSON report.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    F,
    H,
    L,
    U,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Glyphs,
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["modes", "partition", "ordered"])))]
pub struct PhaseArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Mode set, for f tables.
    #[arg(long)]
    pub modes: Option<String>,
    /// Unordered partition, for f and h tables.
    #[arg(long)]
    pub partition: Option<String>,
    /// Ordered partition, for any table.
    #[arg(long)]
    pub ordered: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Glyphs)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("product").required(true).args(["fermionic", "ordered"])))]
pub struct TensorArgs {
    /// Fermionic tensor product; operands are matched to parts by mode set.
    #[arg(long)]
    pub fermionic: bool,
    /// Ordered product, taken in argument order.
    #[arg(long)]
    pub ordered: bool,
    /// Operator JSON files, one per part.
    #[arg(required = true, num_args = 1..)]
    pub operands: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Operator JSON file.
    #[arg(long)]
    pub op: PathBuf,
    /// Target mode set.
    #[arg(long)]
    pub into: String,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Operator or state JSON file.
    #[arg(long)]
    pub state: PathBuf,
    /// Mode set to keep.
    #[arg(long)]
    pub keep: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BasisArg {
    Standard,
    Fermionic,
}

#[derive(Debug, Subcommand)]
pub enum StateCommand {
    /// Reduced state on a subset; the input is validated as a state.
    Reduce(ReduceArgs),
    /// Expansion coefficients in the standard or fermionic basis.
    Coeffs {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = BasisArg::Fermionic)]
        basis: BasisArg,
    },
    /// Correlation classification against a partition.
    Classify {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        partition: String,
        /// Impose parity superselection.
        #[arg(long)]
        ssr: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ParityCommand {
    /// Parity class of an operator, vector or superoperator.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Projection onto one local parity sector, e.g. `--sector "+-"`.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long)]
        sector: String,
    },
    /// Decomposition into the nonzero local parity sectors.
    Sectors {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        partition: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MapKind {
    /// Acts naturally on fermionic tensor products.
    F,
    /// Acts naturally on ordered products.
    Fp,
}

#[derive(Debug, Subcommand)]
pub enum MapCommand {
    /// Extend a map on X to a map on Y with the identity on the complement.
    Embed {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        into: String,
        #[arg(long, value_enum, default_value_t = MapKind::Fp)]
        kind: MapKind,
    },
    /// Product of maps on disjoint mode sets, ordered as given.
    Tensor {
        #[arg(long, value_enum, default_value_t = MapKind::Fp)]
        kind: MapKind,
        #[arg(required = true, num_args = 1..)]
        maps: Vec<PathBuf>,
    },
    /// Choi matrix and TPCP report.
    Choi {
        #[arg(long)]
        map: PathBuf,
    },
    /// Parity, physicality, TPCP and optional locality of a map.
    #[command(group(ArgGroup::new("locality").args(["local", "partition"])))]
    Classify {
        #[arg(long)]
        map: PathBuf,
        /// Test X-locality for this mode set.
        #[arg(long)]
        local: Option<String>,
        /// Test locality for this partition.
        #[arg(long)]
        partition: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 4)]
    pub max_modes: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random trials per invariant.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}
