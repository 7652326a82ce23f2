use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ohmnet_core::eval::{ClassifierConfig, Weighting};
use ohmnet_core::ExecMode;

#[derive(Debug, Parser)]
#[command(
    name = "ohmnet",
    version,
    about = "Hierarchy-regularized embeddings for multi-layer networks",
    long_about = "Hierarchy-regularized embeddings for multi-layer networks.\n\n\
        Every option can also be set through an OHMNET_<OPTION> environment variable \
        (e.g. OHMNET_DIM=64) or a TOML file passed with --config. Precedence: command-line \
        flag, then config file, then environment, then the built-in default."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted-partition benchmark with a known hierarchy.
    Synth(SynthArgs),
    /// Sample biased random walks on every layer.
    Walk(WalkArgs),
    /// Learn embeddings for every hierarchy element.
    Train(TrainArgs),
    /// Cross-validated function prediction from embeddings.
    Eval(EvalArgs),
    /// Predict functions in one layer from classifiers trained on the others.
    Transfer(TransferArgs),
    /// Project one embedding table to 2-D.
    Project(ProjectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One worker, bit-reproducible.
    Sequential,
    /// Lock-free updates across threads; not reproducible.
    Parallel,
}

impl From<Mode> for ExecMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Sequential => ExecMode::Sequential,
            Mode::Parallel => ExecMode::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingArg {
    /// exp(-distance), a heuristic
    Exponential,
    /// 1 / (1 + distance), a heuristic
    Inverse,
    /// Equal weights
    Uniform,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Exponential => Weighting::Exponential,
            WeightingArg::Inverse => Weighting::Inverse,
            WeightingArg::Uniform => Weighting::Uniform,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// TOML file with option values, either top-level or under a
    /// [<subcommand>] table
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Master seed; every random stream is derived from it
    #[arg(long, env = "OHMNET_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Execution mode
    #[arg(long, env = "OHMNET_MODE", value_enum, default_value_t = Mode::Sequential)]
    pub mode: Mode,
    /// Worker threads in parallel mode (default: all cores)
    #[arg(long, env = "OHMNET_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WalkOptions {
    /// Walks started at every node
    #[arg(long = "walks", env = "OHMNET_WALKS", default_value_t = 10)]
    pub walks_per_node: usize,
    /// Steps per walk
    #[arg(long, env = "OHMNET_LENGTH", default_value_t = 80)]
    pub length: usize,
    /// Return parameter: weight 1/p for stepping back
    #[arg(long, env = "OHMNET_P", default_value_t = 1.0)]
    pub p: f64,
    /// In-out parameter: weight 1/q for moving away from the previous node
    #[arg(long, env = "OHMNET_Q", default_value_t = 1.0)]
    pub q: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifierOptions {
    /// Elastic-net penalty strength
    #[arg(long, env = "OHMNET_STRENGTH", default_value_t = 1e-4)]
    pub strength: f64,
    /// Share of the penalty that is L1
    #[arg(long, env = "OHMNET_L1_RATIO", default_value_t = 0.15)]
    pub l1_ratio: f64,
    /// SGD passes over the training proteins
    #[arg(long, env = "OHMNET_CLF_EPOCHS", default_value_t = 30)]
    pub clf_epochs: usize,
    /// Initial classifier learning rate
    #[arg(long, env = "OHMNET_CLF_RATE", default_value_t = 0.01)]
    pub clf_rate: f64,
}

impl ClassifierOptions {
    pub fn config(&self) -> ClassifierConfig {
        ClassifierConfig {
            strength: self.strength,
            l1_ratio: self.l1_ratio,
            epochs: self.clf_epochs,
            learning_rate: self.clf_rate,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    /// Output directory
    #[arg(long, env = "OHMNET_OUT")]
    pub out: PathBuf,
    /// Nodes generated per layer
    #[arg(long, env = "OHMNET_NODES", default_value_t = 200)]
    pub nodes: usize,
    /// Number of layers (hierarchy leaves)
    #[arg(long = "num-layers", env = "OHMNET_NUM_LAYERS", default_value_t = 4)]
    pub num_layers: usize,
    /// Depth of the balanced hierarchy
    #[arg(long, env = "OHMNET_DEPTH", default_value_t = 2)]
    pub depth: usize,
    /// Planted communities
    #[arg(long, env = "OHMNET_COMMUNITIES", default_value_t = 4)]
    pub communities: usize,
    /// Edge probability within a community
    #[arg(long, env = "OHMNET_P_IN", default_value_t = 0.1)]
    pub p_in: f64,
    /// Edge probability across communities
    #[arg(long, env = "OHMNET_P_OUT", default_value_t = 0.01)]
    pub p_out: f64,
    /// Fraction of nodes re-randomized between sibling layers
    #[arg(long, env = "OHMNET_DIVERGENCE", default_value_t = 0.2)]
    pub divergence: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct WalkArgs {
    /// Layer manifest (`name<TAB>edgelist` lines)
    #[arg(long, env = "OHMNET_LAYERS")]
    pub layers: PathBuf,
    /// Output directory for `<layer>.walks` files
    #[arg(long, env = "OHMNET_OUT")]
    pub out: PathBuf,
    #[command(flatten)]
    pub walk: WalkOptions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    /// Layer manifest (`name<TAB>edgelist` lines)
    #[arg(long, env = "OHMNET_LAYERS")]
    pub layers: PathBuf,
    /// Hierarchy file (`child parent` lines); not needed with
    /// --independent or --collapsed
    #[arg(long, env = "OHMNET_HIERARCHY")]
    pub hierarchy: Option<PathBuf>,
    /// Precomputed walks from `ohmnet walk`; sampled afresh when absent
    #[arg(long, env = "OHMNET_WALKS_DIR", conflicts_with = "collapsed")]
    pub walks_dir: Option<PathBuf>,
    /// Output directory for `<element>.emb` files
    #[arg(long, env = "OHMNET_OUT")]
    pub out: PathBuf,
    /// Embedding dimension
    #[arg(long, env = "OHMNET_DIM", default_value_t = 128)]
    pub dim: usize,
    /// Hierarchy coupling strength
    #[arg(long, env = "OHMNET_LAMBDA", default_value_t = 0.1)]
    pub lambda: f64,
    /// Context window on each side of a walk position
    #[arg(long, env = "OHMNET_WINDOW", default_value_t = 10)]
    pub window: usize,
    /// Negative samples per pair
    #[arg(long, env = "OHMNET_NEGATIVES", default_value_t = 5)]
    pub negatives: usize,
    /// Initial SGD step size
    #[arg(long, env = "OHMNET_ALPHA", default_value_t = 0.025)]
    pub alpha: f64,
    /// Maximum outer iterations
    #[arg(long, env = "OHMNET_OUTER_ITERS", default_value_t = 10)]
    pub outer_iters: usize,
    /// Stop once internal tables change by less than this
    #[arg(long, env = "OHMNET_TOL", default_value_t = 1e-3)]
    pub tol: f64,
    /// Train every layer on its own, without coupling
    #[arg(long, conflicts_with = "collapsed")]
    pub independent: bool,
    /// Train one model on the union of all layers
    #[arg(long)]
    pub collapsed: bool,
    /// Also write context vectors (`<element>.ctx`)
    #[arg(long)]
    pub checkpoint: bool,
    #[command(flatten)]
    pub walk: WalkOptions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    /// Layer manifest (`name<TAB>edgelist` lines)
    #[arg(long, env = "OHMNET_LAYERS")]
    pub layers: PathBuf,
    /// Directory written by `ohmnet train`
    #[arg(long, env = "OHMNET_EMBEDDINGS")]
    pub embeddings: PathBuf,
    /// Label file (`node layer function` lines)
    #[arg(long, env = "OHMNET_LABELS")]
    pub labels: PathBuf,
    /// Output directory for report.tsv
    #[arg(long, env = "OHMNET_OUT")]
    pub out: PathBuf,
    /// Cross-validation folds over proteins
    #[arg(long, env = "OHMNET_FOLDS", default_value_t = 10)]
    pub folds: usize,
    /// Skip (layer, function) pairs with fewer positives
    #[arg(long, env = "OHMNET_MIN_ANNOTATED", default_value_t = 15)]
    pub min_annotated: usize,
    #[command(flatten)]
    pub classifier: ClassifierOptions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct TransferArgs {
    /// Layer manifest (`name<TAB>edgelist` lines)
    #[arg(long, env = "OHMNET_LAYERS")]
    pub layers: PathBuf,
    /// Hierarchy file (`child parent` lines)
    #[arg(long, env = "OHMNET_HIERARCHY")]
    pub hierarchy: PathBuf,
    /// Directory written by `ohmnet train`
    #[arg(long, env = "OHMNET_EMBEDDINGS")]
    pub embeddings: PathBuf,
    /// Label file (`node layer function` lines)
    #[arg(long, env = "OHMNET_LABELS")]
    pub labels: PathBuf,
    /// Layer whose labels are hidden and predicted
    #[arg(long, env = "OHMNET_TARGET")]
    pub target: String,
    /// Map from hierarchy distance to source weight
    #[arg(long, env = "OHMNET_WEIGHTING", value_enum, default_value_t = WeightingArg::Exponential)]
    pub weighting: WeightingArg,
    /// Skip functions with fewer target positives
    #[arg(long, env = "OHMNET_MIN_ANNOTATED", default_value_t = 15)]
    pub min_annotated: usize,
    /// Output directory for transfer.tsv
    #[arg(long, env = "OHMNET_OUT")]
    pub out: PathBuf,
    #[command(flatten)]
    pub classifier: ClassifierOptions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ProjectArgs {
    /// TOML file with option values, either top-level or under a
    /// [project] table
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Layer manifest (`name<TAB>edgelist` lines)
    #[arg(long, env = "OHMNET_LAYERS")]
    pub layers: PathBuf,
    /// Directory written by `ohmnet train`
    #[arg(long, env = "OHMNET_EMBEDDINGS")]
    pub embeddings: PathBuf,
    /// Hierarchy element (or layer) to project
    #[arg(long, env = "OHMNET_ELEMENT")]
    pub element: String,
    /// Output directory for projection.tsv and the raw vectors
    #[arg(long, env = "OHMNET_OUT")]
    pub out: PathBuf,
}
