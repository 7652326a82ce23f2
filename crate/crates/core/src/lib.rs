//! Node embeddings for multi-layer networks whose layers hang off the
//! leaves of a tree hierarchy.
//!
//! Each layer gets its own skip-gram model trained on biased random walks;
//! a quadratic penalty ties a node's vector in every hierarchy element to
//! its vector in the parent element. Internal elements carry vectors too,
//! giving representations at every scale of the hierarchy.
//!
//! The crate also covers the surrounding pipeline: text formats, a planted
//! partition benchmark generator, and multi-label evaluation with
//! one-vs-all linear classifiers.

pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod labels;
pub mod rng;
pub mod synth;
pub mod train;
pub mod walks;

pub use error::{Error, Result};
pub use graph::{Hierarchy, Layer, MultiLayerNetwork, NodeId, NodeRegistry};
pub use labels::LabelSet;
pub use train::{EmbeddingSet, EmbeddingTable, TrainConfig};
pub use walks::{WalkConfig, WalkCorpus};

use serde::{Deserialize, Serialize};

/// Execution contract for walk generation and training.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    /// One worker, fixed RNG streams, bit-reproducible.
    #[default]
    Sequential,
    /// Lock-free shared updates across the rayon pool; not reproducible.
    Parallel,
}
