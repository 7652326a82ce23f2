//! Joint optimization of per-layer skip-gram objectives and the
//! hierarchical coupling penalty.

mod embedding;
mod regularizer;
pub mod sgns;
mod store;
mod trainer;

pub use embedding::{init_embeddings, ElementEmbedding, EmbeddingSet, EmbeddingTable};
pub use regularizer::{
    closed_form_update, hierarchy_sweep, internal_update, reg_term, regularizer_value,
    total_regularizer, HierarchyIndex,
};
pub use trainer::{
    leaf_epoch, train, train_collapsed, train_independent, train_with, EpochStats,
    IterationReport, LayerData, TrainConfig,
};
