//! Network neighborhoods via second-order biased random walks.

mod alias;
mod node2vec;

pub use alias::AliasTable;
pub use node2vec::{
    build_transition, simulate_walks, walk_layer, TransitionSampler, WalkConfig, WalkCorpus,
};
