//! Multi-layer networks, the layer hierarchy, and structural validation.

mod hierarchy;
mod network;
mod validate;

pub use hierarchy::{Element, Hierarchy};
pub use network::{Layer, MultiLayerNetwork, NodeId, NodeRegistry};
pub use validate::{validate, ValidationReport, Violation};
