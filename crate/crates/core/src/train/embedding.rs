use std::collections::HashMap;

use rand::Rng;

use crate::graph::{Hierarchy, MultiLayerNetwork, NodeId};
use crate::rng::{name_key, stream_rng, Stream};

/// Row-major `nodes.len() × dim` table; row k holds the vector of
/// `nodes[k]`, nodes ascending.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    nodes: Vec<NodeId>,
    rows: HashMap<NodeId, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn zeros(dim: usize, nodes: Vec<NodeId>) -> Self {
        let data = vec![0.0; nodes.len() * dim];
        Self::from_data(dim, nodes, data)
    }

    /// Panics if `data` does not hold `nodes.len() * dim` values or the node
    /// list is not strictly ascending.
    pub fn from_data(dim: usize, nodes: Vec<NodeId>, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nodes.len() * dim, "table shape mismatch");
        assert!(
            nodes.windows(2).all(|w| w[0] < w[1]),
            "table nodes must be strictly ascending"
        );
        let rows = nodes.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        EmbeddingTable {
            dim,
            nodes,
            rows,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn row_of(&self, u: NodeId) -> Option<usize> {
        self.rows.get(&u).copied()
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.rows.contains_key(&u)
    }

    pub fn vector(&self, u: NodeId) -> Option<&[f64]> {
        self.row_of(u).map(|k| self.row(k))
    }

    pub fn vector_mut(&mut self, u: NodeId) -> Option<&mut [f64]> {
        self.row_of(u).map(|k| self.row_mut(k))
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest absolute coordinate difference to a table of the same shape.
    pub fn max_abs_diff(&self, other: &EmbeddingTable) -> f64 {
        assert_eq!(self.nodes, other.nodes);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Tables of one hierarchy element: input vectors over its scope and, for
/// leaves, the skip-gram context vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementEmbedding {
    pub name: String,
    pub layer: Option<usize>,
    pub input: EmbeddingTable,
    pub context: Option<EmbeddingTable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    elements: Vec<ElementEmbedding>,
}

impl EmbeddingSet {
    pub fn new(dim: usize, elements: Vec<ElementEmbedding>) -> Self {
        for e in &elements {
            assert_eq!(e.input.dim(), dim, "dimension mismatch in `{}`", e.name);
        }
        EmbeddingSet { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ElementEmbedding] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ElementEmbedding {
        &self.elements[i]
    }

    pub fn element_mut(&mut self, i: usize) -> &mut ElementEmbedding {
        &mut self.elements[i]
    }

    pub fn table(&self, i: usize) -> &EmbeddingTable {
        &self.elements[i].input
    }

    pub fn by_name(&self, name: &str) -> Option<&ElementEmbedding> {
        self.elements.iter().find(|e| e.name == name)
    }

    /// Input table of the element bound to `layer`.
    pub fn layer_table(&self, layer: usize) -> Option<&EmbeddingTable> {
        self.elements
            .iter()
            .find(|e| e.layer == Some(layer))
            .map(|e| &e.input)
    }

    pub fn is_finite(&self) -> bool {
        self.elements.iter().all(|e| {
            e.input.is_finite() && e.context.as_ref().is_none_or(EmbeddingTable::is_finite)
        })
    }

    pub(crate) fn take_input(&mut self, i: usize) -> EmbeddingTable {
        std::mem::take(&mut self.elements[i].input)
    }

    pub(crate) fn put_input(&mut self, i: usize, table: EmbeddingTable) {
        self.elements[i].input = table;
    }
}

/// Stream key for an element's random streams: leaves are keyed by their
/// layer name so a layer trained alone draws the same numbers.
pub(crate) fn element_key(network: &MultiLayerNetwork, hierarchy: &Hierarchy, i: usize) -> [u64; 2] {
    match hierarchy.layer_of(i) {
        Some(layer) => [0, name_key(network.layer(layer).name())],
        None => [1, name_key(hierarchy.name(i))],
    }
}

/// Input vectors uniform in [-0.5/d, 0.5/d]; context vectors zero.
pub fn init_embeddings(
    network: &MultiLayerNetwork,
    hierarchy: &Hierarchy,
    dim: usize,
    seed: u64,
) -> EmbeddingSet {
    let bound = 0.5 / dim as f64;
    let elements = hierarchy
        .scopes(network)
        .into_iter()
        .enumerate()
        .map(|(i, scope)| {
            let mut rng = stream_rng(seed, Stream::Init, &element_key(network, hierarchy, i));
            let data = (0..scope.len() * dim)
                .map(|_| rng.gen_range(-bound..=bound))
                .collect();
            let layer = hierarchy.layer_of(i);
            let context = layer.map(|_| EmbeddingTable::zeros(dim, scope.clone()));
            ElementEmbedding {
                name: hierarchy.name(i).to_owned(),
                layer,
                input: EmbeddingTable::from_data(dim, scope, data),
                context,
            }
        })
        .collect();
    EmbeddingSet::new(dim, elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Layer, NodeRegistry};

    fn fixture() -> (MultiLayerNetwork, Hierarchy) {
        let mut reg = NodeRegistry::new();
        let n: Vec<NodeId> = (0..4).map(|k| reg.intern(&format!("n{k}"))).collect();
        let net = MultiLayerNetwork::new(
            reg,
            vec![
                Layer::from_edges(0, "A", [], [(n[0], n[1], 1.0)]).unwrap(),
                Layer::from_edges(1, "B", [], [(n[1], n[2], 1.0), (n[2], n[3], 1.0)]).unwrap(),
            ],
        )
        .unwrap();
        let h = Hierarchy::star("root", &net.layer_names()).unwrap();
        (net, h)
    }

    #[test]
    fn init_range_and_shapes() {
        let (net, h) = fixture();
        let set = init_embeddings(&net, &h, 128, 9);
        let bound = 1.0 / 256.0;
        for e in set.elements() {
            assert!(e.input.data().iter().all(|x| x.abs() <= bound));
            assert_eq!(e.context.is_some(), e.layer.is_some());
            if let Some(ctx) = &e.context {
                assert!(ctx.data().iter().all(|&x| x == 0.0));
            }
        }
        let root = set.by_name("root").unwrap();
        assert_eq!(root.input.len(), 4);
        assert_eq!(set.by_name("A").unwrap().input.len(), 2);
        assert_eq!(set.by_name("B").unwrap().input.len(), 3);
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let (net, h) = fixture();
        assert_eq!(init_embeddings(&net, &h, 8, 1), init_embeddings(&net, &h, 8, 1));
        assert_ne!(init_embeddings(&net, &h, 8, 1), init_embeddings(&net, &h, 8, 2));
    }

    #[test]
    fn leaf_init_does_not_depend_on_the_rest_of_the_network() {
        let (net, h) = fixture();
        let full = init_embeddings(&net, &h, 8, 4);
        let alone = init_embeddings(&net.single_layer(1), &Hierarchy::singleton("B"), 8, 4);
        assert_eq!(full.by_name("B").unwrap().input, alone.element(0).input);
    }
}
