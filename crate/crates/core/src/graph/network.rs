use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index into the global node universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node universe exceeds u32::MAX"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Bijection between external node names and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRegistry {
    names: Vec<String>,
    ids: HashMap<String, NodeId>,
}

impl NodeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = NodeId::new(self.names.len());
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId::new)
    }
}

/// One weighted undirected layer over a subset of the node universe.
///
/// Neighbor lists are sorted by node id, so adjacency tests are a binary
/// search.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    id: usize,
    name: String,
    nodes: Vec<NodeId>,
    position: HashMap<NodeId, usize>,
    neighbors: Vec<Vec<(NodeId, f64)>>,
}

impl Layer {
    /// Builds a layer from undirected edges. Edges are symmetrized and
    /// repeated edges have their weights summed. `nodes` may list extra
    /// (isolated) members; edge endpoints are always members.
    pub fn from_edges(
        id: usize,
        name: impl Into<String>,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self> {
        let name = name.into();
        let mut members: BTreeSet<NodeId> = nodes.into_iter().collect();
        let mut adjacency: BTreeMap<NodeId, BTreeMap<NodeId, f64>> = BTreeMap::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::Config(format!("self-loop on {u} in layer `{name}`")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config(format!(
                    "edge {u}-{v} in layer `{name}` has non-positive weight {w}"
                )));
            }
            members.insert(u);
            members.insert(v);
            *adjacency.entry(u).or_default().entry(v).or_insert(0.0) += w;
            *adjacency.entry(v).or_default().entry(u).or_insert(0.0) += w;
        }
        let nodes: Vec<NodeId> = members.into_iter().collect();
        let neighbors = nodes
            .iter()
            .map(|u| {
                adjacency
                    .remove(u)
                    .map(|m| m.into_iter().collect())
                    .unwrap_or_default()
            })
            .collect();
        Ok(Self::from_raw_parts(id, name, nodes, neighbors))
    }

    /// Assembles a layer without symmetrizing or checking anything.
    /// `neighbors[k]` belongs to `nodes[k]`; use [`crate::graph::validate`]
    /// to audit the result.
    pub fn from_raw_parts(
        id: usize,
        name: impl Into<String>,
        nodes: Vec<NodeId>,
        mut neighbors: Vec<Vec<(NodeId, f64)>>,
    ) -> Self {
        assert_eq!(nodes.len(), neighbors.len());
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&k| nodes[k]);
        let nodes: Vec<NodeId> = order.iter().map(|&k| nodes[k]).collect();
        let mut sorted: Vec<Vec<(NodeId, f64)>> = order
            .iter()
            .map(|&k| std::mem::take(&mut neighbors[k]))
            .collect();
        for list in &mut sorted {
            list.sort_by_key(|&(v, _)| v);
        }
        let position = nodes.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        Layer {
            id,
            name: name.into(),
            nodes,
            position,
            neighbors: sorted,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Member nodes in ascending id order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.position.contains_key(&u)
    }

    /// Neighbors of `u` with edge weights; empty for non-members.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        match self.position.get(&u) {
            Some(&k) => &self.neighbors[k],
            None => &[],
        }
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.neighbors(u).len()
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let list = self.neighbors(u);
        list.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|k| list[k].1)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.nodes.iter().zip(&self.neighbors).flat_map(|(&u, list)| {
            list.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges().count()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    pub(crate) fn adjacency_lists(&self) -> impl Iterator<Item = (NodeId, &[(NodeId, f64)])> {
        self.nodes
            .iter()
            .zip(&self.neighbors)
            .map(|(&u, list)| (u, list.as_slice()))
    }

    pub(crate) fn renumbered(&self, id: usize) -> Layer {
        Layer {
            id,
            ..self.clone()
        }
    }
}

/// K layers over one shared node universe.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLayerNetwork {
    registry: NodeRegistry,
    layers: Vec<Layer>,
}

impl MultiLayerNetwork {
    pub fn new(registry: NodeRegistry, layers: Vec<Layer>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for (k, layer) in layers.iter().enumerate() {
            if layer.id != k {
                return Err(Error::Config(format!(
                    "layer `{}` has id {} at position {k}",
                    layer.name, layer.id
                )));
            }
            if layer.name.is_empty() || !names.insert(layer.name.as_str()) {
                return Err(Error::Config(format!(
                    "layer names must be unique and nonempty (`{}`)",
                    layer.name
                )));
            }
            if let Some(u) = layer.nodes.iter().find(|u| u.index() >= registry.len()) {
                return Err(Error::Config(format!(
                    "layer `{}` references unregistered node {u}",
                    layer.name
                )));
            }
        }
        Ok(MultiLayerNetwork { registry, layers })
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.registry
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, id: usize) -> &Layer {
        &self.layers[id]
    }

    pub fn layer_by_name(&self, name: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.name == name)
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.registry.len()
    }

    pub fn layer_names(&self) -> Vec<String> {
        self.layers.iter().map(|l| l.name.clone()).collect()
    }

    /// Network holding only layer `id` (renumbered to 0) over the same
    /// node universe.
    pub fn single_layer(&self, id: usize) -> MultiLayerNetwork {
        MultiLayerNetwork {
            registry: self.registry.clone(),
            layers: vec![self.layers[id].renumbered(0)],
        }
    }

    /// Merges all layers into one layer over the union of node sets; an
    /// edge's weight is the sum of its weights across layers.
    pub fn collapse_layers(&self) -> Layer {
        self.collapse_layers_named("collapsed")
    }

    pub fn collapse_layers_named(&self, name: &str) -> Layer {
        let nodes: BTreeSet<NodeId> = self
            .layers
            .iter()
            .flat_map(|l| l.nodes.iter().copied())
            .collect();
        let edges = self.layers.iter().flat_map(|l| l.edges());
        Layer::from_edges(0, name, nodes, edges)
            .expect("edges of valid layers stay valid when merged")
    }

    /// Network whose single layer is the collapsed union.
    pub fn collapsed(&self) -> MultiLayerNetwork {
        MultiLayerNetwork {
            registry: self.registry.clone(),
            layers: vec![self.collapse_layers()],
        }
    }
}
