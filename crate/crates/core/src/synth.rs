//! Planted-partition multi-layer benchmark with a known hierarchy.
//!
//! Community assignments start balanced at the root and are inherited down
//! the tree. Along every parent-child edge a fraction `1 - sqrt(1 - divergence)`
//! of nodes is re-assigned uniformly at random, so that two sibling layers
//! differ in a re-randomization for a `divergence` fraction of nodes. Layers
//! closer in the tree therefore share more of their community structure.

use std::collections::VecDeque;

use rand::seq::{index::sample, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Element, Hierarchy, Layer, MultiLayerNetwork, NodeId, NodeRegistry};
use crate::labels::LabelSet;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub nodes_per_layer: usize,
    pub layers: usize,
    pub hierarchy_depth: usize,
    pub communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub divergence: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            nodes_per_layer: 200,
            layers: 4,
            hierarchy_depth: 2,
            communities: 4,
            p_in: 0.1,
            p_out: 0.01,
            divergence: 0.2,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.communities < 2 {
            return Err(Error::Config("need at least 2 communities".into()));
        }
        if !(unit(self.p_in) && unit(self.p_out) && self.p_in > self.p_out) {
            return Err(Error::Config(format!(
                "need 0 <= p_out < p_in <= 1 (p_in={}, p_out={})",
                self.p_in, self.p_out
            )));
        }
        if !unit(self.divergence) {
            return Err(Error::Config("divergence must lie in [0, 1]".into()));
        }
        if self.nodes_per_layer < self.communities {
            return Err(Error::Config("fewer nodes than communities".into()));
        }
        if self.hierarchy_depth == 0 || self.layers < 2 {
            return Err(Error::Config(
                "need at least 2 layers and a hierarchy of depth >= 1".into(),
            ));
        }
        let min_leaves = 1usize
            .checked_shl(self.hierarchy_depth as u32)
            .unwrap_or(usize::MAX);
        if self.layers < min_leaves {
            return Err(Error::Config(format!(
                "a balanced hierarchy of depth {} needs at least {min_leaves} layers, got {}",
                self.hierarchy_depth, self.layers
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticBenchmark {
    pub network: MultiLayerNetwork,
    pub hierarchy: Hierarchy,
    pub labels: LabelSet,
    /// Community of every generated node (by generation index), per
    /// hierarchy element.
    pub assignments: Vec<Vec<usize>>,
}

/// Tree of the given depth whose internal elements all have at least two
/// children, with `layers` leaves spread as evenly as possible. Leaves are
/// named `layer0..`, bound to layers in order.
pub fn balanced_hierarchy(layers: usize, depth: usize) -> Hierarchy {
    let mut elements = vec![Element {
        name: "root".into(),
        parent: None,
        children: Vec::new(),
        layer: None,
    }];
    let mut next_leaf = 0;
    grow(&mut elements, 0, 0, depth, layers, &mut next_leaf);
    Hierarchy::from_elements(elements)
}

fn grow(
    elements: &mut Vec<Element>,
    at: usize,
    level: usize,
    depth: usize,
    leaves: usize,
    next_leaf: &mut usize,
) {
    let remaining = depth - level;
    let groups = if remaining == 1 {
        leaves
    } else {
        let per_group = 1usize << (remaining - 1);
        let ideal = (leaves as f64).powf(1.0 / remaining as f64).ceil() as usize;
        ideal.clamp(2, leaves / per_group)
    };
    for g in 0..groups {
        let share = leaves / groups + usize::from(g < leaves % groups);
        let k = elements.len();
        let (name, layer) = if remaining == 1 {
            *next_leaf += 1;
            (format!("layer{}", *next_leaf - 1), Some(*next_leaf - 1))
        } else {
            (format!("group{}_{}", level + 1, k), None)
        };
        elements.push(Element {
            name,
            parent: Some(at),
            children: Vec::new(),
            layer,
        });
        elements[at].children.push(k);
        if remaining > 1 {
            grow(elements, k, level + 1, depth, share, next_leaf);
        }
    }
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticBenchmark> {
    config.validate()?;
    let n = config.nodes_per_layer;
    let c = config.communities;
    let hierarchy = balanced_hierarchy(config.layers, config.hierarchy_depth);

    let mut assignments = vec![Vec::new(); hierarchy.len()];
    let root = hierarchy.root();
    let mut rng = stream_rng(config.seed, Stream::Synth, &[0, root as u64]);
    let mut base: Vec<usize> = (0..n).map(|v| v % c).collect();
    base.shuffle(&mut rng);
    assignments[root] = base;

    let per_edge = 1.0 - (1.0 - config.divergence).sqrt();
    let moved = (per_edge * n as f64).round() as usize;
    let mut queue: VecDeque<usize> = hierarchy.children_of(root).iter().copied().collect();
    while let Some(i) = queue.pop_front() {
        let mut rng = stream_rng(config.seed, Stream::Synth, &[0, i as u64]);
        let mut own = assignments[hierarchy.parent(i).unwrap()].clone();
        for v in sample(&mut rng, n, moved) {
            own[v] = rng.gen_range(0..c);
        }
        assignments[i] = own;
        queue.extend(hierarchy.children_of(i));
    }

    // Edges per layer, on generation indices.
    let mut layer_edges = vec![Vec::new(); config.layers];
    for leaf in hierarchy.leaves() {
        let layer = hierarchy.layer_of(leaf).unwrap();
        let community = &assignments[leaf];
        let mut rng = stream_rng(config.seed, Stream::Synth, &[1, layer as u64]);
        for u in 0..n {
            for v in u + 1..n {
                let p = if community[u] == community[v] {
                    config.p_in
                } else {
                    config.p_out
                };
                if rng.gen::<f64>() < p {
                    layer_edges[layer].push((u, v));
                }
            }
        }
    }

    // Register only nodes that have an edge somewhere, in generation order.
    let mut present = vec![false; n];
    for &(u, v) in layer_edges.iter().flatten() {
        present[u] = true;
        present[v] = true;
    }
    let mut registry = NodeRegistry::new();
    let ids: Vec<Option<NodeId>> = (0..n)
        .map(|v| present[v].then(|| registry.intern(&format!("n{v}"))))
        .collect();

    let mut labels = LabelSet::new();
    let mut layers = Vec::with_capacity(config.layers);
    for (layer, edges) in layer_edges.iter().enumerate() {
        let built = Layer::from_edges(
            layer,
            format!("layer{layer}"),
            [],
            edges
                .iter()
                .map(|&(u, v)| (ids[u].unwrap(), ids[v].unwrap(), 1.0)),
        )?;
        let leaf = hierarchy.leaf_for_layer(layer).unwrap();
        for v in 0..n {
            if let Some(id) = ids[v].filter(|&id| built.contains(id)) {
                labels.insert(id, layer, &format!("community{}", assignments[leaf][v]));
            }
        }
        layers.push(built);
    }
    let network = MultiLayerNetwork::new(registry, layers)?;
    Ok(SyntheticBenchmark {
        network,
        hierarchy,
        labels,
        assignments,
    })
}
