use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Layer, MultiLayerNetwork, NodeId};
use crate::rng::{name_key, stream_rng, Stream};
use crate::walks::AliasTable;
use crate::ExecMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Return parameter: weight 1/p for stepping back to the previous node.
    pub p: f64,
    /// In-out parameter: weight 1/q for moving away from the previous node.
    pub q: f64,
    pub seed: u64,
    /// Upper bound, in bytes, on cached second-order alias tables per layer.
    pub cache_bytes: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 80,
            p: 1.0,
            q: 1.0,
            seed: 0,
            cache_bytes: 256 << 20,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node < 1 || self.walk_length < 1 {
            return Err(Error::Config(
                "walks per node and walk length must be at least 1".into(),
            ));
        }
        if !(self.p > 0.0 && self.p.is_finite() && self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::Config(format!(
                "return and in-out parameters must be positive (p={}, q={})",
                self.p, self.q
            )));
        }
        Ok(())
    }

    fn first_order(&self) -> bool {
        self.p == 1.0 && self.q == 1.0
    }
}

/// Walks per layer, indexed by layer id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkCorpus {
    pub layers: Vec<Vec<Vec<NodeId>>>,
}

impl WalkCorpus {
    pub fn walks(&self, layer: usize) -> &[Vec<NodeId>] {
        &self.layers[layer]
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Corpus holding only `layer`, renumbered to 0.
    pub fn single_layer(&self, layer: usize) -> WalkCorpus {
        WalkCorpus {
            layers: vec![self.layers[layer].clone()],
        }
    }
}

/// Alias table over the neighbors of `cur`, biased by where the walk came
/// from: weight × 1/p back to `prev`, × 1 to common neighbors of `prev`,
/// × 1/q elsewhere. Entry k of the table is `layer.neighbors(cur)[k]`.
pub fn build_transition(
    layer: &Layer,
    prev: NodeId,
    cur: NodeId,
    config: &WalkConfig,
) -> Result<AliasTable> {
    let neighbors = layer.neighbors(cur);
    let weights: Vec<f64> = neighbors
        .iter()
        .map(|&(x, w)| {
            if x == prev {
                w / config.p
            } else if layer.has_edge(x, prev) {
                w
            } else {
                w / config.q
            }
        })
        .collect();
    AliasTable::new(&weights).ok_or_else(|| isolated(layer, cur))
}

fn isolated(layer: &Layer, cur: NodeId) -> Error {
    Error::IsolatedNode {
        layer: layer.name().to_owned(),
        node: cur.to_string(),
    }
}

/// Samples walk steps on one layer, caching second-order tables lazily up
/// to the configured memory budget.
pub struct TransitionSampler<'a> {
    layer: &'a Layer,
    config: &'a WalkConfig,
    first_order: HashMap<NodeId, AliasTable>,
    cache: RwLock<HashMap<(NodeId, NodeId), Arc<AliasTable>>>,
    cached_bytes: AtomicUsize,
}

impl<'a> TransitionSampler<'a> {
    pub fn new(layer: &'a Layer, config: &'a WalkConfig) -> Self {
        let first_order = layer
            .nodes()
            .iter()
            .filter_map(|&u| {
                let weights: Vec<f64> = layer.neighbors(u).iter().map(|&(_, w)| w).collect();
                AliasTable::new(&weights).map(|t| (u, t))
            })
            .collect();
        TransitionSampler {
            layer,
            config,
            first_order,
            cache: RwLock::new(HashMap::new()),
            cached_bytes: AtomicUsize::new(0),
        }
    }

    pub fn first_step<R: rand::Rng + ?Sized>(&self, cur: NodeId, rng: &mut R) -> Option<NodeId> {
        let table = self.first_order.get(&cur)?;
        Some(self.layer.neighbors(cur)[table.sample(rng)].0)
    }

    pub fn next_step<R: rand::Rng + ?Sized>(
        &self,
        prev: NodeId,
        cur: NodeId,
        rng: &mut R,
    ) -> Result<NodeId> {
        let neighbors = self.layer.neighbors(cur);
        if self.config.first_order() {
            let table = self
                .first_order
                .get(&cur)
                .ok_or_else(|| isolated(self.layer, cur))?;
            return Ok(neighbors[table.sample(rng)].0);
        }
        if let Some(table) = self.cache.read().unwrap().get(&(prev, cur)) {
            return Ok(neighbors[table.sample(rng)].0);
        }
        let table = build_transition(self.layer, prev, cur, self.config)?;
        let k = table.sample(rng);
        let size = table.heap_size();
        if self.cached_bytes.load(Ordering::Relaxed) + size <= self.config.cache_bytes {
            let mut cache = self.cache.write().unwrap();
            if cache.insert((prev, cur), Arc::new(table)).is_none() {
                self.cached_bytes.fetch_add(size, Ordering::Relaxed);
            }
        }
        Ok(neighbors[k].0)
    }

    /// One walk of `walk_length` steps from `start`; `[start]` for isolated
    /// nodes.
    pub fn walk<R: rand::Rng + ?Sized>(&self, start: NodeId, rng: &mut R) -> Vec<NodeId> {
        let mut walk = Vec::with_capacity(self.config.walk_length + 1);
        walk.push(start);
        let Some(second) = self.first_step(start, rng) else {
            return walk;
        };
        walk.push(second);
        while walk.len() <= self.config.walk_length {
            let (prev, cur) = (walk[walk.len() - 2], walk[walk.len() - 1]);
            // cur has at least the edge back to prev
            let next = self
                .next_step(prev, cur, rng)
                .expect("undirected walk never reaches an isolated node");
            walk.push(next);
        }
        walk
    }
}

/// `walks_per_node` rounds over the layer's nodes; each round visits start
/// nodes in a freshly shuffled order. Every walk draws from its own stream
/// keyed by (seed, layer name, start node, round), so both modes return the
/// same corpus.
pub fn walk_layer(layer: &Layer, config: &WalkConfig, mode: ExecMode) -> Vec<Vec<NodeId>> {
    let sampler = TransitionSampler::new(layer, config);
    let layer_key = name_key(layer.name());
    let mut walks = Vec::with_capacity(config.walks_per_node * layer.len());
    for round in 0..config.walks_per_node {
        let mut order = layer.nodes().to_vec();
        order.shuffle(&mut stream_rng(
            config.seed,
            Stream::WalkOrder,
            &[layer_key, round as u64],
        ));
        let one = |&start: &NodeId| {
            let mut rng = stream_rng(
                config.seed,
                Stream::Walk,
                &[layer_key, start.index() as u64, round as u64],
            );
            sampler.walk(start, &mut rng)
        };
        match mode {
            ExecMode::Sequential => walks.extend(order.iter().map(one)),
            ExecMode::Parallel => walks.par_extend(order.par_iter().map(one)),
        }
    }
    walks
}

pub fn simulate_walks(
    network: &MultiLayerNetwork,
    config: &WalkConfig,
    mode: ExecMode,
) -> Result<WalkCorpus> {
    config.validate()?;
    let layers = network
        .layers()
        .iter()
        .map(|layer| walk_layer(layer, config, mode))
        .collect();
    Ok(WalkCorpus { layers })
}
