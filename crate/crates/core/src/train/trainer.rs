use std::cell::Cell;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate, Hierarchy, Layer, MultiLayerNetwork, NodeId};
use crate::rng::{name_key, stream_rng, Stream, StreamRng};
use crate::train::regularizer::{internal_update, HierarchyIndex};
use crate::train::sgns::{dot, log_sigmoid, target_coefficient};
use crate::train::store::{AtomicRows, RowStore};
use crate::train::{init_embeddings, EmbeddingSet, EmbeddingTable};
use crate::walks::{simulate_walks, AliasTable, WalkConfig, WalkCorpus};
use crate::ExecMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    /// Strength of the parent-child coupling penalty.
    pub lambda: f64,
    pub negatives: usize,
    pub window: usize,
    /// Initial SGD step size; decays linearly over the whole run.
    pub alpha: f64,
    pub outer_iters: usize,
    /// Stop once no internal coordinate moves more than this in one outer
    /// iteration.
    pub tol: f64,
    pub seed: u64,
    pub mode: ExecMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            lambda: 0.1,
            negatives: 5,
            window: 10,
            alpha: 0.025,
            outer_iters: 10,
            tol: 1e-3,
            seed: 0,
            mode: ExecMode::Sequential,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let problem = if self.dim == 0 {
            "dimension must be at least 1"
        } else if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            "lambda must be a nonnegative number"
        } else if self.negatives == 0 {
            "at least one negative sample per pair is required"
        } else if self.window == 0 {
            "context window must be at least 1"
        } else if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            "initial step size must be positive"
        } else if self.outer_iters == 0 {
            "at least one outer iteration is required"
        } else if !(self.tol > 0.0) {
            "tolerance must be positive"
        } else {
            return Ok(());
        };
        Err(Error::Config(problem.into()))
    }

    fn alpha_floor(&self) -> f64 {
        self.alpha * 1e-4
    }
}

/// A leaf's walks translated to table rows, with its negative-sampling
/// noise distribution (occurrence counts raised to 0.75).
#[derive(Debug, Clone)]
pub struct LayerData {
    walks: Vec<Vec<u32>>,
    noise: Option<AliasTable>,
    /// Rows that never occur in the walks.
    unvisited: Vec<u32>,
    key: [u64; 2],
}

impl LayerData {
    pub fn new(layer: &Layer, table: &EmbeddingTable, walks: &[Vec<NodeId>]) -> Result<Self> {
        let mut counts = vec![0.0f64; table.len()];
        let rows = walks
            .iter()
            .map(|walk| {
                walk.iter()
                    .map(|&u| {
                        let k = table.row_of(u).ok_or_else(|| {
                            Error::Config(format!(
                                "walk visits {u}, which is not in layer `{}`",
                                layer.name()
                            ))
                        })?;
                        counts[k] += 1.0;
                        Ok(k as u32)
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let weights: Vec<f64> = counts.iter().map(|c| c.powf(0.75)).collect();
        let unvisited = (0..counts.len() as u32).filter(|&k| counts[k as usize] == 0.0).collect();
        Ok(LayerData {
            walks: rows,
            noise: AliasTable::new(&weights),
            unvisited,
            key: [0, name_key(layer.name())],
        })
    }

    pub fn num_walks(&self) -> usize {
        self.walks.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpochStats {
    pub pairs: usize,
    pub centers: usize,
    /// Mean negative-sampling surrogate per pair (before each update).
    pub mean_surrogate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    pub max_internal_change: f64,
    pub mean_surrogate: f64,
    pub leaf_time: Duration,
    pub hierarchy_time: Duration,
}

struct Kernel<'a> {
    dim: usize,
    window: usize,
    negatives: usize,
    lambda: f64,
    walks: &'a [Vec<u32>],
    noise: &'a AliasTable,
    /// Parent table rows for each row of this leaf, with the parent data.
    parent: Option<(&'a [f64], &'a [u32])>,
}

#[derive(Default)]
struct ChunkStats {
    pairs: usize,
    centers: usize,
    surrogate: f64,
}

impl Kernel<'_> {
    /// Trains on the walks listed in `order`. `step` maps the number of
    /// centers processed so far (across all workers) to a step size.
    fn run<S: RowStore + ?Sized>(
        &self,
        input: &S,
        context: &S,
        order: &[usize],
        rng: &mut StreamRng,
        step: &dyn Fn(usize) -> f64,
    ) -> ChunkStats {
        let dim = self.dim;
        let mut stats = ChunkStats::default();
        let mut h = vec![0.0; dim];
        let mut grad = vec![0.0; dim];
        let mut ctx = vec![0.0; dim];
        let mut targets: Vec<(usize, f64)> = Vec::with_capacity(self.negatives + 1);

        for &w in order {
            let walk = &self.walks[w];
            let alpha = step(walk.len());
            for (pos, &u) in walk.iter().enumerate() {
                let u = u as usize;
                let lo = pos.saturating_sub(self.window);
                let hi = (pos + self.window + 1).min(walk.len());
                for (c, &v) in walk.iter().enumerate().take(hi).skip(lo) {
                    if c == pos {
                        continue;
                    }
                    input.read_row(u, &mut h);
                    grad.fill(0.0);
                    targets.clear();
                    targets.push((v as usize, 0.0));
                    for _ in 0..self.negatives {
                        targets.push((self.noise.sample(rng), 0.0));
                    }
                    for (k, (t, g)) in targets.iter_mut().enumerate() {
                        context.read_row(*t, &mut ctx);
                        let score = dot(&ctx, &h);
                        let positive = k == 0;
                        stats.surrogate += log_sigmoid(if positive { score } else { -score });
                        *g = target_coefficient(score, positive);
                        for (acc, x) in grad.iter_mut().zip(&ctx) {
                            *acc += *g * x;
                        }
                    }
                    for &(t, g) in &targets {
                        context.add_to_row(t, alpha * g, &h);
                    }
                    input.add_to_row(u, alpha, &grad);
                    stats.pairs += 1;
                }
                if let Some((parent, parent_rows)) = self.parent {
                    // Implicit step on λ/2‖f − f_parent‖²; equals the explicit
                    // gradient step to first order and contracts for any λα.
                    let eta = self.lambda * alpha / (1.0 + self.lambda * alpha);
                    let p = parent_rows[u] as usize;
                    let target = &parent[p * dim..(p + 1) * dim];
                    input.read_row(u, &mut h);
                    for (x, t) in h.iter_mut().zip(target) {
                        *x -= eta * (*x - t);
                    }
                    for (j, x) in h.iter().enumerate() {
                        input.set(u * dim + j, *x);
                    }
                }
                stats.centers += 1;
            }
        }
        stats
    }
}

/// One SGD pass over every (node, context) pair in the leaf's walks, in a
/// freshly shuffled walk order. Each center occurrence is also pulled toward
/// its parent vector with strength λ, and rows absent from the walks are
/// pulled once. The step size decays linearly from
/// `alpha_start` to `alpha_end`.
#[allow(clippy::too_many_arguments)]
pub fn leaf_epoch(
    set: &mut EmbeddingSet,
    index: &HierarchyIndex,
    i: usize,
    data: &LayerData,
    config: &TrainConfig,
    epoch: usize,
    alpha_start: f64,
    alpha_end: f64,
) -> Result<EpochStats> {
    let dim = set.dim();
    let mut input = set.take_input(i);
    let mut context = set
        .element_mut(i)
        .context
        .take()
        .expect("leaf elements carry context tables");

    let parent = match (config.lambda > 0.0, index.parent(i)) {
        (true, Some(p)) => Some(p),
        _ => None,
    };
    let parent_rows: Vec<u32> = match parent {
        Some(_) => (0..input.len()).map(|k| index.parent_row(i, k) as u32).collect(),
        None => Vec::new(),
    };
    let parent_data = parent.map(|p| (set.table(p).data(), parent_rows.as_slice()));

    // Rows absent from the walks get no skip-gram signal; they still feel
    // the coupling, once per epoch.
    if let Some((target, rows)) = parent_data {
        let eta = config.lambda * alpha_end / (1.0 + config.lambda * alpha_end);
        for &k in &data.unvisited {
            let p = rows[k as usize] as usize;
            for (x, t) in input.row_mut(k as usize).iter_mut().zip(&target[p * dim..(p + 1) * dim]) {
                *x -= eta * (*x - t);
            }
        }
    }
    let Some(noise) = data.noise.as_ref() else {
        set.put_input(i, input);
        set.element_mut(i).context = Some(context);
        return Ok(EpochStats::default());
    };
    let kernel = Kernel {
        dim,
        window: config.window,
        negatives: config.negatives,
        lambda: config.lambda,
        walks: &data.walks,
        noise,
        parent: parent_data,
    };

    let mut rng = stream_rng(
        config.seed,
        Stream::Sgd,
        &[data.key[0], data.key[1], epoch as u64],
    );
    let mut order: Vec<usize> = (0..data.walks.len()).collect();
    order.shuffle(&mut rng);

    let total: usize = data.walks.iter().map(Vec::len).sum::<usize>().max(1);
    let floor = config.alpha_floor();
    let alpha_at = |done: usize| {
        let frac = done as f64 / total as f64;
        (alpha_start - (alpha_start - alpha_end) * frac).max(floor)
    };

    let stats = match config.mode {
        ExecMode::Sequential => {
            let done = Cell::new(0usize);
            let step = |n: usize| {
                let alpha = alpha_at(done.get());
                done.set(done.get() + n);
                alpha
            };
            let input_cells = Cell::from_mut(input.data_mut()).as_slice_of_cells();
            let context_cells = Cell::from_mut(context.data_mut()).as_slice_of_cells();
            kernel.run(input_cells, context_cells, &order, &mut rng, &step)
        }
        ExecMode::Parallel => {
            let shared_input = AtomicRows::from_slice(input.data());
            let shared_context = AtomicRows::from_slice(context.data());
            let done = AtomicUsize::new(0);
            let step = |n: usize| alpha_at(done.fetch_add(n, Ordering::Relaxed));
            let chunk = order
                .len()
                .div_ceil(rayon::current_num_threads() * 4)
                .max(1);
            let parts: Vec<ChunkStats> = order
                .par_chunks(chunk)
                .enumerate()
                .map(|(c, part)| {
                    let mut rng = stream_rng(
                        config.seed,
                        Stream::Sgd,
                        &[data.key[0], data.key[1], epoch as u64, c as u64 + 1],
                    );
                    kernel.run(&shared_input, &shared_context, part, &mut rng, &step)
                })
                .collect();
            shared_input.write_back(input.data_mut());
            shared_context.write_back(context.data_mut());
            parts.into_iter().fold(ChunkStats::default(), |a, b| ChunkStats {
                pairs: a.pairs + b.pairs,
                centers: a.centers + b.centers,
                surrogate: a.surrogate + b.surrogate,
            })
        }
    };

    let finite = input.is_finite() && context.is_finite();
    set.put_input(i, input);
    set.element_mut(i).context = Some(context);
    if !finite || !stats.surrogate.is_finite() {
        return Err(Error::NonFinite {
            element: set.element(i).name.clone(),
            stage: format!("SGD epoch {epoch}"),
        });
    }
    Ok(EpochStats {
        pairs: stats.pairs,
        centers: stats.centers,
        mean_surrogate: if stats.pairs == 0 {
            0.0
        } else {
            stats.surrogate / stats.pairs as f64
        },
    })
}

pub fn train(
    network: &MultiLayerNetwork,
    hierarchy: &Hierarchy,
    corpus: &WalkCorpus,
    config: &TrainConfig,
) -> Result<EmbeddingSet> {
    train_with(network, hierarchy, corpus, config, |_, _| Ok(()))
}

/// Alternating optimization: each outer iteration visits the hierarchy
/// children-first, giving every leaf one SGD epoch and every internal
/// element a closed-form update. `observer` sees the tables after every
/// outer iteration (for logging or checkpoints).
pub fn train_with<F>(
    network: &MultiLayerNetwork,
    hierarchy: &Hierarchy,
    corpus: &WalkCorpus,
    config: &TrainConfig,
    mut observer: F,
) -> Result<EmbeddingSet>
where
    F: FnMut(&IterationReport, &EmbeddingSet) -> Result<()>,
{
    config.validate()?;
    validate(network, hierarchy).blocking().into_result()?;
    if corpus.num_layers() != network.num_layers() {
        return Err(Error::Config(format!(
            "walk corpus has {} layers, network has {}",
            corpus.num_layers(),
            network.num_layers()
        )));
    }

    let mut set = init_embeddings(network, hierarchy, config.dim, config.seed);
    let index = HierarchyIndex::new(hierarchy, &set);
    let data: Vec<Option<LayerData>> = (0..hierarchy.len())
        .map(|i| {
            hierarchy
                .layer_of(i)
                .map(|l| LayerData::new(network.layer(l), set.table(i), corpus.walks(l)))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let has_internal = (0..hierarchy.len()).any(|i| index.is_internal(i));

    let outer = config.outer_iters as f64;
    let floor = config.alpha_floor();
    for iteration in 0..config.outer_iters {
        let alpha_start = (config.alpha * (1.0 - iteration as f64 / outer)).max(floor);
        let alpha_end = (config.alpha * (1.0 - (iteration + 1) as f64 / outer)).max(floor);
        let mut max_change = 0.0f64;
        let mut surrogate = 0.0;
        let mut pairs = 0usize;
        let mut leaf_time = Duration::ZERO;
        let mut hierarchy_time = Duration::ZERO;
        for &i in index.post_order() {
            let started = Instant::now();
            match &data[i] {
                Some(layer_data) => {
                    let stats = leaf_epoch(
                        &mut set,
                        &index,
                        i,
                        layer_data,
                        config,
                        iteration,
                        alpha_start,
                        alpha_end,
                    )?;
                    surrogate += stats.mean_surrogate * stats.pairs as f64;
                    pairs += stats.pairs;
                    leaf_time += started.elapsed();
                }
                None => {
                    max_change = max_change.max(internal_update(&mut set, &index, i, config.mode));
                    if !set.table(i).is_finite() {
                        return Err(Error::NonFinite {
                            element: hierarchy.name(i).to_owned(),
                            stage: "closed-form update".into(),
                        });
                    }
                    hierarchy_time += started.elapsed();
                }
            }
        }
        let report = IterationReport {
            iteration,
            max_internal_change: max_change,
            mean_surrogate: if pairs == 0 { 0.0 } else { surrogate / pairs as f64 },
            leaf_time,
            hierarchy_time,
        };
        log::info!(
            "outer iteration {}: mean surrogate {:.5}, max internal change {:.3e}",
            iteration + 1,
            report.mean_surrogate,
            report.max_internal_change
        );
        observer(&report, &set)?;
        // Internal tables only feed back into the leaves when λ > 0.
        if config.lambda > 0.0 && has_internal && max_change < config.tol {
            break;
        }
    }
    Ok(set)
}

/// Each layer trained on its own with no coupling. Leaf tables are
/// identical to the ones `train` produces with λ = 0.
pub fn train_independent(
    network: &MultiLayerNetwork,
    corpus: &WalkCorpus,
    config: &TrainConfig,
) -> Result<EmbeddingSet> {
    let mut elements = Vec::with_capacity(network.num_layers());
    for layer in network.layers() {
        let single = network.single_layer(layer.id());
        let hierarchy = Hierarchy::singleton(layer.name());
        let set = train(&single, &hierarchy, &corpus.single_layer(layer.id()), config)?;
        let mut element = set.elements()[0].clone();
        element.layer = Some(layer.id());
        elements.push(element);
    }
    Ok(EmbeddingSet::new(config.dim, elements))
}

/// Single-layer training on the collapsed network. The result holds one
/// element named `collapsed`, unbound to any layer of `network`.
pub fn train_collapsed(
    network: &MultiLayerNetwork,
    walk_config: &WalkConfig,
    config: &TrainConfig,
) -> Result<EmbeddingSet> {
    let collapsed = network.collapsed();
    let corpus = simulate_walks(&collapsed, walk_config, config.mode)?;
    let hierarchy = Hierarchy::singleton(collapsed.layer(0).name());
    let mut set = train(&collapsed, &hierarchy, &corpus, config)?;
    set.element_mut(0).layer = None;
    Ok(set)
}
