//! Protein-level cross-validated function prediction.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::{train_classifier, ClassifierConfig};
use super::metrics::{auprc, auroc};
use super::report::{EvalReport, PairScore};
use crate::error::{Error, Result};
use crate::graph::{MultiLayerNetwork, NodeId};
use crate::labels::LabelSet;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::train::{EmbeddingSet, EmbeddingTable};
use crate::ExecMode;

/// Which vectors represent a node in each layer.
#[derive(Debug, Clone)]
pub struct Representation<'a> {
    tables: Vec<&'a EmbeddingTable>,
}

impl<'a> Representation<'a> {
    /// The leaf table bound to each layer.
    pub fn per_layer(set: &'a EmbeddingSet, num_layers: usize) -> Result<Self> {
        let tables = (0..num_layers)
            .map(|l| {
                set.layer_table(l)
                    .ok_or_else(|| Error::UnknownLayer(format!("no embeddings for layer {l}")))
            })
            .collect::<Result<_>>()?;
        Ok(Representation { tables })
    }

    /// One table shared by every layer, as produced by collapsed training.
    pub fn shared(table: &'a EmbeddingTable, num_layers: usize) -> Self {
        Representation {
            tables: vec![table; num_layers],
        }
    }

    pub fn table(&self, layer: usize) -> &'a EmbeddingTable {
        self.tables[layer]
    }

    /// Feature rows for `nodes`, which must all be present.
    pub(crate) fn rows(&self, layer: usize, nodes: &[NodeId]) -> Result<Vec<&'a [f64]>> {
        let table = self.tables[layer];
        nodes
            .iter()
            .map(|&u| {
                table.vector(u).ok_or_else(|| {
                    Error::UnknownElement(format!("node {u} has no vector for layer {layer}"))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub folds: usize,
    /// Pairs with fewer positives are not evaluated.
    pub min_annotated: usize,
    /// Restrict evaluation to these layers.
    pub layers: Option<Vec<usize>>,
    pub classifier: ClassifierConfig,
    pub seed: u64,
    pub mode: ExecMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 10,
            min_annotated: 15,
            layers: None,
            classifier: ClassifierConfig::default(),
            seed: 0,
            mode: ExecMode::Sequential,
        }
    }
}

/// Fold of every registered node; a node is held out in all layers at once.
pub fn protein_folds(num_nodes: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..num_nodes).collect();
    order.shuffle(&mut stream_rng(seed, Stream::Folds, &[]));
    let mut fold = vec![0; num_nodes];
    for (position, &node) in order.iter().enumerate() {
        fold[node] = position % folds;
    }
    fold
}

pub(crate) fn map_tasks<T, R, F>(tasks: Vec<T>, mode: ExecMode, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match mode {
        ExecMode::Sequential => tasks.into_iter().map(f).collect(),
        ExecMode::Parallel => tasks.into_par_iter().map(f).collect(),
    }
}

enum Outcome {
    Scored(PairScore, usize),
    Skipped(usize),
}

pub fn cross_validate(
    network: &MultiLayerNetwork,
    repr: &Representation<'_>,
    labels: &LabelSet,
    config: &EvalConfig,
) -> Result<EvalReport> {
    if labels.is_empty() {
        return Err(Error::Config("no labels to evaluate".into()));
    }
    if config.folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    config.classifier.validate()?;
    let fold_of = protein_folds(network.num_nodes(), config.folds, config.seed);
    let mut report = EvalReport::new(format!("{}-fold protein-level cross-validation", config.folds));

    let tasks: Vec<(usize, usize)> = labels
        .pairs()
        .map(|(key, _)| key)
        .filter(|(l, _)| config.layers.as_ref().is_none_or(|ls| ls.contains(l)))
        .collect();
    let outcomes = map_tasks(tasks, config.mode, |(layer, function)| {
        evaluate_pair(network, repr, labels, config, &fold_of, layer, function)
    });
    for outcome in outcomes {
        match outcome? {
            Outcome::Scored(score, skipped_folds) => {
                report.scores.push(score);
                report.skipped_folds += skipped_folds;
            }
            Outcome::Skipped(skipped_folds) => {
                report.skipped += 1;
                report.skipped_folds += skipped_folds;
            }
        }
    }
    Ok(report)
}

fn evaluate_pair(
    network: &MultiLayerNetwork,
    repr: &Representation<'_>,
    labels: &LabelSet,
    config: &EvalConfig,
    fold_of: &[usize],
    layer: usize,
    function: usize,
) -> Result<Outcome> {
    let positives = labels.positives(layer, function).expect("pair from labels");
    if positives.len() < config.min_annotated {
        return Ok(Outcome::Skipped(0));
    }
    let nodes = network.layer(layer).nodes();
    let rows = repr.rows(layer, nodes)?;
    let truth: Vec<bool> = nodes.iter().map(|u| positives.contains(u)).collect();

    let mut scores = Vec::with_capacity(nodes.len());
    let mut held_truth = Vec::with_capacity(nodes.len());
    let mut skipped_folds = 0;
    for fold in 0..config.folds {
        let (mut train_x, mut train_y, mut test) = (Vec::new(), Vec::new(), Vec::new());
        for (k, u) in nodes.iter().enumerate() {
            if fold_of[u.index()] == fold {
                test.push(k);
            } else {
                train_x.push(rows[k]);
                train_y.push(truth[k]);
            }
        }
        if test.is_empty() {
            continue;
        }
        let classifier_config = ClassifierConfig {
            seed: derive_seed(
                config.seed,
                Stream::Classifier,
                &[layer as u64, function as u64, fold as u64],
            ),
            ..config.classifier.clone()
        };
        let classifier = match train_classifier(&train_x, &train_y, &classifier_config) {
            Ok(c) => c,
            Err(Error::SingleClass { .. }) => {
                skipped_folds += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for k in test {
            scores.push(classifier.decision(rows[k]));
            held_truth.push(truth[k]);
        }
    }
    Ok(match (auroc(&scores, &held_truth), auprc(&scores, &held_truth)) {
        (Some(auroc), Some(auprc)) => Outcome::Scored(
            PairScore {
                layer,
                layer_name: network.layer(layer).name().to_owned(),
                function: labels.function_name(function).to_owned(),
                auroc,
                auprc,
                positives: positives.len(),
                candidates: nodes.len(),
            },
            skipped_folds,
        ),
        _ => Outcome::Skipped(skipped_folds),
    })
}
