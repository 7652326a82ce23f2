//! Predicting functions in an unannotated target layer from classifiers
//! trained on the other layers, weighted by hierarchy distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::classifier::{train_classifier, ClassifierConfig, LinearClassifier};
use super::crossval::{map_tasks, Representation};
use super::metrics::{auprc, auroc};
use super::report::{EvalReport, PairScore};
use crate::error::{Error, Result};
use crate::graph::{Hierarchy, MultiLayerNetwork};
use crate::labels::LabelSet;
use crate::rng::{derive_seed, Stream};
use crate::ExecMode;

/// Mapping from tree distance `d` between source and target leaves to an
/// unnormalized source weight. Both distance-based mappings are heuristics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// `exp(-d)`
    #[default]
    Exponential,
    /// `1 / (1 + d)`
    Inverse,
    /// Equal weights, ignoring the hierarchy.
    Uniform,
}

impl Weighting {
    pub fn weight(self, distance: usize) -> f64 {
        match self {
            Weighting::Exponential => (-(distance as f64)).exp(),
            Weighting::Inverse => 1.0 / (1.0 + distance as f64),
            Weighting::Uniform => 1.0,
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Exponential => "exponential",
            Weighting::Inverse => "inverse",
            Weighting::Uniform => "uniform",
        })
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" => Ok(Weighting::Exponential),
            "inverse" => Ok(Weighting::Inverse),
            "uniform" => Ok(Weighting::Uniform),
            other => Err(Error::Config(format!(
                "unknown weighting {other:?} (expected exponential, inverse or uniform)"
            ))),
        }
    }
}

/// Normalized weights of `sources` relative to `target` (all layer ids).
pub fn transfer_weights(
    hierarchy: &Hierarchy,
    target: usize,
    sources: &[usize],
    weighting: Weighting,
) -> Result<Vec<f64>> {
    let leaf = |layer: usize| {
        hierarchy
            .leaf_for_layer(layer)
            .ok_or_else(|| Error::UnknownLayer(format!("layer {layer} is not bound to the hierarchy")))
    };
    let t = leaf(target)?;
    let raw = sources
        .iter()
        .map(|&s| Ok(weighting.weight(hierarchy.tree_distance(leaf(s)?, t)?)))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransferConfig {
    pub weighting: Weighting,
    /// Functions with fewer target positives are not evaluated.
    pub min_annotated: usize,
    pub classifier: ClassifierConfig,
    pub seed: u64,
    pub mode: ExecMode,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            weighting: Weighting::default(),
            min_annotated: 15,
            classifier: ClassifierConfig::default(),
            seed: 0,
            mode: ExecMode::Sequential,
        }
    }
}

/// Scores every target-layer node for every function annotated often
/// enough in the target, using only annotations from other layers. The
/// target's own labels serve solely as ground truth.
pub fn transfer_predict(
    network: &MultiLayerNetwork,
    repr: &Representation<'_>,
    labels: &LabelSet,
    hierarchy: &Hierarchy,
    target: usize,
    config: &TransferConfig,
) -> Result<EvalReport> {
    if target >= network.num_layers() {
        return Err(Error::UnknownLayer(format!("no layer with id {target}")));
    }
    config.classifier.validate()?;
    let sources_only = labels.without_layer(target);
    let target_layer = network.layer(target);
    let target_rows = repr.rows(target, target_layer.nodes())?;
    let mut report = EvalReport::new(format!(
        "transfer to {} ({} weighting, heuristic)",
        target_layer.name(),
        config.weighting
    ));

    let functions = labels.functions_in_layer(target);
    let outcomes = map_tasks(functions, config.mode, |function| -> Result<Option<PairScore>> {
        let truth_set = labels.positives(target, function).expect("function from target labels");
        if truth_set.len() < config.min_annotated {
            return Ok(None);
        }
        let mut sources = Vec::new();
        let mut classifiers: Vec<LinearClassifier> = Vec::new();
        for source in (0..network.num_layers()).filter(|&l| l != target) {
            let Some(positives) = sources_only.positives(source, function) else {
                continue;
            };
            let nodes = network.layer(source).nodes();
            let rows = repr.rows(source, nodes)?;
            let y: Vec<bool> = nodes.iter().map(|u| positives.contains(u)).collect();
            let classifier_config = ClassifierConfig {
                seed: derive_seed(
                    config.seed,
                    Stream::Classifier,
                    &[source as u64, function as u64, u64::MAX],
                ),
                ..config.classifier.clone()
            };
            match train_classifier(&rows, &y, &classifier_config) {
                Ok(c) => {
                    sources.push(source);
                    classifiers.push(c);
                }
                Err(Error::SingleClass { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if sources.is_empty() {
            return Ok(None);
        }
        let weights = transfer_weights(hierarchy, target, &sources, config.weighting)?;
        let scores: Vec<f64> = target_rows
            .iter()
            .map(|x| {
                classifiers
                    .iter()
                    .zip(&weights)
                    .map(|(c, w)| w * c.decision(x))
                    .sum()
            })
            .collect();
        let truth: Vec<bool> = target_layer.nodes().iter().map(|u| truth_set.contains(u)).collect();
        Ok(match (auroc(&scores, &truth), auprc(&scores, &truth)) {
            (Some(auroc), Some(auprc)) => Some(PairScore {
                layer: target,
                layer_name: target_layer.name().to_owned(),
                function: labels.function_name(function).to_owned(),
                auroc,
                auprc,
                positives: truth_set.len(),
                candidates: truth.len(),
            }),
            _ => None,
        })
    });
    for outcome in outcomes {
        match outcome? {
            Some(score) => report.scores.push(score),
            None => report.skipped += 1,
        }
    }
    Ok(report)
}
