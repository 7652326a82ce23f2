//! Linear binary classifier: modified Huber loss with an elastic-net
//! penalty, fitted by proximal SGD on standardized features.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Modified Huber loss at margin `z = y (w.x + b)`.
pub fn modified_huber(z: f64) -> f64 {
    if z >= -1.0 {
        (1.0 - z).max(0.0).powi(2)
    } else {
        -4.0 * z
    }
}

/// Derivative of [`modified_huber`] with respect to the margin.
pub fn modified_huber_grad(z: f64) -> f64 {
    if z >= 1.0 {
        0.0
    } else if z >= -1.0 {
        -2.0 * (1.0 - z)
    } else {
        -4.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    /// Overall penalty weight.
    pub strength: f64,
    /// Share of the penalty that is L1.
    pub l1_ratio: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            strength: 1e-4,
            l1_ratio: 0.15,
            epochs: 30,
            learning_rate: 0.01,
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0 && (0.0..=1.0).contains(&self.l1_ratio)) {
            return Err(Error::Config(
                "classifier needs strength >= 0 and l1_ratio in [0, 1]".into(),
            ));
        }
        if self.epochs == 0 || !(self.learning_rate > 0.0) {
            return Err(Error::Config(
                "classifier needs epochs >= 1 and a positive learning rate".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearClassifier {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) > 0.0
    }

    /// Mean loss plus penalty on the given data.
    pub fn objective(&self, features: &[&[f64]], labels: &[bool], config: &ClassifierConfig) -> f64 {
        let loss: f64 = features
            .iter()
            .zip(labels)
            .map(|(x, &y)| modified_huber(sign(y) * self.decision(x)))
            .sum();
        let l1: f64 = self.weights.iter().map(|w| w.abs()).sum();
        let l2: f64 = self.weights.iter().map(|w| w * w).sum();
        loss / features.len() as f64
            + config.strength * (config.l1_ratio * l1 + 0.5 * (1.0 - config.l1_ratio) * l2)
    }
}

fn sign(y: bool) -> f64 {
    if y {
        1.0
    } else {
        -1.0
    }
}

fn soft_threshold(w: f64, t: f64) -> f64 {
    w.signum() * (w.abs() - t).max(0.0)
}

/// Fits a classifier to rows of `features`. Features are standardized
/// internally and the scaling is folded back into the returned weights.
pub fn train_classifier(
    features: &[&[f64]],
    labels: &[bool],
    config: &ClassifierConfig,
) -> Result<LinearClassifier> {
    config.validate()?;
    assert_eq!(features.len(), labels.len());
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass {
            positives,
            negatives,
        });
    }
    let n = features.len();
    let d = features[0].len();
    if let Some(bad) = features.iter().find(|x| x.len() != d) {
        return Err(Error::DimensionMismatch {
            element: "classifier features".into(),
            expected: d,
            found: bad.len(),
        });
    }

    let mut mean = vec![0.0; d];
    for x in features {
        for (m, v) in mean.iter_mut().zip(*x) {
            *m += v / n as f64;
        }
    }
    let mut scale = vec![0.0; d];
    for x in features {
        for k in 0..d {
            scale[k] += (x[k] - mean[k]).powi(2) / n as f64;
        }
    }
    for s in &mut scale {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    let standardized: Vec<f64> = features
        .iter()
        .flat_map(|x| (0..d).map(|k| (x[k] - mean[k]) / scale[k]).collect::<Vec<_>>())
        .collect();

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(config.seed, Stream::Classifier, &[]);
    let l2 = config.strength * (1.0 - config.l1_ratio);
    let l1 = config.strength * config.l1_ratio;
    let mut t = 0usize;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            let eta = config.learning_rate / (1.0 + config.learning_rate * config.strength * t as f64);
            t += 1;
            let x = &standardized[k * d..(k + 1) * d];
            let y = sign(labels[k]);
            let z = y * (w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b);
            let g = modified_huber_grad(z) * y;
            b -= eta * g;
            // Loss step, then the exact proximal map of the penalty.
            for (wk, xk) in w.iter_mut().zip(x) {
                let stepped = (*wk - eta * g * xk) / (1.0 + eta * l2);
                *wk = soft_threshold(stepped, eta * l1);
            }
        }
    }

    let weights: Vec<f64> = w.iter().zip(&scale).map(|(a, s)| a / s).collect();
    let bias = b - weights.iter().zip(&mean).map(|(a, m)| a * m).sum::<f64>();
    if !(bias.is_finite() && weights.iter().all(|v| v.is_finite())) {
        return Err(Error::NonFinite {
            element: "classifier".into(),
            stage: "sgd".into(),
        });
    }
    Ok(LinearClassifier { weights, bias })
}
