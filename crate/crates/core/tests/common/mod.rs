//! Fixtures and independent reference computations shared by the
//! integration tests and the acceptance suite.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ohmnet_core::graph::Element;
use ohmnet_core::synth::{generate, SynthConfig, SyntheticBenchmark};
use ohmnet_core::train::sgns::PairTerms;
use ohmnet_core::train::EmbeddingSet;
use ohmnet_core::{Hierarchy, Layer, MultiLayerNetwork, NodeId, NodeRegistry};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_benchmark(seed: u64) -> SyntheticBenchmark {
    generate(&SynthConfig {
        nodes_per_layer: 60,
        p_in: 0.2,
        p_out: 0.02,
        seed,
        ..SynthConfig::default()
    })
    .unwrap()
}

pub fn bits(values: &[f64]) -> Vec<u64> {
    values.iter().map(|v| v.to_bits()).collect()
}

/// Owned copies of everything one training pair reads.
#[derive(Debug, Clone)]
pub struct PairCase {
    pub input: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
    pub parent: Option<Vec<f64>>,
    pub lambda: f64,
}

impl PairCase {
    pub fn random(rng: &mut impl Rng, dim: usize) -> Self {
        let vector = |rng: &mut dyn rand::RngCore| -> Vec<f64> {
            (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let k = rng.gen_range(1..=6);
        PairCase {
            input: vector(rng),
            positive: vector(rng),
            negatives: (0..k).map(|_| vector(rng)).collect(),
            parent: rng.gen_bool(0.75).then(|| vector(rng)),
            lambda: rng.gen_range(0.0..3.0),
        }
    }

    pub fn with_terms<T>(&self, f: impl FnOnce(&PairTerms) -> T) -> T {
        let negatives: Vec<&[f64]> = self.negatives.iter().map(Vec::as_slice).collect();
        f(&PairTerms {
            input: &self.input,
            positive: &self.positive,
            negatives: &negatives,
            parent: self.parent.as_deref(),
            lambda: self.lambda,
        })
    }

    /// Every vector the gradient is taken with respect to, in the order
    /// input, positive, negatives.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.input.clone();
        out.extend(&self.positive);
        for n in &self.negatives {
            out.extend(n);
        }
        out
    }

    pub fn unflatten(&self, flat: &[f64]) -> PairCase {
        let d = self.input.len();
        PairCase {
            input: flat[..d].to_vec(),
            positive: flat[d..2 * d].to_vec(),
            negatives: flat[2 * d..].chunks(d).map(<[f64]>::to_vec).collect(),
            parent: self.parent.clone(),
            lambda: self.lambda,
        }
    }
}

/// Central finite differences of `f` at `x`.
pub fn numeric_gradient(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + h;
            let up = f(&probe);
            probe[k] = x[k] - h;
            let down = f(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}

pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / norm(a).max(norm(b)).max(1e-12)
}

/// Random tree of `elements` elements (parent of k drawn from 0..k) whose
/// leaves carry layers over random subsets of `nodes` nodes.
pub fn random_instance(
    rng: &mut impl Rng,
    elements: usize,
    nodes: usize,
) -> (MultiLayerNetwork, Hierarchy) {
    let parents: Vec<Option<usize>> = (0..elements)
        .map(|k| (k > 0).then(|| rng.gen_range(0..k)))
        .collect();
    let mut children = vec![Vec::new(); elements];
    for (k, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(k);
        }
    }
    let mut registry = NodeRegistry::new();
    let ids: Vec<NodeId> = (0..nodes).map(|k| registry.intern(&format!("v{k}"))).collect();
    let mut layers = Vec::new();
    let mut tree = Vec::new();
    for k in 0..elements {
        let layer = children[k].is_empty().then(|| {
            let id = layers.len();
            let members: Vec<NodeId> = ids.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            let members = if members.is_empty() { vec![ids[0]] } else { members };
            let edges: Vec<_> = members.windows(2).map(|w| (w[0], w[1], 1.0)).collect();
            layers.push(Layer::from_edges(id, format!("layer{id}"), members, edges).unwrap());
            id
        });
        tree.push(Element {
            name: format!("e{k}"),
            parent: parents[k],
            children: children[k].clone(),
            layer,
        });
    }
    (
        MultiLayerNetwork::new(registry, layers).unwrap(),
        Hierarchy::from_elements(tree),
    )
}

/// Minimizer of Σ_i Σ_u ½‖f_i(u) − f_parent(i)(u)‖² over the internal
/// vectors with leaf vectors held fixed, from the normal equations of each
/// node's quadratic. Returns, per element, the optimal internal table data
/// in the element's row order (empty for leaves).
pub fn quadratic_minimizer(set: &EmbeddingSet, hierarchy: &Hierarchy) -> Vec<Vec<f64>> {
    let d = set.dim();
    let mut out: Vec<Vec<f64>> = (0..hierarchy.len())
        .map(|i| if hierarchy.is_leaf(i) { Vec::new() } else { vec![f64::NAN; set.table(i).len() * d] })
        .collect();
    let mut universe: Vec<NodeId> = set.elements().iter().flat_map(|e| e.input.nodes().to_vec()).collect();
    universe.sort();
    universe.dedup();
    for u in universe {
        let unknown: Vec<usize> = hierarchy
            .internal()
            .into_iter()
            .filter(|&i| set.table(i).contains(u))
            .collect();
        if unknown.is_empty() {
            continue;
        }
        let slot = |i: usize| unknown.iter().position(|&j| j == i);
        let m = unknown.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DMatrix::<f64>::zeros(m, d);
        for c in 0..hierarchy.len() {
            let Some(p) = hierarchy.parent(c) else { continue };
            if !set.table(c).contains(u) {
                continue;
            }
            let pp = slot(p).expect("parent scope contains child scope");
            a[(pp, pp)] += 1.0;
            match slot(c) {
                Some(cc) => {
                    a[(cc, cc)] += 1.0;
                    a[(cc, pp)] -= 1.0;
                    a[(pp, cc)] -= 1.0;
                }
                None => {
                    let y = set.table(c).vector(u).unwrap();
                    for k in 0..d {
                        b[(pp, k)] += y[k];
                    }
                }
            }
        }
        let x = a.lu().solve(&b).expect("system is positive definite");
        for (s, &i) in unknown.iter().enumerate() {
            let row = set.table(i).row_of(u).unwrap();
            out[i][row * d..(row + 1) * d].copy_from_slice(&x.row(s).transpose().as_slice().to_vec());
        }
    }
    out
}

/// Pearson chi-square statistic of observed counts against probabilities.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Least-squares line through the points; returns (slope, intercept, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let design = DMatrix::from_fn(x.len(), 2, |r, c| if c == 0 { x[r] } else { 1.0 });
    let target = DVector::from_column_slice(y);
    let coef = design.clone().svd(true, true).solve(&target, 1e-14).unwrap();
    let fitted = &design * &coef;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = (&target - &fitted).iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    (coef[0], coef[1], 1.0 - ss_res / ss_tot)
}

/// Mean distance between the vectors of a node in two different layers,
/// over all layer pairs and the nodes they share.
pub fn mean_interlayer_distance(set: &EmbeddingSet, layers: usize) -> f64 {
    let (mut total, mut count) = (0.0, 0usize);
    for a in 0..layers {
        for b in a + 1..layers {
            let (ta, tb) = (set.layer_table(a).unwrap(), set.layer_table(b).unwrap());
            for &u in ta.nodes() {
                if let Some(vb) = tb.vector(u) {
                    let va = ta.vector(u).unwrap();
                    total += va.iter().zip(vb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                    count += 1;
                }
            }
        }
    }
    total / count as f64
}
