//! Skip-gram with negative sampling: the per-pair surrogate, its gradient,
//! and the exact softmax it stands in for.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// d/ds of log σ(s) for a positive target, log σ(-s) for a negative one.
#[inline]
pub fn target_coefficient(score: f64, positive: bool) -> f64 {
    f64::from(u8::from(positive)) - sigmoid(score)
}

/// Everything one (input node, context node) training pair touches.
#[derive(Debug, Clone, Copy)]
pub struct PairTerms<'a> {
    pub input: &'a [f64],
    pub positive: &'a [f64],
    pub negatives: &'a [&'a [f64]],
    /// The input node's vector at the parent element, if any.
    pub parent: Option<&'a [f64]>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub input: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// log σ(f'(v)·f(u)) + Σ_k log σ(−f'(n_k)·f(u)).
pub fn surrogate(input: &[f64], positive: &[f64], negatives: &[&[f64]]) -> f64 {
    log_sigmoid(dot(positive, input))
        + negatives
            .iter()
            .map(|n| log_sigmoid(-dot(n, input)))
            .sum::<f64>()
}

/// ½‖f_i(u) − f_parent(u)‖².
pub fn coupling_penalty(input: &[f64], parent: &[f64]) -> f64 {
    0.5 * input
        .iter()
        .zip(parent)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
}

/// Surrogate minus λ times the coupling penalty: the quantity SGD ascends
/// for one pair.
pub fn pair_objective(t: &PairTerms) -> f64 {
    let penalty = t.parent.map_or(0.0, |p| coupling_penalty(t.input, p));
    surrogate(t.input, t.positive, t.negatives) - t.lambda * penalty
}

/// Analytic gradient of [`pair_objective`] with respect to every vector it
/// reads (the parent vector is held fixed).
pub fn pair_gradient(t: &PairTerms) -> PairGradient {
    let dim = t.input.len();
    let mut input = vec![0.0; dim];
    let mut accumulate = |ctx: &[f64], positive: bool| -> Vec<f64> {
        let g = target_coefficient(dot(ctx, t.input), positive);
        for (acc, c) in input.iter_mut().zip(ctx) {
            *acc += g * c;
        }
        t.input.iter().map(|h| g * h).collect()
    };
    let positive = accumulate(t.positive, true);
    let negatives = t.negatives.iter().map(|n| accumulate(n, false)).collect();
    if let Some(parent) = t.parent {
        for ((acc, h), p) in input.iter_mut().zip(t.input).zip(parent) {
            *acc -= t.lambda * (h - p);
        }
    }
    PairGradient {
        input,
        positive,
        negatives,
    }
}

/// Exact softmax Pr(v | f(u)) over every context vector of a layer.
pub fn full_softmax(input: &[f64], contexts: &[&[f64]]) -> Vec<f64> {
    let scores: Vec<f64> = contexts.iter().map(|c| dot(c, input)).collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surrogate_at_zero() {
        let zero = [0.0; 4];
        let negs: Vec<&[f64]> = vec![&zero; 5];
        let expected = 6.0 * 0.5f64.ln();
        assert!((surrogate(&zero, &zero, &negs) - expected).abs() < 1e-15);
    }

    #[test]
    fn softmax_is_uniform_at_zero() {
        let zero = [0.0; 2];
        let ctx: Vec<&[f64]> = vec![&zero; 4];
        for p in full_softmax(&zero, &ctx) {
            assert_eq!(p, 0.25);
        }
    }

    #[test]
    fn log_sigmoid_is_stable_in_the_tails() {
        assert!((log_sigmoid(-800.0) + 800.0).abs() < 1e-12);
        assert_eq!(log_sigmoid(800.0), 0.0);
        assert!((sigmoid(0.3) + sigmoid(-0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn penalty_arithmetic() {
        assert_eq!(coupling_penalty(&[1.0, 2.0], &[0.0, 0.0]), 2.5);
        assert_eq!(coupling_penalty(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
    }
}
