use rand::Rng;

/// Walker/Vose alias table: O(n) construction, O(1) sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Table over `weights`; returns `None` when the slice is empty or any
    /// weight is negative, non-finite, or all are zero.
    pub fn new(weights: &[f64]) -> Option<Self> {
        let n = weights.len();
        if n == 0 || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return None;
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return None;
        }

        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&k| scaled[k] < 1.0);

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for k in small.into_iter().chain(large) {
            prob[k] = 1.0;
        }
        Some(AliasTable { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let k = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[k] {
            k
        } else {
            self.alias[k] as usize
        }
    }

    /// The categorical distribution the table encodes.
    pub fn distribution(&self) -> Vec<f64> {
        let n = self.prob.len() as f64;
        let mut out = vec![0.0; self.prob.len()];
        for (k, (&p, &a)) in self.prob.iter().zip(&self.alias).enumerate() {
            out[k] += p / n;
            out[a as usize] += (1.0 - p) / n;
        }
        out
    }

    pub(crate) fn heap_size(&self) -> usize {
        self.prob.len() * (std::mem::size_of::<f64>() + std::mem::size_of::<u32>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_degenerate_weights() {
        assert!(AliasTable::new(&[]).is_none());
        assert!(AliasTable::new(&[0.0, 0.0]).is_none());
        assert!(AliasTable::new(&[1.0, -1.0]).is_none());
        assert!(AliasTable::new(&[1.0, f64::NAN]).is_none());
    }

    #[test]
    fn single_outcome() {
        let t = AliasTable::new(&[3.0]).unwrap();
        let mut rng = crate::rng::stream_rng(0, crate::rng::Stream::Walk, &[]);
        assert!((0..100).all(|_| t.sample(&mut rng) == 0));
    }

    proptest! {
        #[test]
        fn encoded_distribution_matches_weights(weights in proptest::collection::vec(0.0f64..10.0, 1..40)) {
            prop_assume!(weights.iter().sum::<f64>() > 1e-6);
            let t = AliasTable::new(&weights).unwrap();
            let total: f64 = weights.iter().sum();
            for (p, w) in t.distribution().iter().zip(&weights) {
                prop_assert!((p - w / total).abs() < 1e-9);
            }
        }
    }
}
