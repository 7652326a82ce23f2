//! Per-(layer, function) scores and their aggregates.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::metrics::Summary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub layer: usize,
    pub layer_name: String,
    pub function: String,
    pub auroc: f64,
    pub auprc: f64,
    pub positives: usize,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Short description of how the scores were produced.
    pub method: String,
    pub scores: Vec<PairScore>,
    /// (fold, layer, function) combinations whose training part held a
    /// single class.
    pub skipped_folds: usize,
    /// Functions or pairs dropped entirely: too few annotations, no usable
    /// source, or a single class among the held-out scores.
    pub skipped: usize,
}

/// Aggregates over functions: each function's scores are first averaged
/// over the layers it was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub auroc: Summary,
    pub auprc: Summary,
}

impl EvalReport {
    pub fn new(method: impl Into<String>) -> Self {
        EvalReport {
            method: method.into(),
            scores: Vec::new(),
            skipped_folds: 0,
            skipped: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Mean AUROC over all evaluated pairs; NaN when there are none.
    pub fn mean_auroc(&self) -> f64 {
        self.scores.iter().map(|s| s.auroc).sum::<f64>() / self.scores.len() as f64
    }

    pub fn mean_auprc(&self) -> f64 {
        self.scores.iter().map(|s| s.auprc).sum::<f64>() / self.scores.len() as f64
    }

    /// Summary over every (layer, function) pair.
    pub fn over_pairs(&self) -> Option<Aggregate> {
        let auroc: Vec<f64> = self.scores.iter().map(|s| s.auroc).collect();
        let auprc: Vec<f64> = self.scores.iter().map(|s| s.auprc).collect();
        Some(Aggregate {
            auroc: Summary::of(&auroc)?,
            auprc: Summary::of(&auprc)?,
        })
    }

    pub fn over_functions(&self) -> Option<Aggregate> {
        let mut by_function: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
        for s in &self.scores {
            let entry = by_function.entry(&s.function).or_default();
            entry.0 += s.auroc;
            entry.1 += s.auprc;
            entry.2 += 1;
        }
        let auroc: Vec<f64> = by_function.values().map(|v| v.0 / v.2 as f64).collect();
        let auprc: Vec<f64> = by_function.values().map(|v| v.1 / v.2 as f64).collect();
        Some(Aggregate {
            auroc: Summary::of(&auroc)?,
            auprc: Summary::of(&auprc)?,
        })
    }

    /// Tab-separated `layer function auroc auprc` rows, then one aggregate
    /// line per aggregation with `median (half IQR)` cells. Lines starting
    /// with `#` carry metadata.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# method: {}", self.method)?;
        writeln!(
            out,
            "# evaluated: {}, skipped: {}, skipped folds: {}",
            self.scores.len(),
            self.skipped,
            self.skipped_folds
        )?;
        writeln!(out, "layer\tfunction\tauroc\tauprc")?;
        for s in &self.scores {
            writeln!(out, "{}\t{}\t{:.6}\t{:.6}", s.layer_name, s.function, s.auroc, s.auprc)?;
        }
        for (name, agg) in [("pairs", self.over_pairs()), ("functions", self.over_functions())] {
            if let Some(a) = agg {
                writeln!(
                    out,
                    "aggregate\t{name}\t{:.4} ({:.4})\t{:.4} ({:.4})",
                    a.auroc.median, a.auroc.half_iqr, a.auprc.median, a.auprc.half_iqr
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(layer: usize, function: &str, auroc: f64) -> PairScore {
        PairScore {
            layer,
            layer_name: format!("l{layer}"),
            function: function.into(),
            auroc,
            auprc: auroc / 2.0,
            positives: 20,
            candidates: 100,
        }
    }

    #[test]
    fn two_aggregations_differ() {
        let mut report = EvalReport::new("test");
        report.scores = vec![
            score(0, "a", 0.9),
            score(1, "a", 0.7),
            score(0, "b", 0.6),
        ];
        let pairs = report.over_pairs().unwrap();
        assert!((pairs.auroc.median - 0.7).abs() < 1e-12);
        let functions = report.over_functions().unwrap();
        assert!((functions.auroc.median - 0.7).abs() < 1e-12);
        assert!((functions.auroc.half_iqr - 0.05).abs() < 1e-12);
        assert!((report.mean_auroc() - 2.2 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tsv_layout() {
        let mut report = EvalReport::new("cv");
        report.scores = vec![score(0, "a", 0.75)];
        let mut buf = Vec::new();
        report.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "layer\tfunction\tauroc\tauprc");
        assert_eq!(lines[1], "l0\ta\t0.750000\t0.375000");
        assert!(lines[2].starts_with("aggregate\tpairs\t0.7500 (0.0000)"));
        assert!(lines[3].starts_with("aggregate\tfunctions\t"));
    }

    #[test]
    fn empty_report_has_no_aggregate() {
        let report = EvalReport::new("none");
        assert!(report.over_pairs().is_none());
        let mut buf = Vec::new();
        report.write_tsv(&mut buf).unwrap();
        assert!(!String::from_utf8(buf).unwrap().contains("aggregate"));
    }
}
