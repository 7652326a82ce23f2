use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::MultiLayerNetwork;
use crate::io::{content_lines, read_text, write_text};
use crate::labels::LabelSet;

/// Reads `node layer function_id` lines. The node must belong to the named
/// layer.
pub fn read_labels(path: &Path, network: &MultiLayerNetwork) -> Result<LabelSet> {
    let text = read_text(path)?;
    let mut labels = LabelSet::new();
    for (line, content) in content_lines(&text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [node, layer, function] = fields[..] else {
            return Err(Error::parse(path, line, "expected `node layer function_id`"));
        };
        let layer = network
            .layer_by_name(layer)
            .ok_or_else(|| Error::parse(path, line, format!("unknown layer `{layer}`")))?;
        let id = network
            .registry()
            .get(node)
            .filter(|&u| layer.contains(u))
            .ok_or_else(|| {
                Error::parse(
                    path,
                    line,
                    format!("node `{node}` is not in layer `{}`", layer.name()),
                )
            })?;
        labels.insert(id, layer.id(), function);
    }
    Ok(labels)
}

pub fn write_labels(labels: &LabelSet, network: &MultiLayerNetwork, path: &Path) -> Result<()> {
    let mut out = String::new();
    for ((layer, function), nodes) in labels.pairs() {
        for &u in nodes {
            writeln!(
                out,
                "{} {} {}",
                network.registry().name(u),
                network.layer(layer).name(),
                labels.function_name(function)
            )
            .unwrap();
        }
    }
    write_text(path, &out)
}
