use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::MultiLayerNetwork;
use crate::io::{named_file, read_text, write_text};
use crate::walks::WalkCorpus;

/// One `<layer>.walks` file per layer; one walk per line.
pub fn write_walks(corpus: &WalkCorpus, network: &MultiLayerNetwork, dir: &Path) -> Result<()> {
    let registry = network.registry();
    for layer in network.layers() {
        let mut out = String::new();
        for walk in corpus.walks(layer.id()) {
            let names: Vec<&str> = walk.iter().map(|&u| registry.name(u)).collect();
            writeln!(out, "{}", names.join(" ")).unwrap();
        }
        write_text(&named_file(dir, layer.name(), "walks")?, &out)?;
    }
    Ok(())
}

/// Reads walks written by [`write_walks`]. Every walk must stay inside its
/// layer's node set.
pub fn read_walks(dir: &Path, network: &MultiLayerNetwork) -> Result<WalkCorpus> {
    let registry = network.registry();
    let layers = network
        .layers()
        .iter()
        .map(|layer| {
            let path = named_file(dir, layer.name(), "walks")?;
            let text = read_text(&path)?;
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(k, line)| {
                    line.split_whitespace()
                        .map(|name| {
                            registry
                                .get(name)
                                .filter(|&u| layer.contains(u))
                                .ok_or_else(|| {
                                    Error::parse(
                                        &path,
                                        k + 1,
                                        format!("`{name}` is not in layer `{}`", layer.name()),
                                    )
                                })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WalkCorpus { layers })
}
