use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::{Layer, MultiLayerNetwork, NodeRegistry};
use crate::io::{content_lines, read_text, write_text};

/// Parses `u v [w]` lines; `w` defaults to 1.
pub fn parse_edgelist(text: &str, path: &Path) -> Result<Vec<(String, String, f64)>> {
    content_lines(text)
        .map(|(line, content)| {
            let fields: Vec<&str> = content.split_whitespace().collect();
            let (u, v, w) = match fields[..] {
                [u, v] => (u, v, 1.0),
                [u, v, w] => {
                    let w: f64 = w.parse().map_err(|_| {
                        Error::parse(path, line, format!("weight `{w}` is not a number"))
                    })?;
                    (u, v, w)
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("expected `u v [weight]`, found {} fields", fields.len()),
                    ))
                }
            };
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::parse(path, line, format!("weight {w} must be positive")));
            }
            if u == v {
                return Err(Error::parse(path, line, format!("self-loop on `{u}`")));
            }
            Ok((u.to_owned(), v.to_owned(), w))
        })
        .collect()
}

/// Reads one layer, registering its node names in `registry`.
pub fn read_edgelist(
    path: &Path,
    layer_id: usize,
    name: &str,
    registry: &mut NodeRegistry,
) -> Result<Layer> {
    let edges = parse_edgelist(&read_text(path)?, path)?;
    let edges: Vec<_> = edges
        .iter()
        .map(|(u, v, w)| (registry.intern(u), registry.intern(v), *w))
        .collect();
    Layer::from_edges(layer_id, name, [], edges)
}

pub fn write_edgelist(layer: &Layer, registry: &NodeRegistry, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (u, v, w) in layer.edges() {
        writeln!(out, "{} {} {}", registry.name(u), registry.name(v), w).unwrap();
    }
    write_text(path, &out)
}

/// Ordered `(layer name, edge list path)` entries. Relative paths are
/// resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerManifest {
    pub entries: Vec<(String, PathBuf)>,
}

impl LayerManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut seen = HashSet::new();
        let entries = content_lines(&text)
            .map(|(line, content)| {
                let fields: Vec<&str> = content.split_whitespace().collect();
                let [name, file] = fields[..] else {
                    return Err(Error::parse(path, line, "expected `layer_name edgelist_path`"));
                };
                if !seen.insert(name.to_owned()) {
                    return Err(Error::parse(path, line, format!("duplicate layer `{name}`")));
                }
                Ok((name.to_owned(), base.join(file)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LayerManifest { entries })
    }

    /// Writes entries with paths relative to the manifest when possible.
    pub fn write(&self, path: &Path) -> Result<()> {
        let base = path.parent().unwrap_or(Path::new(""));
        let mut out = String::new();
        for (name, file) in &self.entries {
            let shown = file.strip_prefix(base).unwrap_or(file);
            writeln!(out, "{name} {}", shown.display()).unwrap();
        }
        write_text(path, &out)
    }

    pub fn layer_names(&self) -> Vec<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// Loads every layer named in a manifest into one network.
pub fn read_network(manifest_path: &Path) -> Result<MultiLayerNetwork> {
    let manifest = LayerManifest::read(manifest_path)?;
    let mut registry = NodeRegistry::new();
    let layers = manifest
        .entries
        .iter()
        .enumerate()
        .map(|(k, (name, file))| read_edgelist(file, k, name, &mut registry))
        .collect::<Result<Vec<_>>>()?;
    MultiLayerNetwork::new(registry, layers)
}

/// Writes `manifest_path` plus one `<layer>.edgelist` per layer in
/// `edges_dir`.
pub fn write_network(
    network: &MultiLayerNetwork,
    manifest_path: &Path,
    edges_dir: &Path,
) -> Result<LayerManifest> {
    let mut entries = Vec::new();
    for layer in network.layers() {
        let file = crate::io::named_file(edges_dir, layer.name(), "edgelist")?;
        write_edgelist(layer, network.registry(), &file)?;
        entries.push((layer.name().to_owned(), file));
    }
    let manifest = LayerManifest { entries };
    manifest.write(manifest_path)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<(String, String, f64)>> {
        parse_edgelist(text, Path::new("test.edgelist"))
    }

    #[test]
    fn default_weight_and_comments() {
        let edges = parse("# header\na b\n\nb c 2.0\n").unwrap();
        assert_eq!(
            edges,
            [("a".into(), "b".into(), 1.0), ("b".into(), "c".into(), 2.0)]
        );
        let mut reg = NodeRegistry::new();
        let layer = Layer::from_edges(
            0,
            "x",
            [],
            edges.iter().map(|(u, v, w)| (reg.intern(u), reg.intern(v), *w)),
        )
        .unwrap();
        assert_eq!(layer.len(), 3);
        assert_eq!(layer.num_edges(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("a a").unwrap_err().to_string();
        assert!(err.contains(":1:") && err.contains("self-loop"), "{err}");
        let err = parse("a b\nb c -1").unwrap_err().to_string();
        assert!(err.contains(":2:") && err.contains("positive"), "{err}");
        let err = parse("a b\n\nx").unwrap_err().to_string();
        assert!(err.contains(":3:"), "{err}");
        assert!(parse("a b zero").is_err());
        assert!(parse("a b 1 2").is_err());
    }

    #[test]
    fn duplicate_edges_merge() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.edgelist");
        std::fs::write(&path, "a b 1\na b 1\n").unwrap();
        let mut reg = NodeRegistry::new();
        let layer = read_edgelist(&path, 0, "l", &mut reg).unwrap();
        let (a, b) = (reg.get("a").unwrap(), reg.get("b").unwrap());
        assert_eq!(layer.num_edges(), 1);
        assert_eq!(layer.edge_weight(a, b), Some(2.0));
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("x.edgelist"), "a b\n").unwrap();
        std::fs::write(dir.path().join("y.edgelist"), "b c 3\n").unwrap();
        std::fs::write(dir.path().join("layers.txt"), "x x.edgelist\ny y.edgelist\n").unwrap();
        let net = read_network(&dir.path().join("layers.txt")).unwrap();
        assert_eq!(net.layer_names(), ["x", "y"]);
        assert_eq!(net.num_nodes(), 3);

        let out = tempfile::tempdir().unwrap();
        write_network(&net, &out.path().join("layers.txt"), &out.path().join("edges")).unwrap();
        let again = read_network(&out.path().join("layers.txt")).unwrap();
        assert_eq!(again, net);
    }

    #[test]
    fn duplicate_manifest_layer_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("layers.txt");
        std::fs::write(&path, "x a\nx b\n").unwrap();
        let err = LayerManifest::read(&path).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }
}
