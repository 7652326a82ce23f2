use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{MultiLayerNetwork, NodeId, NodeRegistry};
use crate::io::{content_lines, named_file, read_text, write_text};
use crate::train::{ElementEmbedding, EmbeddingSet, EmbeddingTable};

const INDEX_FILE: &str = "elements.txt";

/// Header `N d`, then one `name v1 .. vd` row per node. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_table(table: &EmbeddingTable, registry: &NodeRegistry, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(table.len() * (table.dim() * 22 + 16) + 16);
    writeln!(out, "{} {}", table.len(), table.dim()).unwrap();
    for (k, &u) in table.nodes().iter().enumerate() {
        out.push_str(registry.name(u));
        for x in table.row(k) {
            write!(out, " {x}").unwrap();
        }
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn read_table(path: &Path, registry: &NodeRegistry) -> Result<EmbeddingTable> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (count, dim) = match lines.next() {
        Some((line, header)) => {
            let fields: Vec<&str> = header.split_whitespace().collect();
            match fields[..] {
                [n, d] => match (n.parse::<usize>(), d.parse::<usize>()) {
                    (Ok(n), Ok(d)) => (n, d),
                    _ => return Err(Error::parse(path, line, "header must be `N d`")),
                },
                _ => return Err(Error::parse(path, line, "header must be `N d`")),
            }
        }
        None => return Err(Error::parse(path, 1, "missing `N d` header")),
    };

    let mut rows: Vec<(NodeId, Vec<f64>)> = Vec::with_capacity(count);
    for (line, content) in lines {
        if content.trim().is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let name = fields.next().unwrap();
        let u = registry
            .get(name)
            .ok_or_else(|| Error::parse(path, line, format!("unknown node `{name}`")))?;
        let vector = fields
            .map(|x| {
                x.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, line, format!("bad value `{x}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vector.len() != dim {
            return Err(Error::parse(
                path,
                line,
                format!("expected {dim} values, found {}", vector.len()),
            ));
        }
        rows.push((u, vector));
    }
    if rows.len() != count {
        return Err(Error::parse(
            path,
            1,
            format!("header announces {count} rows, file has {}", rows.len()),
        ));
    }
    rows.sort_by_key(|(u, _)| *u);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::parse(
            path,
            1,
            format!("node `{}` appears twice", registry.name(w[0].0)),
        ));
    }
    let (nodes, vectors): (Vec<NodeId>, Vec<Vec<f64>>) = rows.into_iter().unzip();
    Ok(EmbeddingTable::from_data(dim, nodes, vectors.concat()))
}

fn write_set(
    set: &EmbeddingSet,
    network: &MultiLayerNetwork,
    dir: &Path,
    contexts: bool,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let registry = network.registry();
    let mut index = String::new();
    for e in set.elements() {
        write_table(&e.input, registry, &named_file(dir, &e.name, "emb")?)?;
        if let (true, Some(ctx)) = (contexts, &e.context) {
            write_table(ctx, registry, &named_file(dir, &e.name, "ctx")?)?;
        }
        match e.layer {
            Some(l) => writeln!(index, "{} {}", e.name, network.layer(l).name()).unwrap(),
            None => writeln!(index, "{}", e.name).unwrap(),
        }
    }
    write_text(&dir.join(INDEX_FILE), &index)
}

/// One `<element>.emb` file per element plus an `elements.txt` index
/// recording element order and layer bindings.
pub fn write_embeddings(set: &EmbeddingSet, network: &MultiLayerNetwork, dir: &Path) -> Result<()> {
    write_set(set, network, dir, false)
}

/// Like [`write_embeddings`], also saving context tables (`<element>.ctx`)
/// so training state can be restored.
pub fn write_checkpoint(set: &EmbeddingSet, network: &MultiLayerNetwork, dir: &Path) -> Result<()> {
    write_set(set, network, dir, true)
}

/// Reads a directory written by [`write_embeddings`] or
/// [`write_checkpoint`]. Without an index, every `*.emb` file is loaded in
/// name order and bound to the layer of the same name, if any.
pub fn read_embeddings(dir: &Path, network: &MultiLayerNetwork) -> Result<EmbeddingSet> {
    let index_path = dir.join(INDEX_FILE);
    let entries: Vec<(String, Option<usize>)> = if index_path.exists() {
        let text = read_text(&index_path)?;
        content_lines(&text)
            .map(|(line, content)| {
                let fields: Vec<&str> = content.split_whitespace().collect();
                match fields[..] {
                    [name] => Ok((name.to_owned(), None)),
                    [name, layer] => network
                        .layer_by_name(layer)
                        .map(|l| (name.to_owned(), Some(l.id())))
                        .ok_or_else(|| {
                            Error::parse(&index_path, line, format!("unknown layer `{layer}`"))
                        }),
                    _ => Err(Error::parse(&index_path, line, "expected `element [layer]`")),
                }
            })
            .collect::<Result<_>>()?
    } else {
        let mut names: Vec<String> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| {
                let path = entry.ok()?.path();
                (path.extension()? == "emb").then(|| path.file_stem()?.to_str().map(str::to_owned))?
            })
            .collect();
        names.sort();
        names
            .into_iter()
            .map(|n| {
                let layer = network.layer_by_name(&n).map(|l| l.id());
                (n, layer)
            })
            .collect()
    };
    if entries.is_empty() {
        return Err(Error::Config(format!(
            "no embedding tables in {}",
            dir.display()
        )));
    }

    let registry = network.registry();
    let mut dim = None;
    let mut elements = Vec::with_capacity(entries.len());
    for (name, layer) in entries {
        let input = read_table(&named_file(dir, &name, "emb")?, registry)?;
        let expected = *dim.get_or_insert(input.dim());
        if input.dim() != expected {
            return Err(Error::DimensionMismatch {
                element: name,
                expected,
                found: input.dim(),
            });
        }
        let ctx_path = named_file(dir, &name, "ctx")?;
        let context = if ctx_path.exists() {
            let ctx = read_table(&ctx_path, registry)?;
            if ctx.dim() != expected || ctx.nodes() != input.nodes() {
                return Err(Error::DimensionMismatch {
                    element: format!("{name} (context)"),
                    expected,
                    found: ctx.dim(),
                });
            }
            Some(ctx)
        } else {
            None
        };
        elements.push(ElementEmbedding {
            name,
            layer,
            input,
            context,
        });
    }
    Ok(EmbeddingSet::new(dim.unwrap(), elements))
}
