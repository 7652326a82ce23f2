use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Hierarchy;
use crate::io::{content_lines, read_text, write_text};

pub fn parse_hierarchy(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut seen = std::collections::HashSet::new();
    content_lines(text)
        .map(|(line, content)| {
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [child, parent] = fields[..] else {
                return Err(Error::parse(path, line, "expected `child parent`"));
            };
            if !seen.insert(child.to_owned()) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("duplicate child line for `{child}`"),
                ));
            }
            Ok((child.to_owned(), parent.to_owned()))
        })
        .collect()
}

/// Reads `child parent` lines; elements named like a layer become that
/// layer's leaf.
pub fn read_hierarchy(path: &Path, layer_names: &[String]) -> Result<Hierarchy> {
    let links = parse_hierarchy(&read_text(path)?, path)?;
    Hierarchy::from_parent_links(&links, layer_names).map_err(|e| match e {
        Error::Hierarchy(message) => Error::Hierarchy(format!("{}: {message}", path.display())),
        other => other,
    })
}

pub fn write_hierarchy(hierarchy: &Hierarchy, path: &Path) -> Result<()> {
    let mut out = String::new();
    for e in hierarchy.elements() {
        if let Some(p) = e.parent {
            writeln!(out, "{} {}", e.name, hierarchy.name(p)).unwrap();
        }
    }
    write_text(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, layers: &[&str]) -> Result<Hierarchy> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.txt");
        std::fs::write(&path, text).unwrap();
        let names: Vec<String> = layers.iter().map(|s| s.to_string()).collect();
        read_hierarchy(&path, &names)
    }

    #[test]
    fn brain_hierarchy() {
        let h = read(
            "brainstem brain\nmedulla brainstem\npons brainstem\n",
            &["medulla", "pons"],
        )
        .unwrap();
        assert_eq!(h.name(h.root()), "brain");
        assert_eq!(h.leaves().len(), 2);
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn chain_and_cycle() {
        assert_eq!(read("a root", &["a"]).unwrap().len(), 2);
        let err = read("a b\nb a", &["a"]).unwrap_err().to_string();
        assert!(err.contains("cycle"), "{err}");
    }

    #[test]
    fn duplicate_child_line_has_line_number() {
        let err = read("a r\nb r\na r\n", &["a", "b"]).unwrap_err().to_string();
        assert!(err.contains(":3:") && err.contains("duplicate"), "{err}");
    }

    #[test]
    fn round_trip() {
        let h = read("x r\ny r\na x\nb x\nc y\n", &["a", "b", "c"]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_hierarchy(&h, &path).unwrap();
        let names = vec!["a".to_string(), "b".into(), "c".into()];
        let again = read_hierarchy(&path, &names).unwrap();
        for a in ["x", "y", "a", "b", "c", "r"] {
            for b in ["x", "y", "a", "b", "c", "r"] {
                assert_eq!(
                    h.tree_distance_by_name(a, b).unwrap(),
                    again.tree_distance_by_name(a, b).unwrap()
                );
            }
        }
    }
}
