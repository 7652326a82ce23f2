//! Text formats for every on-disk artifact.
//!
//! | artifact    | line format                 |
//! |-------------|-----------------------------|
//! | edge list   | `u v [weight]`              |
//! | manifest    | `layer_name edgelist_path`  |
//! | hierarchy   | `child parent`              |
//! | labels      | `node layer function_id`    |
//! | embeddings  | header `N d`, rows `name v1 .. vd` |
//! | walks       | one walk per line, node names |
//!
//! Blank lines and lines starting with `#` are ignored everywhere except in
//! embedding and walk files. Readers reject malformed input with the
//! offending line number instead of repairing it.

mod edgelist;
mod embeddings;
mod hierarchy;
mod labels;
mod walks;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use edgelist::{
    parse_edgelist, read_edgelist, read_network, write_edgelist, write_network, LayerManifest,
};
pub use embeddings::{
    read_embeddings, read_table, write_checkpoint, write_embeddings, write_table,
};
pub use hierarchy::{parse_hierarchy, read_hierarchy, write_hierarchy};
pub use labels::{read_labels, write_labels};
pub use walks::{read_walks, write_walks};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Non-comment, non-blank lines with 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, line)| (k + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// `dir/name.ext`, refusing names that would escape `dir`.
pub(crate) fn named_file(dir: &Path, name: &str, ext: &str) -> Result<PathBuf> {
    if name.is_empty()
        || name == "."
        || name == ".."
        || name.contains(['/', '\\'])
        || name.chars().any(char::is_whitespace)
    {
        return Err(Error::Config(format!(
            "`{name}` cannot be used as a file name"
        )));
    }
    Ok(dir.join(format!("{name}.{ext}")))
}
