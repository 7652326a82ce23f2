//! Linear 2-D projection of an embedding table.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::train::EmbeddingTable;

/// Coordinates on the two leading principal components of the centered
/// table, one `(node, x, y)` row per node in table order. Each component's
/// sign is fixed so that its largest-magnitude loading is positive.
pub fn project_2d(table: &EmbeddingTable) -> Result<Vec<(NodeId, f64, f64)>> {
    let d = table.dim();
    if d < 2 {
        return Err(Error::Config(format!("cannot project {d}-dimensional vectors to 2-D")));
    }
    if table.is_empty() {
        return Err(Error::Config("cannot project an empty table".into()));
    }
    let n = table.len();
    let mut x = DMatrix::from_row_slice(n, d, table.data());
    let mean = x.row_mean();
    for mut row in x.row_iter_mut() {
        row -= &mean;
    }
    let covariance = x.transpose() * &x / n as f64;
    let eigen = SymmetricEigen::new(covariance);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let mut axes = DMatrix::zeros(d, 2);
    for (c, &k) in order.iter().take(2).enumerate() {
        let mut v = eigen.eigenvectors.column(k).clone_owned();
        let lead = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
        if lead < 0.0 {
            v = -v;
        }
        axes.set_column(c, &v);
    }
    let projected = x * axes;
    Ok(table
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, &u)| (u, projected[(k, 0)], projected[(k, 1)]))
        .collect())
}
