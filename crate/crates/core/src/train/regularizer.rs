use rayon::prelude::*;

use crate::graph::{Hierarchy, NodeId};
use crate::train::sgns::coupling_penalty;
use crate::train::EmbeddingSet;
use crate::ExecMode;

/// Row-level wiring between an [`EmbeddingSet`] and its hierarchy: where each
/// node's row sits in the parent table, and which child rows feed each
/// internal row. Built once per training run.
#[derive(Debug, Clone)]
pub struct HierarchyIndex {
    parent: Vec<Option<usize>>,
    parent_row: Vec<Vec<u32>>,
    child_offsets: Vec<Vec<usize>>,
    child_rows: Vec<Vec<(u32, u32)>>,
    post_order: Vec<usize>,
}

impl HierarchyIndex {
    /// `set` must have been built over `hierarchy` (one element per
    /// hierarchy element, same order).
    pub fn new(hierarchy: &Hierarchy, set: &EmbeddingSet) -> Self {
        assert_eq!(hierarchy.len(), set.len(), "set does not match hierarchy");
        let n = hierarchy.len();
        let parent: Vec<Option<usize>> = (0..n).map(|i| hierarchy.parent(i)).collect();
        let parent_row: Vec<Vec<u32>> = (0..n)
            .map(|i| match parent[i] {
                None => Vec::new(),
                Some(p) => {
                    let parent_table = set.table(p);
                    set.table(i)
                        .nodes()
                        .iter()
                        .map(|&u| {
                            parent_table
                                .row_of(u)
                                .expect("child scope is contained in parent scope")
                                as u32
                        })
                        .collect()
                }
            })
            .collect();

        let mut child_offsets = vec![Vec::new(); n];
        let mut child_rows = vec![Vec::new(); n];
        for i in 0..n {
            let children = hierarchy.children_of(i);
            if children.is_empty() {
                continue;
            }
            let rows = set.table(i).len();
            let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); rows];
            for &c in children {
                for (child_row, &row) in parent_row[c].iter().enumerate() {
                    buckets[row as usize].push((c as u32, child_row as u32));
                }
            }
            let mut offsets = Vec::with_capacity(rows + 1);
            offsets.push(0);
            let mut flat = Vec::new();
            for bucket in buckets {
                flat.extend(bucket);
                offsets.push(flat.len());
            }
            child_offsets[i] = offsets;
            child_rows[i] = flat;
        }

        HierarchyIndex {
            parent,
            parent_row,
            child_offsets,
            child_rows,
            post_order: hierarchy.post_order(),
        }
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Row in the parent's table of row `k` of element `i`.
    #[inline]
    pub fn parent_row(&self, i: usize, k: usize) -> usize {
        self.parent_row[i][k] as usize
    }

    pub fn is_internal(&self, i: usize) -> bool {
        !self.child_offsets[i].is_empty()
    }

    pub fn post_order(&self) -> &[usize] {
        &self.post_order
    }

    fn children_of_row(&self, i: usize, k: usize) -> &[(u32, u32)] {
        let offsets = &self.child_offsets[i];
        &self.child_rows[i][offsets[k]..offsets[k + 1]]
    }
}

/// c_i(u): half the squared distance between u's vectors at `i` and at its
/// parent. Zero at the root and for nodes outside the scope of `i`.
pub fn regularizer_value(set: &EmbeddingSet, hierarchy: &Hierarchy, u: NodeId, i: usize) -> f64 {
    let Some(p) = hierarchy.parent(i) else {
        return 0.0;
    };
    match (set.table(i).vector(u), set.table(p).vector(u)) {
        (Some(own), Some(parent)) => coupling_penalty(own, parent),
        _ => 0.0,
    }
}

/// Sum of c_i(u) over the scope of `i`.
pub fn reg_term(set: &EmbeddingSet, hierarchy: &Hierarchy, i: usize) -> f64 {
    set.table(i)
        .nodes()
        .iter()
        .map(|&u| regularizer_value(set, hierarchy, u, i))
        .sum()
}

pub fn total_regularizer(set: &EmbeddingSet, hierarchy: &Hierarchy) -> f64 {
    (0..hierarchy.len()).map(|i| reg_term(set, hierarchy, i)).sum()
}

/// Closed-form minimizer of the coupling penalty over the vectors of
/// internal element `i`, all other tables fixed: each row becomes the mean of
/// the parent's row (absent at the root) and the rows of the children that
/// contain the node. Returns the largest coordinate change.
pub fn internal_update(
    set: &mut EmbeddingSet,
    index: &HierarchyIndex,
    i: usize,
    mode: ExecMode,
) -> f64 {
    assert!(index.is_internal(i), "element {i} is a leaf");
    let dim = set.dim();
    let mut table = set.take_input(i);
    let shared: &EmbeddingSet = set;
    let parent = index.parent(i).map(|p| shared.table(p));

    let update_row = |mean: &mut Vec<f64>, (k, row): (usize, &mut [f64])| -> f64 {
        mean.clear();
        mean.resize(dim, 0.0);
        let mut count = 0usize;
        if let Some(parent) = parent {
            for (m, x) in mean.iter_mut().zip(parent.row(index.parent_row(i, k))) {
                *m += x;
            }
            count += 1;
        }
        for &(c, r) in index.children_of_row(i, k) {
            for (m, x) in mean.iter_mut().zip(shared.table(c as usize).row(r as usize)) {
                *m += x;
            }
            count += 1;
        }
        if count == 0 {
            return 0.0;
        }
        let scale = 1.0 / count as f64;
        let mut change = 0.0f64;
        for (x, m) in row.iter_mut().zip(mean.iter()) {
            let next = m * scale;
            change = change.max((next - *x).abs());
            *x = next;
        }
        change
    };

    let change = if dim == 0 {
        0.0
    } else {
        match mode {
            ExecMode::Sequential => {
                let mut mean = Vec::with_capacity(dim);
                table
                    .data_mut()
                    .chunks_mut(dim)
                    .enumerate()
                    .map(|item| update_row(&mut mean, item))
                    .fold(0.0, f64::max)
            }
            ExecMode::Parallel => table
                .data_mut()
                .par_chunks_mut(dim)
                .enumerate()
                .map_init(|| Vec::with_capacity(dim), |mean, item| update_row(mean, item))
                .reduce(|| 0.0, f64::max),
        }
    };
    set.put_input(i, table);
    change
}

/// [`internal_update`] without a prebuilt index.
pub fn closed_form_update(set: &mut EmbeddingSet, hierarchy: &Hierarchy, i: usize) -> f64 {
    let index = HierarchyIndex::new(hierarchy, set);
    internal_update(set, &index, i, ExecMode::Sequential)
}

/// One closed-form pass over every internal element, children first.
/// Returns the largest coordinate change.
pub fn hierarchy_sweep(set: &mut EmbeddingSet, index: &HierarchyIndex, mode: ExecMode) -> f64 {
    let mut change = 0.0f64;
    for &i in index.post_order() {
        if index.is_internal(i) {
            change = change.max(internal_update(set, index, i, mode));
        }
    }
    change
}
