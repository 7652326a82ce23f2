//! (node, layer, function) annotations used by the evaluation tasks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::NodeId;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSet {
    functions: Vec<String>,
    function_ids: HashMap<String, usize>,
    positives: BTreeMap<(usize, usize), BTreeSet<NodeId>>,
}

impl LabelSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records that `node` carries `function` in `layer`. Repeats are no-ops.
    pub fn insert(&mut self, node: NodeId, layer: usize, function: &str) {
        let f = match self.function_ids.get(function) {
            Some(&f) => f,
            None => {
                self.functions.push(function.to_owned());
                self.function_ids
                    .insert(function.to_owned(), self.functions.len() - 1);
                self.functions.len() - 1
            }
        };
        self.positives.entry((layer, f)).or_default().insert(node);
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty()
    }

    /// Number of distinct (node, layer, function) annotations.
    pub fn len(&self) -> usize {
        self.positives.values().map(BTreeSet::len).sum()
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    pub fn function_id(&self, name: &str) -> Option<usize> {
        self.function_ids.get(name).copied()
    }

    pub fn function_name(&self, f: usize) -> &str {
        &self.functions[f]
    }

    pub fn positives(&self, layer: usize, function: usize) -> Option<&BTreeSet<NodeId>> {
        self.positives.get(&(layer, function))
    }

    /// All annotated `(layer, function)` pairs with their positive nodes.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &BTreeSet<NodeId>)> {
        self.positives.iter().map(|(&k, v)| (k, v))
    }

    pub fn functions_in_layer(&self, layer: usize) -> Vec<usize> {
        self.positives
            .keys()
            .filter(|&&(l, _)| l == layer)
            .map(|&(_, f)| f)
            .collect()
    }

    pub fn labels_of(&self, node: NodeId, layer: usize) -> Vec<&str> {
        self.positives
            .iter()
            .filter(|(&(l, _), nodes)| l == layer && nodes.contains(&node))
            .map(|(&(_, f), _)| self.functions[f].as_str())
            .collect()
    }

    /// Copy with every annotation in `layer` removed.
    pub fn without_layer(&self, layer: usize) -> LabelSet {
        LabelSet {
            functions: self.functions.clone(),
            function_ids: self.function_ids.clone(),
            positives: self
                .positives
                .iter()
                .filter(|(&(l, _), _)| l != layer)
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }
}
