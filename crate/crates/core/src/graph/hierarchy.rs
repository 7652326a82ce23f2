use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{MultiLayerNetwork, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Layer bound to this element; set exactly for the leaves.
    pub layer: Option<usize>,
}

/// Rooted tree over hierarchy elements whose leaves bind 1:1 to layers.
///
/// Instances built through [`Hierarchy::from_parent_links`] or
/// [`Hierarchy::singleton`] are guaranteed to be trees. [`Hierarchy::from_elements`]
/// accepts arbitrary (possibly broken) structures for auditing with
/// [`crate::graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    elements: Vec<Element>,
    by_name: HashMap<String, usize>,
}

impl Hierarchy {
    /// Builds a hierarchy from `(child, parent)` name pairs. Elements whose
    /// names match `layer_names` are bound to those layers and must be
    /// leaves; every leaf must be bound.
    ///
    /// With a single layer and no links, the hierarchy is that one element.
    pub fn from_parent_links(links: &[(String, String)], layer_names: &[String]) -> Result<Self> {
        if links.is_empty() {
            return match layer_names {
                [only] => Ok(Self::singleton(only)),
                _ => Err(Error::Hierarchy(format!(
                    "no parent links for {} layers",
                    layer_names.len()
                ))),
            };
        }

        let mut elements: Vec<Element> = Vec::new();
        let mut by_name: HashMap<String, usize> = HashMap::new();
        let mut intern = |name: &str, elements: &mut Vec<Element>| -> usize {
            *by_name.entry(name.to_owned()).or_insert_with(|| {
                elements.push(Element {
                    name: name.to_owned(),
                    parent: None,
                    children: Vec::new(),
                    layer: None,
                });
                elements.len() - 1
            })
        };
        for (child, parent) in links {
            if child == parent {
                return Err(Error::Hierarchy(format!("cycle: `{child}` is its own parent")));
            }
            let c = intern(child, &mut elements);
            let p = intern(parent, &mut elements);
            if elements[c].parent.is_some() {
                return Err(Error::Hierarchy(format!("duplicate child line for `{child}`")));
            }
            elements[c].parent = Some(p);
            elements[p].children.push(c);
        }

        let roots: Vec<&str> = elements
            .iter()
            .filter(|e| e.parent.is_none())
            .map(|e| e.name.as_str())
            .collect();
        match roots.len() {
            0 => return Err(Error::Hierarchy("cycle: every element has a parent".into())),
            1 => {}
            _ => return Err(Error::Hierarchy(format!("multiple roots: {}", roots.join(", ")))),
        }

        for (layer, name) in layer_names.iter().enumerate() {
            let &k = by_name.get(name).ok_or_else(|| {
                Error::Hierarchy(format!("layer `{name}` does not appear in the hierarchy"))
            })?;
            if !elements[k].children.is_empty() {
                return Err(Error::Hierarchy(format!(
                    "layer `{name}` is bound to internal element"
                )));
            }
            if elements[k].layer.is_some() {
                return Err(Error::Hierarchy(format!("layer `{name}` listed twice")));
            }
            elements[k].layer = Some(layer);
        }
        if let Some(e) = elements
            .iter()
            .find(|e| e.children.is_empty() && e.layer.is_none())
        {
            return Err(Error::Hierarchy(format!(
                "unknown leaf binding: leaf `{}` matches no layer",
                e.name
            )));
        }

        let hierarchy = Hierarchy { elements, by_name };
        // A single root plus one parent per other element leaves only cycles
        // detached from the root as a failure mode.
        let reachable = hierarchy.post_order().len();
        if reachable != hierarchy.len() {
            let seen: BTreeSet<usize> = hierarchy.post_order().into_iter().collect();
            let stuck = (0..hierarchy.len()).find(|k| !seen.contains(k)).unwrap();
            return Err(Error::Hierarchy(format!(
                "cycle through `{}`",
                hierarchy.elements[stuck].name
            )));
        }
        Ok(hierarchy)
    }

    /// One element that is both root and the leaf of layer 0.
    pub fn singleton(name: &str) -> Self {
        Self::from_elements(vec![Element {
            name: name.to_owned(),
            parent: None,
            children: Vec::new(),
            layer: Some(0),
        }])
    }

    /// Root with one leaf child per layer.
    pub fn star(root: &str, layer_names: &[String]) -> Result<Self> {
        let links: Vec<(String, String)> = layer_names
            .iter()
            .map(|l| (l.clone(), root.to_owned()))
            .collect();
        Self::from_parent_links(&links, layer_names)
    }

    /// Unchecked constructor.
    pub fn from_elements(elements: Vec<Element>) -> Self {
        let by_name = elements
            .iter()
            .enumerate()
            .map(|(k, e)| (e.name.clone(), k))
            .collect();
        Hierarchy { elements, by_name }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_owned()))
    }

    /// First parentless element.
    pub fn root(&self) -> usize {
        self.elements
            .iter()
            .position(|e| e.parent.is_none())
            .expect("hierarchy has a root")
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.elements[i].parent
    }

    /// The children set of element `i`.
    pub fn children_of(&self, i: usize) -> &[usize] {
        &self.elements[i].children
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.elements[i].children.is_empty()
    }

    pub fn layer_of(&self, i: usize) -> Option<usize> {
        self.elements[i].layer
    }

    pub fn leaf_for_layer(&self, layer: usize) -> Option<usize> {
        self.elements.iter().position(|e| e.layer == Some(layer))
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    pub fn internal(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_leaf(i)).collect()
    }

    /// Elements reachable from the root, children before parents.
    pub fn post_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root(), false)];
        let mut visited = vec![false; self.len()];
        while let Some((i, expanded)) = stack.pop() {
            if expanded {
                order.push(i);
                continue;
            }
            if std::mem::replace(&mut visited[i], true) {
                continue;
            }
            stack.push((i, true));
            for &c in self.elements[i].children.iter().rev() {
                stack.push((c, false));
            }
        }
        order
    }

    /// Ancestors of `i` starting with `i` itself and ending at the root.
    fn path_to_root(&self, i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while let Some(p) = self.elements[cur].parent {
            if path.len() > self.len() {
                break;
            }
            path.push(p);
            cur = p;
        }
        path
    }

    pub fn depth(&self, i: usize) -> usize {
        self.path_to_root(i).len() - 1
    }

    /// Number of edges on the tree path between `a` and `b`.
    pub fn tree_distance(&self, a: usize, b: usize) -> Result<usize> {
        for x in [a, b] {
            if x >= self.len() {
                return Err(Error::UnknownElement(format!("#{x}")));
            }
        }
        let up_a = self.path_to_root(a);
        let up_b = self.path_to_root(b);
        let depth_in_a: HashMap<usize, usize> =
            up_a.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        up_b.iter()
            .enumerate()
            .find_map(|(kb, x)| depth_in_a.get(x).map(|ka| ka + kb))
            .ok_or_else(|| Error::Hierarchy("elements lie in different trees".into()))
    }

    pub fn tree_distance_by_name(&self, a: &str, b: &str) -> Result<usize> {
        self.tree_distance(self.index_of(a)?, self.index_of(b)?)
    }

    /// Leaves of the subtree rooted at `i`.
    pub fn subtree_leaves(&self, i: usize) -> Vec<usize> {
        let mut leaves = Vec::new();
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            if self.is_leaf(x) {
                leaves.push(x);
            } else {
                stack.extend(self.elements[x].children.iter().rev());
            }
        }
        leaves
    }

    /// Union of the node sets of layers bound below `i`, ascending.
    pub fn subtree_scope(&self, network: &MultiLayerNetwork, i: usize) -> Vec<NodeId> {
        let nodes: BTreeSet<NodeId> = self
            .subtree_leaves(i)
            .into_iter()
            .filter_map(|leaf| self.layer_of(leaf))
            .flat_map(|layer| network.layer(layer).nodes().iter().copied())
            .collect();
        nodes.into_iter().collect()
    }

    /// Scopes of every element, computed bottom-up in one pass.
    pub fn scopes(&self, network: &MultiLayerNetwork) -> Vec<Vec<NodeId>> {
        let mut scopes: Vec<Vec<NodeId>> = vec![Vec::new(); self.len()];
        for i in self.post_order() {
            scopes[i] = match self.layer_of(i) {
                Some(layer) if self.is_leaf(i) => network.layer(layer).nodes().to_vec(),
                _ => {
                    let union: BTreeSet<NodeId> = self.elements[i]
                        .children
                        .iter()
                        .flat_map(|&c| scopes[c].iter().copied())
                        .collect();
                    union.into_iter().collect()
                }
            };
        }
        scopes
    }
}
