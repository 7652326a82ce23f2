use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{Hierarchy, MultiLayerNetwork, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoRoot,
    MultipleRoots(Vec<String>),
    Cycle(String),
    Disconnected(String),
    InconsistentChildren(String),
    NonLeafBinding { element: String, layer: String },
    DanglingBinding { element: String, layer: usize },
    DuplicateBinding { layer: String },
    UnboundLeaf(String),
    UnboundLayer(String),
    OrphanNode(String),
    SelfLoop { layer: String, node: String },
    NonPositiveWeight { layer: String, u: String, v: String },
    EdgeOutsideLayer { layer: String, u: String, v: String },
    AsymmetricEdge { layer: String, u: String, v: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoRoot => write!(f, "no root"),
            MultipleRoots(names) => write!(f, "multiple roots: {}", names.join(", ")),
            Cycle(e) => write!(f, "cycle through `{e}`"),
            Disconnected(e) => write!(f, "disconnected element `{e}`"),
            InconsistentChildren(e) => write!(f, "children of `{e}` disagree with parent links"),
            NonLeafBinding { element, layer } => {
                write!(f, "non-leaf binding: layer `{layer}` bound to internal element `{element}`")
            }
            DanglingBinding { element, layer } => {
                write!(f, "dangling binding: `{element}` bound to missing layer {layer}")
            }
            DuplicateBinding { layer } => write!(f, "layer `{layer}` bound more than once"),
            UnboundLeaf(e) => write!(f, "leaf `{e}` has no layer"),
            UnboundLayer(l) => write!(f, "layer `{l}` is not bound to any element"),
            OrphanNode(n) => write!(f, "orphan node `{n}` belongs to no layer"),
            SelfLoop { layer, node } => write!(f, "self-loop on `{node}` in layer `{layer}`"),
            NonPositiveWeight { layer, u, v } => {
                write!(f, "non-positive weight on `{u}`-`{v}` in layer `{layer}`")
            }
            EdgeOutsideLayer { layer, u, v } => {
                write!(f, "edge `{u}`-`{v}` leaves the node set of layer `{layer}`")
            }
            AsymmetricEdge { layer, u, v } => {
                write!(f, "asymmetric edge `{u}`-`{v}` in layer `{layer}`")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// The report without orphan nodes, which are harmless to training:
    /// they belong to no layer and simply receive no vectors.
    pub fn blocking(self) -> ValidationReport {
        ValidationReport {
            violations: self
                .violations
                .into_iter()
                .filter(|v| !matches!(v, Violation::OrphanNode(_)))
                .collect(),
        }
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Validation(self.violations))
        }
    }
}

/// Audits a network and its hierarchy; an empty report means valid.
pub fn validate(network: &MultiLayerNetwork, hierarchy: &Hierarchy) -> ValidationReport {
    let mut violations = Vec::new();
    check_tree(hierarchy, &mut violations);
    check_bindings(network, hierarchy, &mut violations);
    check_layers(network, &mut violations);
    ValidationReport { violations }
}

fn check_tree(h: &Hierarchy, out: &mut Vec<Violation>) {
    let elements = h.elements();
    let roots: Vec<usize> = (0..h.len())
        .filter(|&i| elements[i].parent.is_none())
        .collect();
    match roots.len() {
        0 => out.push(Violation::NoRoot),
        1 => {}
        _ => out.push(Violation::MultipleRoots(
            roots.iter().map(|&i| elements[i].name.clone()).collect(),
        )),
    }

    for (i, e) in elements.iter().enumerate() {
        let from_parents: BTreeSet<usize> = (0..h.len())
            .filter(|&c| elements[c].parent == Some(i))
            .collect();
        let listed: BTreeSet<usize> = e.children.iter().copied().collect();
        if from_parents != listed || listed.len() != e.children.len() {
            out.push(Violation::InconsistentChildren(e.name.clone()));
        }
    }

    // Any element whose ancestor chain revisits an element sits on or under
    // a cycle; report each cycle once via its smallest member.
    let mut reported = BTreeSet::new();
    for start in 0..h.len() {
        let mut seen = vec![false; h.len()];
        let mut cur = start;
        seen[cur] = true;
        while let Some(p) = elements[cur].parent {
            if p >= h.len() {
                break;
            }
            if seen[p] {
                let mut member = p;
                let mut smallest = p;
                loop {
                    member = elements[member].parent.unwrap();
                    if member == p {
                        break;
                    }
                    smallest = smallest.min(member);
                }
                if reported.insert(smallest) {
                    out.push(Violation::Cycle(elements[smallest].name.clone()));
                }
                break;
            }
            seen[p] = true;
            cur = p;
        }
    }

    if let [root] = roots[..] {
        let mut reachable = vec![false; h.len()];
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut reachable[x], true) {
                continue;
            }
            stack.extend(elements[x].children.iter().filter(|&&c| c < h.len()));
        }
        for (i, e) in elements.iter().enumerate() {
            if !reachable[i] {
                out.push(Violation::Disconnected(e.name.clone()));
            }
        }
    }
}

fn check_bindings(network: &MultiLayerNetwork, h: &Hierarchy, out: &mut Vec<Violation>) {
    let mut bound = vec![0usize; network.num_layers()];
    for e in h.elements() {
        match e.layer {
            Some(layer) if layer >= network.num_layers() => {
                out.push(Violation::DanglingBinding {
                    element: e.name.clone(),
                    layer,
                });
            }
            Some(layer) => {
                bound[layer] += 1;
                if !e.children.is_empty() {
                    out.push(Violation::NonLeafBinding {
                        element: e.name.clone(),
                        layer: network.layer(layer).name().to_owned(),
                    });
                }
            }
            None if e.children.is_empty() => out.push(Violation::UnboundLeaf(e.name.clone())),
            None => {}
        }
    }
    for (layer, &count) in bound.iter().enumerate() {
        let name = network.layer(layer).name().to_owned();
        match count {
            0 => out.push(Violation::UnboundLayer(name)),
            1 => {}
            _ => out.push(Violation::DuplicateBinding { layer: name }),
        }
    }
}

fn check_layers(network: &MultiLayerNetwork, out: &mut Vec<Violation>) {
    let registry = network.registry();
    let name = |u: NodeId| registry.name(u).to_owned();
    let mut covered = vec![false; network.num_nodes()];
    for layer in network.layers() {
        for (u, list) in layer.adjacency_lists() {
            covered[u.index()] = true;
            for &(v, w) in list {
                if u == v {
                    out.push(Violation::SelfLoop {
                        layer: layer.name().to_owned(),
                        node: name(u),
                    });
                    continue;
                }
                if !(w > 0.0) {
                    out.push(Violation::NonPositiveWeight {
                        layer: layer.name().to_owned(),
                        u: name(u),
                        v: name(v),
                    });
                }
                if !layer.contains(v) {
                    out.push(Violation::EdgeOutsideLayer {
                        layer: layer.name().to_owned(),
                        u: name(u),
                        v: name(v),
                    });
                } else if layer.edge_weight(v, u) != Some(w) {
                    out.push(Violation::AsymmetricEdge {
                        layer: layer.name().to_owned(),
                        u: name(u),
                        v: name(v),
                    });
                }
            }
        }
    }
    for (k, seen) in covered.into_iter().enumerate() {
        if !seen {
            out.push(Violation::OrphanNode(name(NodeId::new(k))));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Element, Layer, NodeRegistry};

    fn two_layer_net() -> MultiLayerNetwork {
        let mut reg = NodeRegistry::new();
        let a = reg.intern("a");
        let b = reg.intern("b");
        let c = reg.intern("c");
        MultiLayerNetwork::new(
            reg,
            vec![
                Layer::from_edges(0, "A", [], [(a, b, 1.0)]).unwrap(),
                Layer::from_edges(1, "B", [], [(b, c, 1.0)]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn element(name: &str, parent: Option<usize>, children: &[usize], layer: Option<usize>) -> Element {
        Element {
            name: name.into(),
            parent,
            children: children.to_vec(),
            layer,
        }
    }

    #[test]
    fn minimal_valid_instance() {
        let h = Hierarchy::from_elements(vec![
            element("root", None, &[1, 2], None),
            element("leafA", Some(0), &[], Some(0)),
            element("leafB", Some(0), &[], Some(1)),
        ]);
        let report = validate(&two_layer_net(), &h);
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn two_roots_reported() {
        let h = Hierarchy::from_elements(vec![
            element("r1", None, &[2], None),
            element("r2", None, &[3], None),
            element("leafA", Some(0), &[], Some(0)),
            element("leafB", Some(1), &[], Some(1)),
        ]);
        let report = validate(&two_layer_net(), &h);
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("multiple roots")));
    }

    #[test]
    fn internal_binding_reported() {
        let h = Hierarchy::from_elements(vec![
            element("root", None, &[1], Some(0)),
            element("leafB", Some(0), &[], Some(1)),
        ]);
        let report = validate(&two_layer_net(), &h);
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("non-leaf binding")));
    }

    #[test]
    fn cycle_and_dangling_reported() {
        let h = Hierarchy::from_elements(vec![
            element("root", None, &[1], None),
            element("leafA", Some(0), &[], Some(0)),
            element("x", Some(3), &[3], None),
            element("y", Some(2), &[2], Some(7)),
        ]);
        let v = validate(&two_layer_net(), &h).violations;
        assert!(v.contains(&Violation::Cycle("x".into())), "{v:?}");
        assert!(v.contains(&Violation::Disconnected("x".into())));
        assert!(v.contains(&Violation::DanglingBinding {
            element: "y".into(),
            layer: 7
        }));
        assert!(v.contains(&Violation::UnboundLayer("B".into())));
    }

    #[test]
    fn asymmetric_and_orphan_reported() {
        let mut reg = NodeRegistry::new();
        let a = reg.intern("a");
        let b = reg.intern("b");
        reg.intern("lonely");
        let layer = Layer::from_raw_parts(0, "A", vec![a, b], vec![vec![(b, 1.0)], vec![]]);
        let net = MultiLayerNetwork::new(reg, vec![layer]).unwrap();
        let v = validate(&net, &Hierarchy::singleton("A")).violations;
        assert!(v.contains(&Violation::AsymmetricEdge {
            layer: "A".into(),
            u: "a".into(),
            v: "b".into()
        }));
        assert!(v.contains(&Violation::OrphanNode("lonely".into())));
    }
}
