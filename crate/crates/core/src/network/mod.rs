//! Directed capacitated networks and the augmented graphs built over them.

mod flow;
mod format;

pub use flow::{build_auxiliary, max_flow, AuxiliaryGraph, FlowArc, FlowNetwork, MaxFlow};
pub use format::{parse_network, serialize_network};

use crate::error::{Error, Result};
use crate::imeasure::{atom_cost, enumerate_atoms, AtomMask, MAX_SOURCES};
use crate::scalar::{Rational, Scalar};
use num_traits::{Signed, Zero};

#[derive(Clone, PartialEq, Debug)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub capacity: Rational,
    /// Cost per unit of flow.
    pub cost: Rational,
}

#[derive(Clone, PartialEq, Debug)]
pub struct SourceNode {
    pub node: usize,
    /// Cost per unit of stored entropy.
    pub storage_cost: Rational,
}

/// A network with mirror (source) nodes, terminals, and the file entropy `h`.
///
/// Node ids are `1..=nodes`. The order of `sources` fixes the source indices
/// `1..=n` used by atom masks.
#[derive(Clone, PartialEq, Debug)]
pub struct NetworkInstance {
    nodes: usize,
    edges: Vec<Edge>,
    sources: Vec<SourceNode>,
    terminals: Vec<usize>,
    entropy: Rational,
}

impl NetworkInstance {
    pub fn new(
        nodes: usize,
        edges: Vec<Edge>,
        sources: Vec<SourceNode>,
        terminals: Vec<usize>,
        entropy: Rational,
    ) -> Result<Self> {
        let valid = |id: usize| id >= 1 && id <= nodes;
        for (k, e) in edges.iter().enumerate() {
            if !valid(e.tail) || !valid(e.head) {
                return Err(Error::invalid(format!(
                    "edge {} references an unknown node",
                    k + 1
                )));
            }
            if e.tail == e.head {
                return Err(Error::invalid(format!(
                    "edge {} is a self-loop at node {}",
                    k + 1,
                    e.tail
                )));
            }
            if e.capacity.is_negative() || e.cost.is_negative() {
                return Err(Error::invalid(format!(
                    "edge {} has negative capacity or cost",
                    k + 1
                )));
            }
        }
        if sources.is_empty() {
            return Err(Error::invalid("at least one source is required"));
        }
        if sources.len() > MAX_SOURCES {
            return Err(Error::invalid(format!(
                "at most {MAX_SOURCES} sources are supported"
            )));
        }
        if terminals.is_empty() {
            return Err(Error::invalid("at least one terminal is required"));
        }
        for (k, s) in sources.iter().enumerate() {
            if !valid(s.node) {
                return Err(Error::invalid(format!(
                    "source {} is an unknown node",
                    s.node
                )));
            }
            if s.storage_cost.is_negative() {
                return Err(Error::invalid(format!(
                    "source {} has negative storage cost",
                    s.node
                )));
            }
            if sources[..k].iter().any(|o| o.node == s.node) {
                return Err(Error::invalid(format!(
                    "node {} declared as a source twice",
                    s.node
                )));
            }
        }
        for (k, &t) in terminals.iter().enumerate() {
            if !valid(t) {
                return Err(Error::invalid(format!("terminal {t} is an unknown node")));
            }
            if terminals[..k].contains(&t) {
                return Err(Error::invalid(format!(
                    "node {t} declared as a terminal twice"
                )));
            }
        }
        if !entropy.is_positive() {
            return Err(Error::invalid("entropy must be positive"));
        }
        Ok(NetworkInstance {
            nodes,
            edges,
            sources,
            terminals,
            entropy,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> &[SourceNode] {
        &self.sources
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn entropy(&self) -> &Rational {
        &self.entropy
    }

    /// Number of sources `n`.
    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn storage_costs<T: Scalar>(&self) -> Vec<T> {
        self.sources
            .iter()
            .map(|s| T::from_rational(&s.storage_cost))
            .collect()
    }

    /// Nodes declared both as a source and as a terminal.
    pub fn overlapping_roles(&self) -> Vec<usize> {
        self.sources
            .iter()
            .map(|s| s.node)
            .filter(|n| self.terminals.contains(n))
            .collect()
    }

    /// Copy with different storage costs (same order as `sources`).
    pub fn with_storage_costs(&self, costs: &[Rational]) -> Result<Self> {
        if costs.len() != self.sources.len() {
            return Err(Error::invalid("one storage cost per source is required"));
        }
        let sources = self
            .sources
            .iter()
            .zip(costs)
            .map(|(s, d)| SourceNode {
                node: s.node,
                storage_cost: d.clone(),
            })
            .collect();
        NetworkInstance::new(
            self.nodes,
            self.edges.clone(),
            sources,
            self.terminals.clone(),
            self.entropy.clone(),
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphKind {
    /// Super source feeding one node per atom, atoms feeding their sources.
    Atom,
    /// Super source feeding each source directly.
    Source,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeRole {
    SuperSource,
    Atom(AtomMask),
    /// A node of the base network, by its 1-based id.
    Base(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeRole {
    /// Index into the base network's edge list.
    Real(usize),
    SuperToAtom(AtomMask),
    /// Atom node to the node of source index `.1` (1-based).
    AtomToSource(AtomMask, usize),
    /// Super source to the node of source index `.0` (1-based).
    SuperToSource(usize),
}

impl EdgeRole {
    pub fn is_virtual(self) -> bool {
        !matches!(self, EdgeRole::Real(_))
    }
}

/// Edge capacity; virtual edges carry the unbounded marker rather than a big number.
#[derive(Clone, PartialEq, Debug)]
pub enum Capacity<T> {
    Finite(T),
    Unbounded,
}

impl<T: Scalar> Capacity<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Unbounded => None,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct GraphEdge<T> {
    pub tail: usize,
    pub head: usize,
    pub capacity: Capacity<T>,
    pub cost: T,
    pub role: EdgeRole,
}

/// The base network extended with a super source (and, for
/// [`GraphKind::Atom`], one node per atom), so storage becomes flow.
///
/// Node indices: `0` is the super source, then atom nodes in canonical order
/// (atom graph only), then the base nodes in id order. Edge order: virtual
/// edges first, then base edges in input order.
#[derive(Clone, PartialEq, Debug)]
pub struct AugmentedGraph<T> {
    pub kind: GraphKind,
    pub nodes: Vec<NodeRole>,
    pub edges: Vec<GraphEdge<T>>,
    /// Graph index of each terminal, in instance order.
    pub terminals: Vec<usize>,
    /// Graph index of each source node, by source index - 1.
    pub sources: Vec<usize>,
}

impl<T: Scalar> AugmentedGraph<T> {
    pub const SUPER_SOURCE: usize = 0;

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn virtual_node_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|r| !matches!(r, NodeRole::Base(_)))
            .count()
    }

    pub fn virtual_edges(&self) -> impl Iterator<Item = &GraphEdge<T>> {
        self.edges.iter().filter(|e| e.role.is_virtual())
    }

    pub fn to_flow_network(&self) -> FlowNetwork<T> {
        FlowNetwork {
            node_count: self.nodes.len(),
            arcs: self
                .edges
                .iter()
                .map(|e| FlowArc {
                    tail: e.tail,
                    head: e.head,
                    capacity: e.capacity.clone(),
                })
                .collect(),
        }
    }
}

fn base_edges<T: Scalar>(
    net: &NetworkInstance,
    offset: usize,
) -> impl Iterator<Item = GraphEdge<T>> + '_ {
    net.edges.iter().enumerate().map(move |(k, e)| GraphEdge {
        tail: offset + e.tail - 1,
        head: offset + e.head - 1,
        capacity: Capacity::Finite(T::from_rational(&e.capacity)),
        cost: T::from_rational(&e.cost),
        role: EdgeRole::Real(k),
    })
}

/// Atom-form augmented graph: `s* → W_A` costs `Σ_{i∈A} d_i`, `W_A → i` costs zero.
pub fn build_g1<T: Scalar>(net: &NetworkInstance) -> Result<AugmentedGraph<T>> {
    let n = net.source_count();
    let atoms = enumerate_atoms(n)?;
    let offset = 1 + atoms.len();
    let costs: Vec<T> = net.storage_costs();
    let mut nodes = vec![NodeRole::SuperSource];
    nodes.extend(atoms.iter().map(|&a| NodeRole::Atom(a)));
    nodes.extend((1..=net.nodes).map(NodeRole::Base));
    let source_index: Vec<usize> = net.sources.iter().map(|s| offset + s.node - 1).collect();
    let mut edges = Vec::with_capacity(atoms.len() * (1 + n) + net.edges.len());
    for &a in &atoms {
        edges.push(GraphEdge {
            tail: AugmentedGraph::<T>::SUPER_SOURCE,
            head: a.index() + 1,
            capacity: Capacity::Unbounded,
            cost: atom_cost(a, &costs),
            role: EdgeRole::SuperToAtom(a),
        });
    }
    for &a in &atoms {
        for i in a.sources() {
            edges.push(GraphEdge {
                tail: a.index() + 1,
                head: source_index[i - 1],
                capacity: Capacity::Unbounded,
                cost: T::zero(),
                role: EdgeRole::AtomToSource(a, i),
            });
        }
    }
    edges.extend(base_edges(net, offset));
    Ok(AugmentedGraph {
        kind: GraphKind::Atom,
        nodes,
        edges,
        terminals: net.terminals.iter().map(|t| offset + t - 1).collect(),
        sources: source_index,
    })
}

/// Source-form augmented graph: `s* → i` with cost `d_i` for each source.
pub fn build_g2<T: Scalar>(net: &NetworkInstance) -> AugmentedGraph<T> {
    let offset = 1;
    let mut nodes = vec![NodeRole::SuperSource];
    nodes.extend((1..=net.nodes).map(NodeRole::Base));
    let source_index: Vec<usize> = net.sources.iter().map(|s| offset + s.node - 1).collect();
    let mut edges = Vec::with_capacity(net.sources.len() + net.edges.len());
    for (k, s) in net.sources.iter().enumerate() {
        edges.push(GraphEdge {
            tail: AugmentedGraph::<T>::SUPER_SOURCE,
            head: source_index[k],
            capacity: Capacity::Unbounded,
            cost: T::from_rational(&s.storage_cost),
            role: EdgeRole::SuperToSource(k + 1),
        });
    }
    edges.extend(base_edges(net, offset));
    AugmentedGraph {
        kind: GraphKind::Source,
        nodes,
        edges,
        terminals: net.terminals.iter().map(|t| offset + t - 1).collect(),
        sources: source_index,
    }
}

/// Nodes reachable from any source in the base network, by id.
pub fn reachable_from_sources(net: &NetworkInstance) -> Vec<bool> {
    let mut seen = vec![false; net.nodes + 1];
    let mut stack: Vec<usize> = net.sources.iter().map(|s| s.node).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for e in net
            .edges
            .iter()
            .filter(|e| e.tail == u && !e.capacity.is_zero())
        {
            if !seen[e.head] {
                seen[e.head] = true;
                stack.push(e.head);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational_int;

    fn chain(n_sources: usize) -> NetworkInstance {
        // Sources 1..=n feed node n+1, which feeds terminal n+2.
        let nodes = n_sources + 2;
        let mut edges: Vec<Edge> = (1..=n_sources)
            .map(|s| Edge {
                tail: s,
                head: n_sources + 1,
                capacity: rational_int(1),
                cost: rational_int(1),
            })
            .collect();
        edges.push(Edge {
            tail: n_sources + 1,
            head: nodes,
            capacity: rational_int(5),
            cost: rational_int(2),
        });
        let sources = (1..=n_sources)
            .map(|s| SourceNode {
                node: s,
                storage_cost: rational_int(s as i64),
            })
            .collect();
        NetworkInstance::new(nodes, edges, sources, vec![nodes], rational_int(1)).unwrap()
    }

    #[test]
    fn g1_for_two_sources() {
        let g = build_g1::<f64>(&chain(2)).unwrap();
        assert_eq!(g.virtual_node_count(), 4);
        let to_atoms: Vec<_> = g
            .edges
            .iter()
            .filter(|e| matches!(e.role, EdgeRole::SuperToAtom(_)))
            .collect();
        assert_eq!(to_atoms.len(), 3);
        assert_eq!(
            to_atoms.iter().map(|e| e.cost).collect::<Vec<_>>(),
            vec![1.0, 2.0, 3.0]
        );
        let atom_to_source: Vec<_> = g
            .edges
            .iter()
            .filter_map(|e| match e.role {
                EdgeRole::AtomToSource(a, i) => Some((a.to_string(), i)),
                _ => None,
            })
            .collect();
        assert_eq!(
            atom_to_source,
            vec![
                ("{1}".into(), 1),
                ("{2}".into(), 2),
                ("{1,2}".into(), 1),
                ("{1,2}".into(), 2)
            ]
        );
        assert!(g.virtual_edges().all(|e| e.capacity == Capacity::Unbounded));
    }

    #[test]
    fn g1_for_three_sources() {
        let g = build_g1::<f64>(&chain(3)).unwrap();
        assert_eq!(g.virtual_node_count(), 8);
        let count = g
            .edges
            .iter()
            .filter(|e| matches!(e.role, EdgeRole::AtomToSource(..)))
            .count();
        assert_eq!(count, 12);
        // Atom nodes feed the right base nodes.
        for e in &g.edges {
            if let EdgeRole::AtomToSource(a, i) = e.role {
                assert_eq!(g.nodes[e.tail], NodeRole::Atom(a));
                assert_eq!(g.nodes[e.head], NodeRole::Base(i));
            }
        }
    }

    #[test]
    fn g2_virtual_edges() {
        let net = chain(3);
        let g = build_g2::<f64>(&net);
        let virt: Vec<_> = g.virtual_edges().collect();
        assert_eq!(virt.len(), 3);
        assert_eq!(
            virt.iter().map(|e| e.cost).collect::<Vec<_>>(),
            vec![1.0, 2.0, 3.0]
        );
        assert!(virt.iter().all(|e| e.capacity == Capacity::Unbounded));
        assert_eq!(build_g2::<f64>(&chain(1)).virtual_edges().count(), 1);
    }

    #[test]
    fn builders_are_deterministic() {
        let net = chain(3);
        assert_eq!(
            build_g1::<f64>(&net).unwrap(),
            build_g1::<f64>(&net).unwrap()
        );
        assert_eq!(build_g2::<f64>(&net), build_g2::<f64>(&net));
    }

    #[test]
    fn rejects_malformed_instances() {
        let one = rational_int(1);
        let e = |t, h| Edge {
            tail: t,
            head: h,
            capacity: one.clone(),
            cost: one.clone(),
        };
        let src = vec![SourceNode {
            node: 1,
            storage_cost: one.clone(),
        }];
        assert!(NetworkInstance::new(2, vec![e(1, 1)], src.clone(), vec![2], one.clone()).is_err());
        assert!(NetworkInstance::new(2, vec![e(1, 3)], src.clone(), vec![2], one.clone()).is_err());
        assert!(NetworkInstance::new(2, vec![], vec![], vec![2], one.clone()).is_err());
        assert!(NetworkInstance::new(2, vec![], src.clone(), vec![], one.clone()).is_err());
        assert!(NetworkInstance::new(2, vec![], src.clone(), vec![2], rational_int(0)).is_err());
        // Parallel edges are fine; overlapping roles are allowed but reported.
        let net = NetworkInstance::new(2, vec![e(1, 2), e(1, 2)], src, vec![1, 2], one).unwrap();
        assert_eq!(net.overlapping_roles(), vec![1]);
    }
}
