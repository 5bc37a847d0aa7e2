use std::collections::VecDeque;

use super::Capacity;
use crate::error::{Error, Result};
use crate::imeasure::{AtomMask, AtomVector};
use crate::lp::FEASIBILITY_TOLERANCE;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct FlowArc<T> {
    pub tail: usize,
    pub head: usize,
    pub capacity: Capacity<T>,
}

/// A plain directed graph with nodes `0..node_count` and capacitated arcs.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct FlowNetwork<T> {
    pub node_count: usize,
    pub arcs: Vec<FlowArc<T>>,
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork {
            node_count,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: Capacity<T>) -> usize {
        self.arcs.push(FlowArc {
            tail,
            head,
            capacity,
        });
        self.arcs.len() - 1
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct MaxFlow<T> {
    pub value: T,
    /// Flow on each arc, in arc order.
    pub flows: Vec<T>,
}

/// Maximum `source → sink` flow by shortest augmenting paths.
///
/// Fails with [`Error::UnboundedFlow`] when some path uses only uncapacitated arcs.
pub fn max_flow<T: Scalar>(net: &FlowNetwork<T>, source: usize, sink: usize) -> Result<MaxFlow<T>> {
    let n = net.node_count;
    if source >= n || sink >= n {
        return Err(Error::invalid("flow endpoints out of range"));
    }
    if net.arcs.iter().any(|a| a.tail >= n || a.head >= n) {
        return Err(Error::invalid("arc endpoint out of range"));
    }
    let mut flows = vec![T::zero(); net.arcs.len()];
    if source == sink {
        return Ok(MaxFlow {
            value: T::zero(),
            flows,
        });
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, a) in net.arcs.iter().enumerate() {
        out[a.tail].push(k);
        inc[a.head].push(k);
    }

    // Unbounded check: reachability over uncapacitated arcs only.
    let mut seen = vec![false; n];
    let mut stack = vec![source];
    seen[source] = true;
    while let Some(u) = stack.pop() {
        for &k in &out[u] {
            let a = &net.arcs[k];
            if a.capacity == Capacity::Unbounded && !seen[a.head] {
                seen[a.head] = true;
                stack.push(a.head);
            }
        }
    }
    if seen[sink] {
        return Err(Error::UnboundedFlow);
    }

    let tol = T::tolerance();
    let residual = |k: usize, forward: bool, flows: &[T]| -> Option<T> {
        // `None` means infinite residual.
        if forward {
            net.arcs[k]
                .capacity
                .finite()
                .map(|c| c.clone() - flows[k].clone())
        } else {
            Some(flows[k].clone())
        }
    };
    let mut value = T::zero();
    loop {
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut visited = vec![false; n];
        visited[source] = true;
        let mut queue = VecDeque::from([source]);
        'bfs: while let Some(u) = queue.pop_front() {
            let steps = out[u]
                .iter()
                .map(|&k| (k, true))
                .chain(inc[u].iter().map(|&k| (k, false)));
            for (k, forward) in steps {
                let v = if forward {
                    net.arcs[k].head
                } else {
                    net.arcs[k].tail
                };
                if visited[v] {
                    continue;
                }
                if let Some(r) = residual(k, forward, &flows) {
                    if r <= tol {
                        continue;
                    }
                }
                visited[v] = true;
                pred[v] = Some((k, forward));
                if v == sink {
                    break 'bfs;
                }
                queue.push_back(v);
            }
        }
        if !visited[sink] {
            break;
        }
        let mut path = Vec::new();
        let mut v = sink;
        while v != source {
            let (k, forward) = pred[v].expect("path predecessor");
            path.push((k, forward));
            v = if forward {
                net.arcs[k].tail
            } else {
                net.arcs[k].head
            };
        }
        let bottleneck = path
            .iter()
            .filter_map(|&(k, forward)| residual(k, forward, &flows))
            .reduce(T::min_of)
            .ok_or(Error::UnboundedFlow)?;
        for &(k, forward) in &path {
            if forward {
                flows[k] = flows[k].clone() + bottleneck.clone();
            } else {
                flows[k] = flows[k].clone() - bottleneck.clone();
            }
        }
        value = value + bottleneck;
    }
    Ok(MaxFlow { value, flows })
}

/// Bipartite graph `P* → W_A → source i → Q*` used to split stored
/// per-source amounts into atom amounts.
///
/// Nodes: `0` is `P*`, atoms follow in canonical order, then sources `1..=n`,
/// and `Q*` is last.
#[derive(Clone, PartialEq, Debug)]
pub struct AuxiliaryGraph<T> {
    pub network: FlowNetwork<T>,
    pub source: usize,
    pub sink: usize,
    /// Arc index of each `W_A → i` arc.
    pub atom_arcs: Vec<(AtomMask, usize, usize)>,
}

impl<T: Scalar> AuxiliaryGraph<T> {
    /// Flow on each `W_A → i` arc after a max-flow run.
    pub fn atom_to_source_flows<'a>(
        &'a self,
        flow: &'a MaxFlow<T>,
    ) -> impl Iterator<Item = (AtomMask, usize, &'a T)> {
        self.atom_arcs
            .iter()
            .map(move |&(a, i, k)| (a, i, &flow.flows[k]))
    }
}

fn sum_tolerance<T: Scalar>(magnitude: &T) -> T {
    if T::is_exact() {
        T::zero()
    } else {
        let scale = T::max_of(T::one(), magnitude.abs());
        T::from_f64(FEASIBILITY_TOLERANCE).unwrap_or_else(T::tolerance) * scale
    }
}

/// Builds the auxiliary graph for atom amounts `aflow` and per-source amounts `sflow`.
///
/// The two must have equal totals; tiny negative values within tolerance are clamped to zero.
pub fn build_auxiliary<T: Scalar>(aflow: &AtomVector<T>, sflow: &[T]) -> Result<AuxiliaryGraph<T>> {
    let n = aflow.n();
    if sflow.len() != n {
        return Err(Error::invalid(format!(
            "expected {n} per-source amounts, got {}",
            sflow.len()
        )));
    }
    let a_total = aflow.total();
    let s_total = sflow.iter().cloned().fold(T::zero(), |x, y| x + y);
    let tol = sum_tolerance(&T::max_of(a_total.clone().abs(), s_total.clone().abs()));
    if (a_total.clone() - s_total.clone()).abs() > tol {
        return Err(Error::invalid(format!(
            "atom total {a_total} differs from per-source total {s_total}"
        )));
    }
    let clamp = |v: &T, what: &str| -> Result<T> {
        if *v < -tol.clone() {
            Err(Error::invalid(format!("{what} is negative ({v})")))
        } else {
            Ok(T::max_of(v.clone(), T::zero()))
        }
    };
    let atom_count = aflow.values().len();
    let source_base = 1 + atom_count;
    let sink = source_base + n;
    let mut network = FlowNetwork::new(sink + 1);
    for (a, v) in aflow.iter() {
        network.add_arc(
            0,
            1 + a.index(),
            Capacity::Finite(clamp(v, &format!("atom {a}"))?),
        );
    }
    let mut atom_arcs = Vec::new();
    for (a, _) in aflow.iter() {
        for i in a.sources() {
            let k = network.add_arc(1 + a.index(), source_base + i - 1, Capacity::Unbounded);
            atom_arcs.push((a, i, k));
        }
    }
    for (i, v) in sflow.iter().enumerate() {
        network.add_arc(
            source_base + i,
            sink,
            Capacity::Finite(clamp(v, &format!("source {}", i + 1))?),
        );
    }
    Ok(AuxiliaryGraph {
        network,
        source: 0,
        sink,
        atom_arcs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(c: f64) -> Capacity<f64> {
        Capacity::Finite(c)
    }

    #[test]
    fn classic_max_flow() {
        let mut g = FlowNetwork::new(4);
        g.add_arc(0, 1, fin(3.0));
        g.add_arc(0, 2, fin(2.0));
        g.add_arc(1, 2, fin(1.0));
        g.add_arc(1, 3, fin(2.0));
        g.add_arc(2, 3, fin(3.0));
        let f = max_flow(&g, 0, 3).unwrap();
        assert!((f.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn needs_reverse_residual() {
        // The first BFS path 0-1-2-3 must be partly undone.
        let mut g = FlowNetwork::new(4);
        g.add_arc(0, 1, fin(1.0));
        g.add_arc(0, 2, fin(1.0));
        g.add_arc(1, 2, fin(1.0));
        g.add_arc(1, 3, fin(1.0));
        g.add_arc(2, 3, fin(1.0));
        assert_eq!(max_flow(&g, 0, 3).unwrap().value, 2.0);
    }

    #[test]
    fn unbounded_path_is_reported() {
        let mut g = FlowNetwork::new(3);
        g.add_arc(0, 1, Capacity::Unbounded);
        g.add_arc(1, 2, Capacity::Unbounded);
        assert_eq!(max_flow(&g, 0, 2), Err(Error::UnboundedFlow));
        g.arcs[1].capacity = fin(4.0);
        assert_eq!(max_flow(&g, 0, 2).unwrap().value, 4.0);
    }

    #[test]
    fn auxiliary_layout_for_two_sources() {
        let aflow = AtomVector::new(2, vec![1.0, 0.0, 2.0]).unwrap();
        let aux = build_auxiliary(&aflow, &[3.0, 0.0]).unwrap();
        // P*, three atoms, two sources, Q*.
        assert_eq!(aux.network.node_count, 7);
        assert_eq!(aux.atom_arcs.len(), 4);
        let f = max_flow(&aux.network, aux.source, aux.sink).unwrap();
        assert_eq!(f.value, 3.0);
        assert!(build_auxiliary(&aflow, &[1.0, 1.0]).is_err());
        assert!(build_auxiliary(&aflow, &[3.0]).is_err());
    }
}
