//! The five optimization programs over a [`NetworkInstance`] and their decoding.

mod build;

pub use build::build_gap;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imeasure::{enumerate_atoms, AtomVector};
use crate::lp::{LinearProgram, LpSolution, Solvable, VarId, OBJECTIVE_TOLERANCE};
use crate::network::{AugmentedGraph, EdgeRole, NetworkInstance};
use crate::scalar::{fmt6, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ProblemKind {
    /// Uncoded storage, flows over the atom graph.
    AtomSubset,
    /// Uncoded storage, per-terminal Slepian-Wolf rates over the source graph.
    Subset,
    /// Coded storage: plain min-cost multicast from the super source.
    Coded,
    /// Coded storage with atom variables constrained by the elemental inequalities.
    AtomCoded,
    /// Upper bound on the uncoded cost penalty, seeded by an atom-coded optimum.
    Gap,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::AtomSubset,
        ProblemKind::Subset,
        ProblemKind::Coded,
        ProblemKind::AtomCoded,
        ProblemKind::Gap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::AtomSubset => "atom-subset",
            ProblemKind::Subset => "subset",
            ProblemKind::Coded => "coded",
            ProblemKind::AtomCoded => "atom-coded",
            ProblemKind::Gap => "gap",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown problem kind `{s}`")))
    }
}

/// Where each quantity lives in the program's variable vector.
#[derive(Clone, Debug)]
pub struct Layout {
    pub n: usize,
    /// `flow[t][e]`: flow toward terminal `t` on graph edge `e`. `None` on
    /// `s* → W_A`, whose flow is the atom variable.
    pub flow: Vec<Vec<Option<VarId>>>,
    /// Envelope `z_e` per graph edge, where one exists.
    pub envelope: Vec<Option<VarId>>,
    /// `rates[t][i - 1]`, for the rate-based programs.
    pub rates: Vec<Vec<VarId>>,
    /// Atom variables in canonical order.
    pub atoms: Vec<VarId>,
}

/// A built program together with what is needed to decode its solution.
#[derive(Clone, Debug)]
pub struct Formulation<T> {
    pub kind: ProblemKind,
    pub lp: LinearProgram<T>,
    pub graph: Option<AugmentedGraph<T>>,
    pub layout: Layout,
    /// Storage cost of the seeding atom vector, for the gap program.
    pub baseline_cost: Option<T>,
}

/// Builds one of the network programs. The gap program needs a seed; use [`build_gap`].
pub fn build<T: Scalar>(kind: ProblemKind, net: &NetworkInstance) -> Result<Formulation<T>> {
    match kind {
        ProblemKind::AtomSubset => build::build_atom_subset(net),
        ProblemKind::Subset => build::build_subset(net),
        ProblemKind::Coded => build::build_coded(net),
        ProblemKind::AtomCoded => build::build_atom_coded(net),
        ProblemKind::Gap => Err(Error::invalid(
            "the gap program is built from an atom-coded solution",
        )),
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct FlowAssignment<T> {
    pub graph: AugmentedGraph<T>,
    /// `per_terminal[t][e]`, aligned with `graph.edges`.
    pub per_terminal: Vec<Vec<T>>,
    /// `max_t per_terminal[t][e]` (the envelope value where the program has one).
    pub envelope: Vec<T>,
}

impl<T: Scalar> FlowAssignment<T> {
    /// Envelope on each base edge, in instance edge order.
    pub fn base_edge_usage(&self) -> Vec<T> {
        let mut usage = Vec::new();
        for (e, z) in self.graph.edges.iter().zip(&self.envelope) {
            if let EdgeRole::Real(k) = e.role {
                debug_assert_eq!(k, usage.len());
                usage.push(z.clone());
            }
        }
        usage
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct SolutionBundle<T> {
    pub kind: ProblemKind,
    pub objective: T,
    /// Absent for the gap program.
    pub flow: Option<FlowAssignment<T>>,
    /// `rates[t][i - 1]`; for the atom-graph program, the inflow to source `i`.
    pub rates: Vec<Vec<T>>,
    /// Absent for the coded program.
    pub atoms: Option<AtomVector<T>>,
    /// Stored amount `H(X_i)` per source.
    pub storage: Vec<T>,
    /// Terminal node ids, aligned with `rates` and the flows.
    pub terminals: Vec<usize>,
}

impl<T: Scalar> SolutionBundle<T> {
    /// `Σ f_e z_e + Σ d_i H(X_i)`, or the storage-cost change for the gap program.
    pub fn recompute_objective(&self, net: &NetworkInstance, baseline: Option<&T>) -> T {
        let costs: Vec<T> = net.storage_costs();
        let storage = self
            .storage
            .iter()
            .zip(&costs)
            .fold(T::zero(), |acc, (s, d)| acc + s.clone() * d.clone());
        let edges = self.flow.as_ref().map_or(T::zero(), |f| {
            f.base_edge_usage()
                .iter()
                .zip(net.edges())
                .fold(T::zero(), |acc, (z, e)| {
                    acc + z.clone() * T::from_rational(&e.cost)
                })
        });
        let baseline = baseline.cloned().unwrap_or_else(T::zero);
        storage + edges - baseline
    }

    /// Line-oriented `key=value` report in canonical order.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind={}", self.kind);
        let _ = writeln!(out, "objective={}", fmt6(&self.objective));
        for (i, s) in self.storage.iter().enumerate() {
            let _ = writeln!(out, "storage {}={}", i + 1, fmt6(s));
        }
        if let Some(atoms) = &self.atoms {
            for (a, v) in atoms.iter() {
                let _ = writeln!(out, "atom {a}={}", fmt6(v));
            }
        }
        for (t, rates) in self.terminals.iter().zip(&self.rates) {
            for (i, r) in rates.iter().enumerate() {
                let _ = writeln!(out, "rate {t} {}={}", i + 1, fmt6(r));
            }
        }
        if let Some(flow) = &self.flow {
            for (k, z) in flow.base_edge_usage().iter().enumerate() {
                let _ = writeln!(out, "edge {}={}", k + 1, fmt6(z));
            }
        }
        out
    }
}

fn relative_gap<T: Scalar>(a: &T, b: &T) -> bool {
    if T::is_exact() {
        return a == b;
    }
    let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
    (a - b).abs() <= OBJECTIVE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Structured view of an optimal solution of `formulation`.
pub fn decode<T: Scalar>(
    formulation: &Formulation<T>,
    net: &NetworkInstance,
    sol: LpSolution<T>,
) -> Result<SolutionBundle<T>> {
    let sol = sol.into_optimal()?;
    let layout = &formulation.layout;
    let n = layout.n;
    let value = |v: VarId| sol.value(v).clone();

    let atoms = if layout.atoms.is_empty() {
        None
    } else {
        Some(AtomVector::new(
            n,
            layout.atoms.iter().map(|&v| value(v)).collect(),
        )?)
    };

    let mut rates = Vec::new();
    let flow = match &formulation.graph {
        None => None,
        Some(graph) => {
            let per_terminal: Vec<Vec<T>> = layout
                .flow
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&graph.edges)
                        .map(|(x, e)| match (x, e.role) {
                            (Some(x), _) => value(*x),
                            (None, EdgeRole::SuperToAtom(a)) => value(layout.atoms[a.index()]),
                            (None, _) => T::zero(),
                        })
                        .collect()
                })
                .collect();
            let envelope: Vec<T> = (0..graph.edges.len())
                .map(|k| match layout.envelope[k] {
                    Some(z) => value(z),
                    None => per_terminal
                        .iter()
                        .map(|row| row[k].clone())
                        .reduce(T::max_of)
                        .unwrap_or_else(T::zero),
                })
                .collect();
            if layout.rates.is_empty() {
                // Atom-graph program: the rate into source i is its inflow from atom nodes.
                rates = per_terminal
                    .iter()
                    .map(|row| {
                        let mut r = vec![T::zero(); n];
                        for (x, e) in row.iter().zip(&graph.edges) {
                            if let EdgeRole::AtomToSource(_, i) = e.role {
                                r[i - 1] = r[i - 1].clone() + x.clone();
                            }
                        }
                        r
                    })
                    .collect();
                if formulation.kind == ProblemKind::Coded {
                    rates.clear();
                }
            }
            Some(FlowAssignment {
                graph: graph.clone(),
                per_terminal,
                envelope,
            })
        }
    };
    if !layout.rates.is_empty() {
        rates = layout
            .rates
            .iter()
            .map(|row| row.iter().map(|&v| value(v)).collect())
            .collect();
    }

    let storage: Vec<T> = match (&atoms, &flow) {
        (Some(a), _) => (1..=n).map(|i| a.marginal(i)).collect(),
        (None, Some(f)) => (1..=n)
            .map(|i| {
                f.graph
                    .edges
                    .iter()
                    .zip(&f.envelope)
                    .find(|(e, _)| e.role == EdgeRole::SuperToSource(i))
                    .map(|(_, z)| z.clone())
                    .unwrap_or_else(T::zero)
            })
            .collect(),
        (None, None) => vec![T::zero(); n],
    };

    let bundle = SolutionBundle {
        kind: formulation.kind,
        objective: sol.objective.clone(),
        flow,
        rates,
        atoms,
        storage,
        terminals: net.terminals().to_vec(),
    };
    let recomputed = bundle.recompute_objective(net, formulation.baseline_cost.as_ref());
    if !relative_gap(&recomputed, &bundle.objective) {
        return Err(Error::SolverFailure(format!(
            "objective {} does not match its parts ({recomputed})",
            bundle.objective
        )));
    }
    Ok(bundle)
}

/// Builds, solves and decodes `kind` on `net`. The gap program is seeded by
/// solving the atom-coded program first.
pub fn solve<T: Solvable>(kind: ProblemKind, net: &NetworkInstance) -> Result<SolutionBundle<T>> {
    if kind == ProblemKind::Gap {
        let coded = solve::<T>(ProblemKind::AtomCoded, net)?;
        return solve_gap(net, &coded);
    }
    let formulation = build::<T>(kind, net)?;
    let sol = T::solve_lp(&formulation.lp)?;
    decode(&formulation, net, sol)
}

/// Solves the gap program seeded by the atom-coded solution `coded`.
pub fn solve_gap<T: Solvable>(
    net: &NetworkInstance,
    coded: &SolutionBundle<T>,
) -> Result<SolutionBundle<T>> {
    let formulation = build_gap(net, coded)?;
    let sol = T::solve_lp(&formulation.lp)?;
    decode(&formulation, net, sol)
}

/// Number of atoms, exposed for size estimates.
pub fn atom_count(n: usize) -> Result<usize> {
    Ok(enumerate_atoms(n)?.len())
}
