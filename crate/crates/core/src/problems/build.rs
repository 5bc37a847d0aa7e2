use super::{Formulation, Layout, ProblemKind, SolutionBundle};
use crate::error::{Error, Result};
use crate::imeasure::{
    atom_cost, conditional_entropies, elemental_inequalities, enumerate_atoms, AtomMask,
};
use crate::lp::{LinearProgram, Sense, VarId};
use crate::network::{build_g1, build_g2, AugmentedGraph, EdgeRole, NetworkInstance};
use crate::scalar::Scalar;

fn mask_name(mask: AtomMask) -> String {
    mask.sources()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("_")
}

/// Per-terminal flows, envelopes and conservation rows shared by every network program.
///
/// Envelope variables exist for base edges and `s* → i` edges; atom edges
/// carry no cost of their own. When `atoms` is given, the flow on `s* → W_A`
/// is the atom variable itself for every terminal.
fn add_flow_part<T: Scalar>(
    lp: &mut LinearProgram<T>,
    graph: &AugmentedGraph<T>,
    h: &T,
    atoms: Option<&[VarId]>,
) -> (Vec<Vec<Option<VarId>>>, Vec<Option<VarId>>) {
    let envelope: Vec<Option<VarId>> = graph
        .edges
        .iter()
        .enumerate()
        .map(|(k, e)| match e.role {
            EdgeRole::Real(_) | EdgeRole::SuperToSource(_) => {
                let z = lp.add_variable(
                    format!("z{k}"),
                    Some(T::zero()),
                    e.capacity.finite().cloned(),
                );
                lp.add_objective(z, e.cost.clone());
                Some(z)
            }
            _ => None,
        })
        .collect();

    let mut flow = Vec::with_capacity(graph.terminals.len());
    for (ti, &t) in graph.terminals.iter().enumerate() {
        let mut row = Vec::with_capacity(graph.edges.len());
        for (k, e) in graph.edges.iter().enumerate() {
            let var = match (e.role, atoms) {
                (EdgeRole::SuperToAtom(_), Some(_)) => None,
                _ => {
                    let upper = if envelope[k].is_some() {
                        None
                    } else {
                        e.capacity.finite().cloned()
                    };
                    let x = lp.add_variable(format!("x{ti}_{k}"), Some(T::zero()), upper);
                    if let Some(z) = envelope[k] {
                        lp.add_constraint(
                            format!("env{ti}_{k}"),
                            vec![(x, T::one()), (z, -T::one())],
                            Sense::Le,
                            T::zero(),
                        );
                    }
                    Some(x)
                }
            };
            row.push(var);
        }
        let flow_var = |k: usize| -> VarId {
            match (row[k], graph.edges[k].role) {
                (Some(x), _) => x,
                (None, EdgeRole::SuperToAtom(a)) => atoms.expect("atom variables")[a.index()],
                _ => unreachable!("flow variable missing"),
            }
        };
        let mut terms: Vec<Vec<(VarId, T)>> = vec![Vec::new(); graph.node_count()];
        for (k, e) in graph.edges.iter().enumerate() {
            terms[e.tail].push((flow_var(k), T::one()));
            terms[e.head].push((flow_var(k), -T::one()));
        }
        for (v, terms) in terms.into_iter().enumerate() {
            let sigma = if v == AugmentedGraph::<T>::SUPER_SOURCE {
                h.clone()
            } else if v == t {
                -h.clone()
            } else {
                T::zero()
            };
            lp.add_constraint(format!("bal{ti}_{v}"), terms, Sense::Eq, sigma);
        }
        flow.push(row);
    }
    (flow, envelope)
}

fn add_atoms<T: Scalar>(
    lp: &mut LinearProgram<T>,
    atoms: &[AtomMask],
    nonnegative: bool,
) -> Vec<VarId> {
    atoms
        .iter()
        .map(|&a| {
            let lower = nonnegative.then(T::zero);
            lp.add_variable(format!("mu_{}", mask_name(a)), lower, None)
        })
        .collect()
}

fn add_total<T: Scalar>(lp: &mut LinearProgram<T>, atom_vars: &[VarId], h: &T) {
    let terms = atom_vars.iter().map(|&v| (v, T::one())).collect();
    lp.add_constraint("total", terms, Sense::Eq, h.clone());
}

/// `x_{s*W_A} = μ(A)` substituted into the flows, `μ ≥ 0`, `Σ μ = h`.
pub(super) fn build_atom_subset<T: Scalar>(net: &NetworkInstance) -> Result<Formulation<T>> {
    let graph = build_g1::<T>(net)?;
    let n = net.source_count();
    let atoms = enumerate_atoms(n)?;
    let h = T::from_rational(net.entropy());
    let costs: Vec<T> = net.storage_costs();
    let mut lp = LinearProgram::new();
    let atom_vars = add_atoms(&mut lp, &atoms, true);
    for (&a, &v) in atoms.iter().zip(&atom_vars) {
        lp.add_objective(v, atom_cost(a, &costs));
    }
    let (flow, envelope) = add_flow_part(&mut lp, &graph, &h, Some(&atom_vars));
    add_total(&mut lp, &atom_vars, &h);
    Ok(Formulation {
        kind: ProblemKind::AtomSubset,
        lp,
        graph: Some(graph),
        layout: Layout {
            n,
            flow,
            envelope,
            rates: Vec::new(),
            atoms: atom_vars,
        },
        baseline_cost: None,
    })
}

/// Rate, Slepian-Wolf and storage rows shared by the subset and atom-coded programs.
fn build_rate_program<T: Scalar>(
    net: &NetworkInstance,
    kind: ProblemKind,
    nonnegative: bool,
) -> Result<Formulation<T>> {
    let graph = build_g2::<T>(net);
    let n = net.source_count();
    let atoms = enumerate_atoms(n)?;
    let h = T::from_rational(net.entropy());
    let mut lp = LinearProgram::new();
    let (flow, envelope) = add_flow_part(&mut lp, &graph, &h, None);
    let atom_vars = add_atoms(&mut lp, &atoms, nonnegative);

    // Graph edge index of s* → source i.
    let storage_edge: Vec<usize> = (1..=n)
        .map(|i| {
            graph
                .edges
                .iter()
                .position(|e| e.role == EdgeRole::SuperToSource(i))
                .expect("storage edge")
        })
        .collect();

    let mut rates = Vec::with_capacity(graph.terminals.len());
    for (ti, terminal_flow) in flow.iter().enumerate() {
        let r: Vec<VarId> = (1..=n)
            .map(|i| lp.add_nonneg(format!("r{ti}_{i}")))
            .collect();
        for i in 0..n {
            let x = terminal_flow[storage_edge[i]].expect("storage flow");
            lp.add_constraint(
                format!("cut{ti}_{}", i + 1),
                vec![(x, T::one()), (r[i], -T::one())],
                Sense::Ge,
                T::zero(),
            );
        }
        for &u in &atoms {
            let mut terms: Vec<(VarId, T)> = u.sources().map(|i| (r[i - 1], T::one())).collect();
            terms.extend(
                atoms
                    .iter()
                    .zip(&atom_vars)
                    .filter(|(a, _)| a.is_subset_of(u))
                    .map(|(_, &v)| (v, -T::one())),
            );
            lp.add_constraint(
                format!("sw{ti}_{}", mask_name(u)),
                terms,
                Sense::Ge,
                T::zero(),
            );
        }
        rates.push(r);
    }
    for i in 1..=n {
        let z = envelope[storage_edge[i - 1]].expect("storage envelope");
        let mut terms = vec![(z, T::one())];
        terms.extend(
            atoms
                .iter()
                .zip(&atom_vars)
                .filter(|(a, _)| a.contains(i))
                .map(|(_, &v)| (v, -T::one())),
        );
        lp.add_constraint(format!("marginal{i}"), terms, Sense::Eq, T::zero());
    }
    add_total(&mut lp, &atom_vars, &h);
    if !nonnegative {
        for (k, ineq) in elemental_inequalities::<T>(n)?.into_iter().enumerate() {
            let terms = ineq
                .coefficients
                .iter()
                .map(|(a, c)| (atom_vars[a.index()], c.clone()))
                .collect();
            lp.add_constraint(format!("elem{k}"), terms, Sense::Ge, ineq.rhs);
        }
    }
    Ok(Formulation {
        kind,
        lp,
        graph: Some(graph),
        layout: Layout {
            n,
            flow,
            envelope,
            rates,
            atoms: atom_vars,
        },
        baseline_cost: None,
    })
}

pub(super) fn build_subset<T: Scalar>(net: &NetworkInstance) -> Result<Formulation<T>> {
    build_rate_program(net, ProblemKind::Subset, true)
}

pub(super) fn build_atom_coded<T: Scalar>(net: &NetworkInstance) -> Result<Formulation<T>> {
    build_rate_program(net, ProblemKind::AtomCoded, false)
}

pub(super) fn build_coded<T: Scalar>(net: &NetworkInstance) -> Result<Formulation<T>> {
    let graph = build_g2::<T>(net);
    let h = T::from_rational(net.entropy());
    let mut lp = LinearProgram::new();
    let (flow, envelope) = add_flow_part(&mut lp, &graph, &h, None);
    Ok(Formulation {
        kind: ProblemKind::Coded,
        lp,
        graph: Some(graph),
        layout: Layout {
            n: net.source_count(),
            flow,
            envelope,
            rates: Vec::new(),
            atoms: Vec::new(),
        },
        baseline_cost: None,
    })
}

/// Subset atom program seeded by an atom-coded optimum `μ₁`:
/// `Σ_{A⊆U} μ(A) ≤ H¹(X_U | X_{S∖U})` for every proper nonempty `U`,
/// `μ ≥ 0`, `Σ μ = h`, minimizing the storage cost change.
pub fn build_gap<T: Scalar>(
    net: &NetworkInstance,
    coded: &SolutionBundle<T>,
) -> Result<Formulation<T>> {
    if coded.kind != ProblemKind::AtomCoded {
        return Err(Error::invalid(format!(
            "gap program needs an atom-coded solution, got {}",
            coded.kind
        )));
    }
    let mu1 = coded
        .atoms
        .as_ref()
        .ok_or_else(|| Error::invalid("atom-coded solution carries no atoms"))?;
    let n = net.source_count();
    if mu1.n() != n {
        return Err(Error::invalid(
            "atom-coded solution has the wrong source count",
        ));
    }
    let atoms = enumerate_atoms(n)?;
    let costs: Vec<T> = net.storage_costs();
    let h = T::from_rational(net.entropy());
    let h1 = conditional_entropies(mu1);
    let mut lp = LinearProgram::new();
    let atom_vars = add_atoms(&mut lp, &atoms, true);
    for (&a, &v) in atoms.iter().zip(&atom_vars) {
        lp.add_objective(v, atom_cost(a, &costs));
    }
    let baseline = mu1.storage_cost(&costs);
    lp.add_objective_offset(-baseline.clone());
    let full = AtomMask::full(n);
    for &u in atoms.iter().filter(|&&u| u != full) {
        let terms = atoms
            .iter()
            .zip(&atom_vars)
            .filter(|(a, _)| a.is_subset_of(u))
            .map(|(_, &v)| (v, T::one()))
            .collect();
        lp.add_constraint(
            format!("remain_{}", mask_name(u)),
            terms,
            Sense::Le,
            h1[u.index()].clone(),
        );
    }
    add_total(&mut lp, &atom_vars, &h);
    Ok(Formulation {
        kind: ProblemKind::Gap,
        lp,
        graph: None,
        layout: Layout {
            n,
            flow: Vec::new(),
            envelope: Vec::new(),
            rates: Vec::new(),
            atoms: atom_vars,
        },
        baseline_cost: Some(baseline),
    })
}
