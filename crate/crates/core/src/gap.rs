//! Bounding the extra cost of uncoded storage: the greedy heuristic for the
//! gap program and the closed-form three-source analysis.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::imeasure::{atom_cost, conditional_entropies, enumerate_atoms, AtomMask, AtomVector};
use crate::lp::Solvable;
use crate::network::NetworkInstance;
use crate::problems::{self, ProblemKind, SolutionBundle};
use crate::scalar::{fmt6, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct GreedyStep<T> {
    pub atom: AtomMask,
    pub value: T,
    /// The constraint set `U` whose residual capped the value; `None` when
    /// the value was cut by the total instead.
    pub binding: Option<AtomMask>,
    /// Whether this step was shortened so the total hits `h`.
    pub truncated: bool,
}

#[derive(Clone, PartialEq, Debug)]
pub struct GreedyResult<T> {
    pub atoms: AtomVector<T>,
    /// Storage cost of `atoms` minus the coded storage cost.
    pub delta: T,
    pub steps: Vec<GreedyStep<T>>,
}

impl<T: Scalar> fmt::Display for GreedyResult<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            write!(f, "step {}: atom {} ← {}", k + 1, s.atom, fmt6(&s.value))?;
            match (s.binding, s.truncated) {
                (_, true) => writeln!(f, " (binding constraint total)")?,
                (Some(u), false) => writeln!(f, " (binding constraint U={u})")?,
                (None, false) => writeln!(f)?,
            }
        }
        Ok(())
    }
}

fn source_count_for(len: usize) -> Result<usize> {
    let n = (len + 1).trailing_zeros() as usize;
    if len == 0 || (1usize << n) != len + 1 {
        return Err(Error::invalid(format!(
            "{len} conditional entropies do not match any source count"
        )));
    }
    Ok(n)
}

/// Storage cost `Σ d_i H(X_i)` with `H(X_i) = h − H(X_{S∖{i}} | X_i)`.
fn coded_storage_cost<T: Scalar>(h1: &[T], h: &T, costs: &[T]) -> T {
    let n = costs.len();
    (1..=n).fold(T::zero(), |acc, i| {
        let marginal = match AtomMask::singleton(i).complement(n) {
            Some(rest) => h.clone() - h1[rest.index()].clone(),
            None => h.clone(),
        };
        acc + costs[i - 1].clone() * marginal
    })
}

/// Greedy feasible point of the gap program.
///
/// `h1[U.index()]` is `H¹(X_U | X_{S∖U})` for each nonempty `U`; the entry
/// for `U = S` is ignored. Atoms are taken by ascending cost (ties: larger
/// sets first, then canonical order) and each is raised to the smallest
/// residual among the constraints `Σ_{A⊆U} μ(A) ≤ H¹(U)` that contain it,
/// stopping once the total reaches `h`.
pub fn greedy_gap<T: Scalar>(h1: &[T], h: &T, costs: &[T]) -> Result<GreedyResult<T>> {
    let n = source_count_for(h1.len())?;
    if costs.len() != n {
        return Err(Error::invalid(format!(
            "{} costs given for {n} sources",
            costs.len()
        )));
    }
    if costs.iter().any(|d| d.is_negative()) {
        return Err(Error::invalid("storage costs must be nonnegative"));
    }
    if !h.is_positive() {
        return Err(Error::invalid("entropy must be positive"));
    }
    let atoms = enumerate_atoms(n)?;
    let full = AtomMask::full(n);
    if let Some(u) = atoms
        .iter()
        .find(|&&u| u != full && h1[u.index()].is_negative_beyond_tolerance())
    {
        return Err(Error::InfeasibleInput(format!(
            "conditional entropy for U={u} is negative"
        )));
    }

    let mut order = atoms.clone();
    order.sort_by(|a, b| {
        atom_cost(*a, costs)
            .partial_cmp(&atom_cost(*b, costs))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.len().cmp(&a.len()))
            .then(a.cmp(b))
    });

    let mut residual: Vec<T> = h1.to_vec();
    let mut result = AtomVector::zeros(n)?;
    let mut total = T::zero();
    let mut steps = Vec::new();
    for a in order {
        let cap = atoms
            .iter()
            .filter(|&&u| u != full && a.is_subset_of(u))
            .map(|&u| (u, residual[u.index()].clone()))
            .reduce(|x, y| if y.1 < x.1 { y } else { x });
        let (binding, mut value) = match cap {
            Some((u, r)) => (Some(u), T::max_of(r, T::zero())),
            None => (None, h.clone() - total.clone()),
        };
        let truncated = total.clone() + value.clone() >= h.clone();
        if truncated {
            value = h.clone() - total.clone();
        }
        for &u in atoms.iter().filter(|&&u| u != full && a.is_subset_of(u)) {
            residual[u.index()] = residual[u.index()].clone() - value.clone();
        }
        total = total + value.clone();
        result.set(a, value.clone());
        steps.push(GreedyStep {
            atom: a,
            value,
            binding,
            truncated,
        });
        if truncated {
            break;
        }
    }
    if !total.approx_eq(h) {
        return Err(Error::InfeasibleInput(
            "greedy assignment cannot reach the total entropy".into(),
        ));
    }
    let delta = result.storage_cost(costs) - coded_storage_cost(h1, h, costs);
    Ok(GreedyResult {
        atoms: result,
        delta,
        steps,
    })
}

fn require_three(n: usize) -> Result<()> {
    if n != 3 {
        return Err(Error::invalid(format!(
            "three-source analysis needs exactly 3 sources, got {n}"
        )));
    }
    Ok(())
}

/// `min d_i · h / 2`.
pub fn three_source_bound<T: Scalar>(costs: &[T], h: &T) -> Result<T> {
    require_three(costs.len())?;
    let min = costs
        .iter()
        .cloned()
        .reduce(T::min_of)
        .expect("three costs");
    Ok(min * h.clone() / (T::one() + T::one()))
}

/// Makes a three-source atom vector uncoded-feasible when its triple atom `b` is negative.
///
/// Sets `b = 0` and lowers the pairwise atom that excludes the cheapest
/// source by `|b|`; everything else is kept. Storage cost rises by `min d_i · |b|`.
pub fn three_source_transform<T: Scalar>(
    atoms: &AtomVector<T>,
    costs: &[T],
) -> Result<AtomVector<T>> {
    require_three(atoms.n())?;
    require_three(costs.len())?;
    if !crate::imeasure::satisfies_elemental(atoms)? {
        return Err(Error::invalid("atoms violate an elemental inequality"));
    }
    let triple = AtomMask::full(3);
    let b = atoms.get(triple).clone();
    if !b.is_negative() {
        return Ok(atoms.clone());
    }
    let cheapest = (1..=3)
        .reduce(|i, j| if costs[j - 1] < costs[i - 1] { j } else { i })
        .expect("three sources");
    let pair = AtomMask::singleton(cheapest).complement(3).expect("pair");
    let mut out = atoms.clone();
    out.set(pair, atoms.get(pair).clone() + b);
    out.set(triple, T::zero());
    Ok(out)
}

/// Whether the triple atom respects `b ≥ −h/2`.
pub fn check_b_floor<T: Scalar>(atoms: &AtomVector<T>, h: &T) -> Result<bool> {
    require_three(atoms.n())?;
    let floor = -(h.clone() / (T::one() + T::one())) - T::tolerance();
    Ok(*atoms.get(AtomMask::full(3)) >= floor)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GapMethod {
    Lp,
    Greedy,
    Both,
}

impl std::str::FromStr for GapMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(GapMethod::Lp),
            "greedy" => Ok(GapMethod::Greedy),
            "both" => Ok(GapMethod::Both),
            other => Err(Error::invalid(format!("unknown gap method `{other}`"))),
        }
    }
}

/// Every quantity relating the coded and uncoded optima of one instance.
#[derive(Clone, PartialEq, Debug)]
pub struct GapAnalysis<T> {
    pub coded: SolutionBundle<T>,
    pub subset: SolutionBundle<T>,
    pub atom_coded: SolutionBundle<T>,
    /// Gap program optimum.
    pub gap_lp: Option<SolutionBundle<T>>,
    pub greedy: Option<GreedyResult<T>>,
    /// `min d_i · h / 2`, for three sources.
    pub three_source_bound: Option<T>,
}

impl<T: Scalar> GapAnalysis<T> {
    /// Subset optimum minus coded optimum.
    pub fn actual_gap(&self) -> T {
        self.subset.objective.clone() - self.coded.objective.clone()
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "coded={}", fmt6(&self.coded.objective));
        let _ = writeln!(out, "atom_coded={}", fmt6(&self.atom_coded.objective));
        let _ = writeln!(out, "subset={}", fmt6(&self.subset.objective));
        let _ = writeln!(out, "gap={}", fmt6(&self.actual_gap()));
        if let Some(lp) = &self.gap_lp {
            let _ = writeln!(out, "gap_lp={}", fmt6(&lp.objective));
        }
        if let Some(g) = &self.greedy {
            let _ = writeln!(out, "greedy={}", fmt6(&g.delta));
        }
        if let Some(b) = &self.three_source_bound {
            let _ = writeln!(out, "three_source_bound={}", fmt6(b));
        }
        if let Some(atoms) = &self.atom_coded.atoms {
            for (a, v) in atoms.iter() {
                let _ = writeln!(out, "coded_atom {a}={}", fmt6(v));
            }
        }
        if let Some(g) = &self.greedy {
            out.push_str(&g.to_string());
        }
        out
    }
}

/// Solves the coded, subset and atom-coded programs, then bounds the gap.
pub fn analyze_gap<T: Solvable>(
    net: &NetworkInstance,
    method: GapMethod,
) -> Result<GapAnalysis<T>> {
    let coded = problems::solve::<T>(ProblemKind::Coded, net)?;
    let subset = problems::solve::<T>(ProblemKind::Subset, net)?;
    let atom_coded = problems::solve::<T>(ProblemKind::AtomCoded, net)?;
    let gap_lp = match method {
        GapMethod::Lp | GapMethod::Both => Some(problems::solve_gap(net, &atom_coded)?),
        GapMethod::Greedy => None,
    };
    let greedy = match method {
        GapMethod::Greedy | GapMethod::Both => {
            let mu1 = atom_coded.atoms.as_ref().expect("atom-coded atoms");
            let h = T::from_rational(net.entropy());
            Some(greedy_gap(
                &conditional_entropies(mu1),
                &h,
                &net.storage_costs::<T>(),
            )?)
        }
        GapMethod::Lp => None,
    };
    let three_source_bound = if net.source_count() == 3 {
        Some(three_source_bound(
            &net.storage_costs::<T>(),
            &T::from_rational(net.entropy()),
        )?)
    } else {
        None
    };
    Ok(GapAnalysis {
        coded,
        subset,
        atom_coded,
        gap_lp,
        greedy,
        three_source_bound,
    })
}
