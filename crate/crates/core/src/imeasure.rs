//! Signed-measure calculus over the field generated by `n` source variables.
//!
//! Every nonempty atom of the field is identified by the set of sources whose
//! set contains it; source `i` (1-based) maps to bit `i - 1`. Atom vectors and
//! entropy vectors are both stored densely, indexed by `mask - 1`, so the
//! canonical order is ascending integer encoding.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported number of sources; `2^n - 1` atoms must stay enumerable.
pub const MAX_SOURCES: usize = 20;

/// A nonempty set of 1-based source indices, stored as a bitmask.
///
/// Used both for atoms and for the source subsets `U`, `V` that index
/// entropies and conditional entropies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AtomMask(u32);

pub type SourceSet = AtomMask;

impl AtomMask {
    pub fn from_bits(bits: u32) -> Option<Self> {
        (bits != 0).then_some(AtomMask(bits))
    }

    /// Builds a mask from 1-based source indices.
    pub fn from_sources(sources: &[usize]) -> Option<Self> {
        let mut bits = 0u32;
        for &i in sources {
            if i == 0 || i > MAX_SOURCES {
                return None;
            }
            bits |= 1 << (i - 1);
        }
        Self::from_bits(bits)
    }

    pub fn singleton(source: usize) -> Self {
        debug_assert!((1..=MAX_SOURCES).contains(&source));
        AtomMask(1 << (source - 1))
    }

    /// The mask of all `n` sources.
    pub fn full(n: usize) -> Self {
        debug_assert!((1..=MAX_SOURCES).contains(&n));
        AtomMask(full_bits(n))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Position of this mask in canonical order.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn contains(self, source: usize) -> bool {
        (1..=32).contains(&source) && self.0 & (1 << (source - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn is_subset_of(self, other: AtomMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: AtomMask) -> bool {
        self.0 & other.0 != 0
    }

    pub fn fits(self, n: usize) -> bool {
        self.0 & !full_bits(n) == 0
    }

    /// 1-based source indices in ascending order.
    pub fn sources(self) -> impl Iterator<Item = usize> {
        (0..32)
            .filter(move |b| self.0 & (1 << b) != 0)
            .map(|b| b + 1)
    }

    /// Complement within the `n`-source universe; `None` when that is empty.
    pub fn complement(self, n: usize) -> Option<AtomMask> {
        Self::from_bits(full_bits(n) & !self.0)
    }
}

impl fmt::Display for AtomMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.sources().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

fn full_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SOURCES {
        return Err(Error::invalid(format!(
            "source count must be in 1..={MAX_SOURCES}, got {n}"
        )));
    }
    Ok(())
}

/// All `2^n - 1` nonempty atoms in canonical (ascending mask) order.
pub fn enumerate_atoms(n: usize) -> Result<Vec<AtomMask>> {
    check_n(n)?;
    Ok((1..=full_bits(n)).map(AtomMask).collect())
}

/// Measure value of every nonempty atom.
#[derive(Clone, PartialEq, Debug)]
pub struct AtomVector<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> AtomVector<T> {
    /// `values` must be in canonical atom order.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        check_n(n)?;
        if values.len() != full_bits(n) as usize {
            return Err(Error::invalid(format!(
                "expected {} atom values for n={n}, got {}",
                full_bits(n),
                values.len()
            )));
        }
        Ok(AtomVector { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(AtomVector {
            n,
            values: vec![T::zero(); full_bits(n) as usize],
        })
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (AtomMask, T)>) -> Result<Self> {
        let mut out = Self::zeros(n)?;
        for (mask, value) in pairs {
            if !mask.fits(n) {
                return Err(Error::invalid(format!("atom {mask} outside n={n}")));
            }
            out.values[mask.index()] = value;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, mask: AtomMask) -> &T {
        &self.values[mask.index()]
    }

    pub fn set(&mut self, mask: AtomMask, value: T) {
        self.values[mask.index()] = value;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomMask, &T)> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| (AtomMask(k as u32 + 1), v))
    }

    /// Joint entropy `H(X_1, ..., X_n)`.
    pub fn total(&self) -> T {
        self.values
            .iter()
            .cloned()
            .fold(T::zero(), |acc, v| acc + v)
    }

    /// `H(X_i)`: sum over atoms containing source `i`.
    pub fn marginal(&self, source: usize) -> T {
        self.iter()
            .filter(|(mask, _)| mask.contains(source))
            .fold(T::zero(), |acc, (_, v)| acc + v.clone())
    }

    /// `Σ_A (Σ_{i ∈ A} d_i) μ(A)`, which equals `Σ_i d_i H(X_i)`.
    pub fn storage_cost(&self, costs: &[T]) -> T {
        self.iter().fold(T::zero(), |acc, (mask, v)| {
            acc + atom_cost(mask, costs) * v.clone()
        })
    }

    /// Every atom is nonnegative within the scalar tolerance.
    pub fn is_nonnegative(&self) -> bool {
        self.values
            .iter()
            .all(|v| !v.is_negative_beyond_tolerance())
    }

    /// First atom below `-tolerance`, if any.
    pub fn first_negative(&self) -> Option<(AtomMask, &T)> {
        self.iter().find(|(_, v)| v.is_negative_beyond_tolerance())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AtomVector<U> {
        AtomVector {
            n: self.n,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> AtomVector<f64> {
        self.map(|v| v.to_f64_lossy())
    }
}

impl<T: Scalar> fmt::Display for AtomVector<T> {
    /// One `atom {i,j,...} = value` line per atom, canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (mask, value) in self.iter() {
            writeln!(f, "atom {mask} = {}", crate::scalar::fmt6(value))?;
        }
        Ok(())
    }
}

/// Storage cost per unit measure of an atom: the sum of `d_i` over its sources.
pub fn atom_cost<T: Scalar>(mask: AtomMask, costs: &[T]) -> T {
    mask.sources()
        .filter_map(|i| costs.get(i - 1))
        .fold(T::zero(), |acc, d| acc + d.clone())
}

/// Joint entropy `H(X_V)` of every nonempty source subset `V`.
#[derive(Clone, PartialEq, Debug)]
pub struct EntropyVector<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> EntropyVector<T> {
    /// `values` indexed by subset mask in ascending order.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        check_n(n)?;
        if values.len() != full_bits(n) as usize {
            return Err(Error::invalid(format!(
                "expected {} entropy values for n={n}, got {}",
                full_bits(n),
                values.len()
            )));
        }
        Ok(EntropyVector { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, subset: SourceSet) -> &T {
        &self.values[subset.index()]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (SourceSet, &T)> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| (AtomMask(k as u32 + 1), v))
    }

    /// `V ⊆ W ⇒ H(X_V) ≤ H(X_W)`, checked on single-element extensions.
    pub fn is_monotone(&self) -> bool {
        let full = full_bits(self.n);
        (1..=full).all(|v| {
            (0..self.n).all(|b| {
                let w = v | (1 << b);
                w == v
                    || self.values[v as usize - 1]
                        <= self.values[w as usize - 1].clone() + T::tolerance()
            })
        })
    }
}

/// `g[U] = Σ_{A ⊆ U} a(A)` for every `U` (index = mask, `g[0] = 0`).
fn subset_sums<T: Scalar>(a: &AtomVector<T>) -> Vec<T> {
    let size = 1usize << a.n;
    let mut g = Vec::with_capacity(size);
    g.push(T::zero());
    g.extend(a.values.iter().cloned());
    for b in 0..a.n {
        let bit = 1 << b;
        for mask in 0..size {
            if mask & bit != 0 {
                let lower = g[mask ^ bit].clone();
                g[mask] = g[mask].clone() + lower;
            }
        }
    }
    g
}

/// `H(X_V) = Σ { a(A) : A ∩ V ≠ ∅ }` for every nonempty `V`.
pub fn atoms_to_entropies<T: Scalar>(a: &AtomVector<T>) -> EntropyVector<T> {
    let g = subset_sums(a);
    let full = full_bits(a.n) as usize;
    let total = g[full].clone();
    let values = (1..=full)
        .map(|v| total.clone() - g[full & !v].clone())
        .collect();
    EntropyVector { n: a.n, values }
}

/// Inverse of [`atoms_to_entropies`], by Möbius inversion over the subset lattice.
///
/// With `g(U) = H(X_S) - H(X_{S∖U}) = Σ_{A ⊆ U} a(A)`, each atom is
/// `a(A) = Σ_{U ⊆ A} (-1)^{|A∖U|} g(U)`.
pub fn entropies_to_atoms<T: Scalar>(h: &EntropyVector<T>) -> AtomVector<T> {
    let n = h.n;
    let full = full_bits(n) as usize;
    let joint = h.values[full - 1].clone();
    let entropy_of = |v: usize| {
        if v == 0 {
            T::zero()
        } else {
            h.values[v - 1].clone()
        }
    };
    let mut f: Vec<T> = (0..=full)
        .map(|u| joint.clone() - entropy_of(full & !u))
        .collect();
    for b in 0..n {
        let bit = 1 << b;
        for mask in 0..=full {
            if mask & bit != 0 {
                let lower = f[mask ^ bit].clone();
                f[mask] = f[mask].clone() - lower;
            }
        }
    }
    f.remove(0);
    AtomVector { n, values: f }
}

/// `H(X_U | X_{S∖U}) = Σ { a(A) : A ⊆ U }`.
pub fn conditional_entropy<T: Scalar>(a: &AtomVector<T>, u: SourceSet) -> T {
    a.iter()
        .filter(|(mask, _)| mask.is_subset_of(u))
        .fold(T::zero(), |acc, (_, v)| acc + v.clone())
}

/// `H(X_U | X_{S∖U})` for every nonempty `U`, indexed by `U.index()`.
pub fn conditional_entropies<T: Scalar>(a: &AtomVector<T>) -> Vec<T> {
    let mut g = subset_sums(a);
    g.remove(0);
    g
}

/// `Σ coefficients · a ≥ rhs` over atom measures.
#[derive(Clone, PartialEq, Debug)]
pub struct LinearInequality<T> {
    pub coefficients: Vec<(AtomMask, T)>,
    pub rhs: T,
    pub label: String,
}

impl<T: Scalar> LinearInequality<T> {
    /// Left side minus right side; nonnegative when satisfied.
    pub fn slack(&self, a: &AtomVector<T>) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, (mask, c)| {
            acc + c.clone() * a.get(*mask).clone()
        }) - self.rhs.clone()
    }

    pub fn is_satisfied(&self, a: &AtomVector<T>) -> bool {
        !self.slack(a).is_negative_beyond_tolerance()
    }
}

fn format_set(mask: u32) -> String {
    AtomMask::from_bits(mask)
        .map(|m| {
            m.sources()
                .map(|i| format!("X{i}"))
                .collect::<Vec<_>>()
                .join(",")
        })
        .unwrap_or_default()
}

/// The elemental Shannon inequalities in atom form.
///
/// `n` conditional-entropy terms `H(X_i | X_{S∖{i}}) = a({i}) ≥ 0`, then for
/// each pair `i < j` and each `K ⊆ S∖{i,j}` the conditional mutual information
/// `I(X_i; X_j | X_K) = Σ { a(A) : i, j ∈ A, A ∩ K = ∅ } ≥ 0`.
pub fn elemental_inequalities<T: Scalar>(n: usize) -> Result<Vec<LinearInequality<T>>> {
    let atoms = enumerate_atoms(n)?;
    let full = full_bits(n);
    let mut out = Vec::with_capacity(n + n * (n - 1) / 2 * (1usize << n.saturating_sub(2)));
    for i in 1..=n {
        let rest = full & !(1 << (i - 1));
        let label = if rest == 0 {
            format!("H(X{i}) >= 0")
        } else {
            format!("H(X{i}|{}) >= 0", format_set(rest))
        };
        out.push(LinearInequality {
            coefficients: vec![(AtomMask::singleton(i), T::one())],
            rhs: T::zero(),
            label,
        });
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let pair = (1u32 << (i - 1)) | (1u32 << (j - 1));
            let others = full & !pair;
            // Enumerate every K ⊆ others, including the empty set.
            let mut k = 0u32;
            loop {
                let coefficients = atoms
                    .iter()
                    .filter(|m| m.0 & pair == pair && m.0 & k == 0)
                    .map(|&m| (m, T::one()))
                    .collect();
                let label = if k == 0 {
                    format!("I(X{i};X{j}) >= 0")
                } else {
                    format!("I(X{i};X{j}|{}) >= 0", format_set(k))
                };
                out.push(LinearInequality {
                    coefficients,
                    rhs: T::zero(),
                    label,
                });
                if k == others {
                    break;
                }
                k = (k.wrapping_sub(others)) & others;
            }
        }
    }
    Ok(out)
}

pub fn satisfies_elemental<T: Scalar>(a: &AtomVector<T>) -> Result<bool> {
    Ok(elemental_inequalities::<T>(a.n)?
        .iter()
        .all(|ineq| ineq.is_satisfied(a)))
}

/// Independent blocks `W_A` each source must hold so the induced measure is `a`.
///
/// Returns, for source `i` at position `i - 1`, the atoms containing `i` with
/// nonzero measure.
pub fn realize_sources<T: Scalar>(a: &AtomVector<T>) -> Result<Vec<Vec<AtomMask>>> {
    if let Some((mask, value)) = a.first_negative() {
        return Err(Error::NotSubsetFeasible {
            atom: mask.to_string(),
            value: value.to_f64_lossy(),
        });
    }
    Ok((1..=a.n)
        .map(|i| {
            a.iter()
                .filter(|(mask, v)| mask.contains(i) && !v.approx_eq(&T::zero()))
                .map(|(mask, _)| mask)
                .collect()
        })
        .collect())
}

/// Atom measures induced when source `i` holds the independent pieces `holdings[i-1]`.
///
/// Atom `A` receives the entropy of every piece held by exactly the sources in
/// `A`. Pieces are 1-based in `1..=pieces`; a piece held by no source lies
/// outside every source set and contributes nothing.
pub fn atoms_from_piece_assignment<T: Scalar>(
    pieces: usize,
    holdings: &[Vec<usize>],
    piece_entropies: &[T],
) -> Result<AtomVector<T>> {
    let n = holdings.len();
    check_n(n)?;
    if piece_entropies.len() != pieces {
        return Err(Error::invalid(format!(
            "{} piece entropies given for {pieces} pieces",
            piece_entropies.len()
        )));
    }
    if let Some(p) = piece_entropies.iter().position(|e| e.is_negative()) {
        return Err(Error::invalid(format!(
            "piece {} has negative entropy",
            p + 1
        )));
    }
    let mut holders = vec![0u32; pieces];
    for (i, held) in holdings.iter().enumerate() {
        for &p in held {
            if p == 0 || p > pieces {
                return Err(Error::invalid(format!(
                    "source {} holds unknown piece {p}",
                    i + 1
                )));
            }
            holders[p - 1] |= 1 << i;
        }
    }
    let mut out = AtomVector::zeros(n)?;
    for (p, &mask) in holders.iter().enumerate() {
        if mask != 0 {
            let slot: &mut T = &mut out.values[mask as usize - 1];
            *slot = slot.clone() + piece_entropies[p].clone();
        }
    }
    debug_assert!(out.values.iter().all(|v| !v.is_negative()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, rational_int, Rational};

    fn m(sources: &[usize]) -> AtomMask {
        AtomMask::from_sources(sources).unwrap()
    }

    fn ri(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| rational_int(v)).collect()
    }

    fn xor_atoms() -> AtomVector<Rational> {
        // Canonical order: {1},{2},{1,2},{3},{1,3},{2,3},{1,2,3}.
        AtomVector::new(3, ri(&[0, 0, 1, 0, 1, 1, -1])).unwrap()
    }

    #[test]
    fn enumerates_in_canonical_order() {
        assert_eq!(enumerate_atoms(1).unwrap(), vec![m(&[1])]);
        assert_eq!(
            enumerate_atoms(2).unwrap(),
            vec![m(&[1]), m(&[2]), m(&[1, 2])]
        );
        let three = enumerate_atoms(3).unwrap();
        assert_eq!(three.len(), 7);
        assert_eq!(*three.last().unwrap(), m(&[1, 2, 3]));
        assert_eq!(enumerate_atoms(20).unwrap().len(), (1 << 20) - 1);
    }

    #[test]
    fn rejects_out_of_range_counts() {
        assert!(matches!(enumerate_atoms(0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            enumerate_atoms(21),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn mask_display_and_set_ops() {
        assert_eq!(m(&[1, 3]).to_string(), "{1,3}");
        assert!(m(&[1]).is_subset_of(m(&[1, 2])));
        assert!(!m(&[3]).intersects(m(&[1, 2])));
        assert_eq!(m(&[2]).complement(3), Some(m(&[1, 3])));
        assert_eq!(m(&[1, 2]).complement(2), None);
        assert_eq!(AtomMask::from_sources(&[]), None);
        assert_eq!(AtomMask::from_sources(&[0]), None);
    }

    #[test]
    fn independent_sources_entropies() {
        let a = AtomVector::new(2, ri(&[1, 1, 0])).unwrap();
        let h = atoms_to_entropies(&a);
        assert_eq!(h.values(), ri(&[1, 1, 2]).as_slice());
        assert_eq!(entropies_to_atoms(&h), a);
    }

    #[test]
    fn xor_entropies_and_negative_triple_atom() {
        let h = atoms_to_entropies(&xor_atoms());
        // H1, H2, H12, H3, H13, H23, H123
        assert_eq!(h.values(), ri(&[1, 1, 2, 1, 2, 2, 2]).as_slice());
        let back = entropies_to_atoms(&h);
        assert_eq!(*back.get(m(&[1, 2, 3])), rational_int(-1));
        assert_eq!(back, xor_atoms());
    }

    #[test]
    fn half_overlap_entropies() {
        let half = rational(1, 2);
        let a = AtomVector::new(2, vec![half.clone(), half.clone(), half]).unwrap();
        let h = atoms_to_entropies(&a);
        assert_eq!(
            h.values(),
            &[rational_int(1), rational_int(1), rational(3, 2)]
        );
        assert_eq!(entropies_to_atoms(&h), a);
    }

    #[test]
    fn inverts_hand_solved_system() {
        let h = EntropyVector::new(2, ri(&[2, 1, 2])).unwrap();
        assert_eq!(entropies_to_atoms(&h).values(), ri(&[1, 0, 1]).as_slice());
    }

    #[test]
    fn conditional_entropy_examples() {
        let xor = xor_atoms();
        assert_eq!(
            conditional_entropy(&xor, AtomMask::full(3)),
            rational_int(2)
        );
        assert_eq!(conditional_entropy(&xor, m(&[1])), rational_int(0));
        let indep = AtomVector::new(2, ri(&[1, 1, 0])).unwrap();
        assert_eq!(conditional_entropy(&indep, m(&[1])), rational_int(1));
        let all = conditional_entropies(&xor);
        for (k, value) in all.iter().enumerate() {
            let u = AtomMask::from_bits(k as u32 + 1).unwrap();
            assert_eq!(*value, conditional_entropy(&xor, u));
        }
    }

    #[test]
    fn elemental_counts() {
        assert_eq!(elemental_inequalities::<f64>(1).unwrap().len(), 1);
        assert_eq!(elemental_inequalities::<f64>(2).unwrap().len(), 3);
        assert_eq!(elemental_inequalities::<f64>(3).unwrap().len(), 9);
        assert_eq!(elemental_inequalities::<f64>(4).unwrap().len(), 4 + 6 * 4);
        assert_eq!(elemental_inequalities::<f64>(5).unwrap().len(), 5 + 10 * 8);
    }

    #[test]
    fn elemental_n2_are_atom_nonnegativity() {
        let ineqs = elemental_inequalities::<Rational>(2).unwrap();
        let singles: Vec<_> = ineqs.iter().map(|q| q.coefficients.clone()).collect();
        assert_eq!(
            singles,
            vec![
                vec![(m(&[1]), rational_int(1))],
                vec![(m(&[2]), rational_int(1))],
                vec![(m(&[1, 2]), rational_int(1))],
            ]
        );
    }

    #[test]
    fn xor_satisfies_every_elemental_inequality() {
        let xor = xor_atoms();
        let ineqs = elemental_inequalities::<Rational>(3).unwrap();
        for q in &ineqs {
            assert!(q.is_satisfied(&xor), "{} violated", q.label);
        }
        // The triple atom only ever appears alongside one pairwise atom.
        for q in ineqs
            .iter()
            .filter(|q| q.coefficients.iter().any(|(a, _)| a.len() == 3))
        {
            assert_eq!(q.coefficients.len(), 2);
        }
    }

    #[test]
    fn realize_examples() {
        let indep = AtomVector::new(2, ri(&[1, 1, 0])).unwrap();
        assert_eq!(
            realize_sources(&indep).unwrap(),
            vec![vec![m(&[1])], vec![m(&[2])]]
        );
        let replicated = AtomVector::new(2, ri(&[0, 0, 2])).unwrap();
        assert_eq!(
            realize_sources(&replicated).unwrap(),
            vec![vec![m(&[1, 2])], vec![m(&[1, 2])]]
        );
        let table = AtomVector::new(3, vec![0.0, 0.0, 0.5809, 0.0, 0.6367, 0.7824, 0.0]).unwrap();
        assert_eq!(
            realize_sources(&table).unwrap(),
            vec![
                vec![m(&[1, 2]), m(&[1, 3])],
                vec![m(&[1, 2]), m(&[2, 3])],
                vec![m(&[1, 3]), m(&[2, 3])],
            ]
        );
        assert!(matches!(
            realize_sources(&xor_atoms()),
            Err(Error::NotSubsetFeasible { .. })
        ));
    }

    #[test]
    fn piece_assignment_examples() {
        let one = vec![rational_int(1); 2];
        let a = atoms_from_piece_assignment(2, &[vec![1], vec![2]], &one).unwrap();
        assert_eq!(a.values(), ri(&[1, 1, 0]).as_slice());
        let a = atoms_from_piece_assignment(1, &[vec![1], vec![1]], &one[..1]).unwrap();
        assert_eq!(a.values(), ri(&[0, 0, 1]).as_slice());
        let four = vec![rational_int(1); 4];
        let a =
            atoms_from_piece_assignment(4, &[vec![1, 2], vec![2, 3], vec![3, 4]], &four).unwrap();
        // {1}: piece 1, {1,2}: piece 2, {2,3}: piece 3, {3}: piece 4.
        assert_eq!(a.values(), ri(&[1, 0, 1, 1, 0, 1, 0]).as_slice());
    }

    #[test]
    fn piece_assignment_rejects_bad_input() {
        let e = vec![1.0f64];
        assert!(atoms_from_piece_assignment(1, &[vec![2]], &e).is_err());
        assert!(atoms_from_piece_assignment(1, &[vec![1]], &[-1.0f64]).is_err());
        assert!(atoms_from_piece_assignment(2, &[vec![1]], &e).is_err());
    }

    #[test]
    fn entropy_monotonicity() {
        assert!(atoms_to_entropies(&xor_atoms()).is_monotone());
        let bad = EntropyVector::new(2, vec![2.0, 1.0, 1.5]).unwrap();
        assert!(!bad.is_monotone());
    }

    #[test]
    fn storage_cost_matches_marginals() {
        let a = AtomVector::new(3, vec![0.0, 0.0, 0.5, 0.0, 0.75, 0.75, 0.0]).unwrap();
        let d = [2.0, 2.0, 1.0];
        let direct: f64 = (1..=3).map(|i| d[i - 1] * a.marginal(i)).sum();
        assert!((a.storage_cost(&d) - direct).abs() < 1e-12);
    }
}
