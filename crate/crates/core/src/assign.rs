//! Turning a nonnegative atom vector into concrete per-mirror piece lists.
//!
//! The file is cut into `Q` equal pieces of entropy `β = h / Q`. Each atom
//! gets a contiguous block of piece ids sized to its measure, and a mirror
//! stores the blocks of every atom that contains it.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::imeasure::{AtomMask, AtomVector};
use crate::scalar::{fmt6, Scalar};

/// `floor(x)` for a nonnegative scalar, exact for rationals.
fn floor_count<T: Scalar>(x: &T) -> usize {
    let mut f = x.to_f64_lossy().floor().max(0.0) as usize;
    while f > 0 && T::from_usize(f).is_some_and(|v| v > *x) {
        f -= 1;
    }
    while T::from_usize(f + 1).is_some_and(|v| v <= *x) {
        f += 1;
    }
    f
}

fn check_nonnegative<T: Scalar>(atoms: &AtomVector<T>) -> Result<T> {
    if let Some((mask, v)) = atoms.iter().find(|(_, v)| v.is_negative_beyond_tolerance()) {
        return Err(Error::NotSubsetFeasible {
            atom: mask.to_string(),
            value: v.to_f64_lossy(),
        });
    }
    let total = atoms.total();
    if !total.is_positive() {
        return Err(Error::invalid("atom measures must have a positive total"));
    }
    Ok(total)
}

/// Largest-remainder apportionment of `q` pieces to atoms in proportion to their measure.
///
/// Ties between equal remainders go to the earlier atom in canonical order.
pub fn quantize_atoms<T: Scalar>(atoms: &AtomVector<T>, q: usize) -> Result<Vec<usize>> {
    if q == 0 {
        return Err(Error::invalid("piece count must be positive"));
    }
    let total = check_nonnegative(atoms)?;
    let qt = T::from_usize(q).ok_or_else(|| Error::invalid("piece count too large"))?;
    let quotas: Vec<T> = atoms
        .values()
        .iter()
        .map(|v| T::max_of(v.clone(), T::zero()) * qt.clone() / total.clone())
        .collect();
    let mut counts: Vec<usize> = quotas.iter().map(floor_count).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    let remainders: Vec<T> = quotas
        .iter()
        .zip(&counts)
        .map(|(quota, &c)| quota.clone() - T::from_usize(c).expect("count"))
        .collect();
    order.sort_by(|&a, &b| {
        remainders[b]
            .partial_cmp(&remainders[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for &k in order.iter().take(q.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    Ok(counts)
}

/// Piece blocks per atom and the resulting piece lists per source.
#[derive(Clone, PartialEq, Debug)]
pub struct PlacementManifest<T> {
    pub pieces: usize,
    /// Entropy of one piece.
    pub beta: T,
    /// Pieces per atom, canonical order.
    pub counts: Vec<usize>,
    /// Piece-id block of each atom with a nonzero count, canonical order.
    pub blocks: Vec<(AtomMask, RangeInclusive<usize>)>,
    /// Sorted, merged piece ranges held by source `i` at position `i - 1`.
    pub sources: Vec<Vec<RangeInclusive<usize>>>,
}

impl<T: Scalar> PlacementManifest<T> {
    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    /// Piece ids held by each source, expanded.
    pub fn holdings(&self) -> Vec<Vec<usize>> {
        self.sources
            .iter()
            .map(|ranges| ranges.iter().flat_map(|r| r.clone()).collect())
            .collect()
    }

    /// Atom measures implied by the manifest: `α_A · β`.
    pub fn realized_atoms(&self) -> Result<AtomVector<T>> {
        AtomVector::new(
            self.sources.len(),
            self.counts
                .iter()
                .map(|&c| T::from_usize(c).expect("count") * self.beta.clone())
                .collect(),
        )
    }
}

impl<T: Scalar> fmt::Display for PlacementManifest<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Q={}", self.pieces)?;
        writeln!(f, "beta={}", fmt6(&self.beta))?;
        for (a, r) in &self.blocks {
            writeln!(f, "atom {a} pieces {}..{}", r.start(), r.end())?;
        }
        for (i, ranges) in self.sources.iter().enumerate() {
            let mut line = String::new();
            for (k, r) in ranges.iter().enumerate() {
                if k > 0 {
                    line.push_str(", ");
                }
                let _ = write!(line, "{}..{}", r.start(), r.end());
            }
            writeln!(
                f,
                "source {} pieces: {}",
                i + 1,
                if line.is_empty() { "none" } else { &line }
            )?;
        }
        Ok(())
    }
}

/// Manifest for `q` pieces, blocks laid out in canonical atom order.
pub fn build_manifest<T: Scalar>(atoms: &AtomVector<T>, q: usize) -> Result<PlacementManifest<T>> {
    let counts = quantize_atoms(atoms, q)?;
    let total = atoms.total();
    let beta = total / T::from_usize(q).expect("piece count");
    let n = atoms.n();
    let mut blocks = Vec::new();
    let mut sources: Vec<Vec<RangeInclusive<usize>>> = vec![Vec::new(); n];
    let mut next = 1;
    for ((mask, _), &count) in atoms.iter().zip(&counts) {
        if count == 0 {
            continue;
        }
        let block = next..=next + count - 1;
        next += count;
        for i in mask.sources() {
            let ranges = &mut sources[i - 1];
            match ranges.last_mut() {
                Some(last) if *last.end() + 1 == *block.start() => {
                    *last = *last.start()..=*block.end()
                }
                _ => ranges.push(block.clone()),
            }
        }
        blocks.push((mask, block));
    }
    Ok(PlacementManifest {
        pieces: q,
        beta,
        counts,
        blocks,
        sources,
    })
}
