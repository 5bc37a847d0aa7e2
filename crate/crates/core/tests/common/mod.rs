#![allow(dead_code)]

use mirrorcode::harness::{random_instance, ExperimentConfig};
use mirrorcode::imeasure::{enumerate_atoms, AtomVector, EntropyVector};
use mirrorcode::network::NetworkInstance;
use mirrorcode::problems::{self, ProblemKind};
use mirrorcode::scalar::{rational_int, Rational};
use num_traits::{One, Zero};

/// Atoms from entropies by plain Gauss-Jordan elimination on the system
/// `H(X_V) = Σ { a(A) : A ∩ V ≠ ∅ }`, independent of the library's inversion.
pub fn brute_force_atoms(h: &EntropyVector<Rational>) -> AtomVector<Rational> {
    let n = h.n();
    let atoms = enumerate_atoms(n).unwrap();
    let m = atoms.len();
    let mut rows: Vec<Vec<Rational>> = atoms
        .iter()
        .map(|&v| {
            let mut row: Vec<Rational> = atoms
                .iter()
                .map(|&a| {
                    if a.intersects(v) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            row.push(h.get(v).clone());
            row
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !rows[r][col].is_zero())
            .expect("system is nonsingular");
        rows.swap(col, pivot);
        let p = rows[col][col].clone();
        for x in rows[col].iter_mut() {
            *x = x.clone() / p.clone();
        }
        for r in 0..m {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot_row = rows[col].clone();
                for (x, p) in rows[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * p;
                }
            }
        }
    }
    AtomVector::new(n, rows.into_iter().map(|r| r[m].clone()).collect()).unwrap()
}

/// XOR of two fair bits: three pairwise-independent unit sources.
pub fn xor_entropies() -> EntropyVector<Rational> {
    // Index U.index(): {1},{2},{1,2},{3},{1,3},{2,3},{1,2,3}
    EntropyVector::new(
        3,
        [1, 1, 2, 1, 2, 2, 2]
            .iter()
            .map(|&v| rational_int(v))
            .collect(),
    )
    .unwrap()
}

/// Small random instances for the equivalence suites.
pub fn suite_config(sources: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        nodes: 10,
        edges: 36,
        sources,
        terminals: 2,
        entropy: rational_int(2),
        seed,
        ..ExperimentConfig::default()
    }
}

/// The first `count` instances (by trial index) whose coded program is feasible.
pub fn feasible_suite(sources: usize, count: usize, seed: u64) -> Vec<NetworkInstance> {
    let cfg = suite_config(sources, seed);
    let mut out = Vec::new();
    for trial in 0..count * 20 {
        let net = random_instance(&cfg, trial).unwrap();
        if problems::solve::<f64>(ProblemKind::Coded, &net).is_ok() {
            out.push(net);
            if out.len() == count {
                return out;
            }
        }
    }
    panic!("only {} feasible instances found", out.len());
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
