mod common;

use common::brute_force_atoms;
use mirrorcode::assign::{build_manifest, quantize_atoms};
use mirrorcode::gap::{check_b_floor, greedy_gap, three_source_transform};
use mirrorcode::harness::{random_instance, ExperimentConfig};
use mirrorcode::imeasure::{
    atoms_from_piece_assignment, atoms_to_entropies, conditional_entropies, conditional_entropy,
    entropies_to_atoms, satisfies_elemental, AtomMask, AtomVector, EntropyVector,
};
use mirrorcode::network::{max_flow, parse_network, serialize_network, Capacity, FlowNetwork};
use mirrorcode::scalar::{rational, rational_int, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (0i64..=12, 1i64..=4).prop_map(|(p, q)| rational(p, q))
}

fn signed_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(p, q)| rational(p, q))
}

fn entropy_vector(max_n: usize) -> impl Strategy<Value = EntropyVector<Rational>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(signed_rational(), (1 << n) - 1)
            .prop_map(move |v| EntropyVector::new(n, v).unwrap())
    })
}

/// `(holdings, piece entropies)` for up to `max_n` sources and 8 pieces.
fn piece_assignment(max_n: usize) -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<Rational>)> {
    (1..=max_n, 1usize..=8).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), m), n).prop_map(|rows| {
                rows.into_iter()
                    .map(|r| (1..=r.len()).filter(|&p| r[p - 1]).collect())
                    .collect()
            }),
            prop::collection::vec(small_rational(), m),
        )
    })
}

/// Three-source atoms that are nonnegative combinations of a piece layout and the XOR pattern.
fn three_source_polymatroid() -> impl Strategy<Value = AtomVector<Rational>> {
    (
        piece_assignment(3).prop_filter("three sources", |(h, _)| h.len() == 3),
        0i64..=4,
    )
        .prop_map(|((h, e), t)| {
            let base = atoms_from_piece_assignment(e.len(), &h, &e).unwrap();
            let xor = [0, 0, 1, 0, 1, 1, -1];
            let values = base
                .values()
                .iter()
                .zip(xor)
                .map(|(v, x)| v.clone() + rational_int(x * t))
                .collect();
            AtomVector::new(3, values).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn entropies_atoms_round_trip(h in entropy_vector(5)) {
        let a = entropies_to_atoms(&h);
        prop_assert_eq!(atoms_to_entropies(&a), h);
    }

    #[test]
    fn inversion_matches_brute_force(h in entropy_vector(4)) {
        prop_assert_eq!(entropies_to_atoms(&h), brute_force_atoms(&h));
    }

    #[test]
    fn conditional_entropy_is_sum_of_atoms_inside(h in entropy_vector(4)) {
        let a = entropies_to_atoms(&h);
        let n = h.n();
        let full = AtomMask::full(n);
        for (u, _) in h.iter() {
            let rest = u.complement(n).map(|r| h.get(r).clone()).unwrap_or_else(Rational::zero);
            prop_assert_eq!(conditional_entropy(&a, u), h.get(full).clone() - rest);
        }
    }

    #[test]
    fn piece_assignments_give_nonnegative_elemental_atoms((holdings, entropies) in piece_assignment(5)) {
        let a = atoms_from_piece_assignment(entropies.len(), &holdings, &entropies).unwrap();
        prop_assert!(a.is_nonnegative());
        prop_assert!(satisfies_elemental(&a).unwrap());
        prop_assert!(atoms_to_entropies(&a).is_monotone());
        prop_assert_eq!(entropies_to_atoms(&atoms_to_entropies(&a)), a);
    }

    #[test]
    fn quantization_sums_to_q_and_stays_close(
        (holdings, entropies) in piece_assignment(4),
        q in 1usize..=2000,
    ) {
        let a = atoms_from_piece_assignment(entropies.len(), &holdings, &entropies).unwrap();
        prop_assume!(a.total() > Rational::zero());
        let counts = quantize_atoms(&a, q).unwrap();
        prop_assert_eq!(counts.iter().sum::<usize>(), q);
        let total = a.total();
        for (&c, v) in counts.iter().zip(a.values()) {
            let exact = v.clone() * rational_int(q as i64) / total.clone();
            prop_assert!((rational_int(c as i64) - exact).abs() < rational_int(1));
        }
    }

    #[test]
    fn manifest_places_each_piece_at_its_atom((holdings, entropies) in piece_assignment(4), q in 1usize..=300) {
        let a = atoms_from_piece_assignment(entropies.len(), &holdings, &entropies).unwrap();
        prop_assume!(a.total() > Rational::zero());
        let m = build_manifest(&a, q).unwrap();
        let held = m.holdings();
        let mut seen = 0;
        for (mask, range) in &m.blocks {
            for p in range.clone() {
                let holders: Vec<usize> = (1..=held.len()).filter(|&i| held[i - 1].contains(&p)).collect();
                prop_assert_eq!(AtomMask::from_sources(&holders), Some(*mask));
                seen += 1;
            }
        }
        prop_assert_eq!(seen, q);
        let back = atoms_from_piece_assignment(q, &held, &vec![m.beta.clone(); q]).unwrap();
        prop_assert_eq!(back, m.realized_atoms().unwrap());
    }

    #[test]
    fn greedy_is_feasible_and_sums_to_h(a in three_source_polymatroid(), costs in prop::collection::vec(1i64..=9, 3)) {
        let h = a.total();
        prop_assume!(h > Rational::zero());
        let costs: Vec<Rational> = costs.into_iter().map(rational_int).collect();
        let h1 = conditional_entropies(&a);
        let g = greedy_gap(&h1, &h, &costs).unwrap();
        prop_assert!(g.atoms.is_nonnegative());
        prop_assert_eq!(g.atoms.total(), h.clone());
        let full = AtomMask::full(3);
        for (u, _) in a.iter().filter(|(u, _)| *u != full) {
            let used = g.atoms.iter().filter(|(b, _)| b.is_subset_of(u)).fold(Rational::zero(), |s, (_, v)| s + v.clone());
            prop_assert!(used <= h1[u.index()]);
        }
    }

    #[test]
    fn transform_repairs_negative_triple(a in three_source_polymatroid(), costs in prop::collection::vec(1i64..=9, 3)) {
        prop_assume!(satisfies_elemental(&a).unwrap());
        let costs: Vec<Rational> = costs.into_iter().map(rational_int).collect();
        let out = three_source_transform(&a, &costs).unwrap();
        prop_assert!(out.is_nonnegative());
        prop_assert_eq!(out.total(), a.total());
        let b = a.get(AtomMask::full(3)).clone();
        let min_d = costs.iter().min().unwrap().clone();
        let extra = if b.is_negative() { min_d * -b } else { Rational::zero() };
        prop_assert_eq!(out.storage_cost(&costs) - a.storage_cost(&costs), extra);
        prop_assert!(check_b_floor(&a, &a.total()).unwrap());
    }

    #[test]
    fn max_flow_respects_capacities_and_conservation(
        arcs in prop::collection::vec((0usize..6, 0usize..6, 0i64..=5), 1..20),
    ) {
        let mut g = FlowNetwork::new(6);
        for &(t, h, c) in arcs.iter().filter(|(t, h, _)| t != h) {
            g.add_arc(t, h, Capacity::Finite(rational_int(c)));
        }
        let f = max_flow(&g, 0, 5).unwrap();
        let mut balance = vec![Rational::zero(); 6];
        for (arc, x) in g.arcs.iter().zip(&f.flows) {
            prop_assert!(!x.is_negative());
            prop_assert!(Some(x) <= arc.capacity.finite());
            balance[arc.tail] -= x.clone();
            balance[arc.head] += x.clone();
        }
        for (v, b) in balance.iter().enumerate().take(5).skip(1) {
            prop_assert!(b.is_zero(), "node {} unbalanced", v);
        }
        prop_assert_eq!(balance[5].clone(), f.value.clone());
        let out_of_source = g.arcs.iter().filter(|a| a.tail == 0).fold(Rational::zero(), |s, a| s + a.capacity.finite().unwrap().clone());
        prop_assert!(f.value <= out_of_source);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_instances_are_deterministic_and_round_trip(seed in any::<u64>(), trial in 0usize..100, sources in 1usize..=4) {
        let cfg = ExperimentConfig { nodes: 12, edges: 30, sources, terminals: 2, seed, ..ExperimentConfig::default() };
        let a = random_instance(&cfg, trial).unwrap();
        prop_assert_eq!(&random_instance(&cfg, trial).unwrap(), &a);
        let text = serialize_network(&a);
        prop_assert_eq!(parse_network(&text).unwrap(), a);
    }
}
