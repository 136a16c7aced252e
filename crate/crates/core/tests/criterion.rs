use std::collections::BTreeSet;

use hecke_lattice::arith::{Embedding, FieldConfig, Tower};
use hecke_lattice::criterion::{bs_gate, theorem_conditions, vandermonde_matrix, vandermonde_unit};
use hecke_lattice::rep::WeightProfile;
use proptest::prelude::*;

fn tower(p: u64, f: u32, e: u32, m: u32) -> Tower {
    Tower::new(FieldConfig::standard(p, f, e, m).unwrap())
}

/// All weight vectors with entries in `0..=bound`.
fn weights(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..=bound).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Residues of the nodes, computed in `O_E` and reduced.
fn residues_distinct(t: &Tower, w: &WeightProfile) -> bool {
    let zeta = t.teich(t.fq_generator());
    let mut seen = BTreeSet::new();
    w.indices().filter(|i| i.total() > 0).all(|i| seen.insert(t.residue(&t.power_multiindex_scalar(&zeta, &i.0)).unwrap()))
}

#[test]
fn condition_examples() {
    let t = tower(3, 2, 1, 4);
    let r = theorem_conditions(&WeightProfile::new(&t, vec![1, 1]).unwrap(), 3);
    assert!(r.verdict && r.condition_i && r.condition_ii);
    assert_eq!((r.witness_i, r.witness_ii), (None, None));

    let r = theorem_conditions(&WeightProfile::new(&t, vec![3, 1]).unwrap(), 3);
    assert!(!r.verdict && r.condition_i && !r.condition_ii);
    assert_eq!(r.witness_ii, Some(0));

    let t = tower(3, 1, 2, 4);
    let r = theorem_conditions(&WeightProfile::new(&t, vec![1, 1]).unwrap(), 3);
    assert!(!r.verdict && !r.condition_i);
    assert_eq!(r.witness_i, Some(0));

    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["witness_i"], 0);
}

#[test]
fn gate_examples() {
    let cfg = FieldConfig::standard(3, 1, 1, 4).unwrap();
    let w = WeightProfile::new(&Tower::new(cfg.clone()), vec![1]).unwrap();
    assert!(bs_gate(1, 1, &w, &cfg));
    assert!(bs_gate(0, 2, &w, &cfg));
    assert!(!bs_gate(0, 1, &w, &cfg));
    assert!(!bs_gate(-1, 3, &w, &cfg));

    let cfg = FieldConfig::standard(3, 2, 1, 4).unwrap();
    let w = WeightProfile::new(&Tower::new(cfg.clone()), vec![1, 1]).unwrap();
    assert!(bs_gate(2, 2, &w, &cfg));
    assert!(bs_gate(0, 4, &w, &cfg));
}

#[test]
fn gate_swap_symmetry() {
    let cfg = FieldConfig::standard(5, 2, 1, 4).unwrap();
    let w = WeightProfile::new(&Tower::new(cfg.clone()), vec![2, 1]).unwrap();
    let s = 2 + 1 + 2;
    for a in -4..10i64 {
        for b in -4..10i64 {
            let eq = |x: i64, y: i64| -x + (s - y) == 0;
            // the equality is symmetric in (a, b); the inequality is what may change
            assert_eq!(eq(a, b), eq(b, a));
            if eq(a, b) {
                assert_eq!(bs_gate(a, b, &w, &cfg), s - b >= 0);
                assert_eq!(bs_gate(b, a, &w, &cfg), s - a >= 0);
            } else {
                assert!(!bs_gate(a, b, &w, &cfg) && !bs_gate(b, a, &w, &cfg));
            }
        }
    }
}

#[test]
fn vandermonde_examples() {
    let t = tower(3, 2, 1, 4);
    assert!(vandermonde_unit(&t, &WeightProfile::new(&t, vec![0, 0]).unwrap()).unwrap());
    assert!(vandermonde_unit(&t, &WeightProfile::new(&t, vec![1, 1]).unwrap()).unwrap());
    let t = tower(3, 1, 1, 4);
    assert!(!vandermonde_unit(&t, &WeightProfile::new(&t, vec![3]).unwrap()).unwrap());
    // the boundary d + 1 = q: every nonzero residue is hit exactly once
    let t = tower(2, 1, 1, 6);
    assert!(vandermonde_unit(&t, &WeightProfile::new(&t, vec![1]).unwrap()).unwrap());
    let t = tower(5, 1, 1, 4);
    let w = WeightProfile::new(&t, vec![4]).unwrap();
    assert!(vandermonde_unit(&t, &w).unwrap());
    assert_eq!(vandermonde_matrix(&t, &w).rows(), 4);
}

#[test]
fn vandermonde_matches_the_criterion() {
    let cases: Vec<(u64, u32, u32, u32)> =
        vec![(2, 1, 1, 4), (2, 2, 1, 4), (2, 3, 1, 2), (3, 1, 1, 5), (3, 1, 2, 3), (3, 2, 1, 3), (5, 1, 1, 6), (5, 1, 2, 3), (5, 2, 1, 2), (7, 1, 1, 8), (3, 2, 2, 2), (2, 2, 3, 1), (3, 3, 1, 3), (13, 1, 1, 14)];
    let mut total = 0;
    for (p, f, e, bound) in cases {
        let t = tower(p, f, e, 4);
        for d in weights((e * f) as usize, bound) {
            let w = WeightProfile::new(&t, d.clone()).unwrap();
            let verdict = theorem_conditions(&w, p).verdict;
            let unit = vandermonde_unit(&t, &w).unwrap();
            assert_eq!(unit, verdict, "p={p} f={f} e={e} d={d:?}");
            assert_eq!(residues_distinct(&t, &w), verdict, "p={p} f={f} e={e} d={d:?}");
            total += 1;
        }
    }
    assert!(total > 300, "{total}");
}

#[test]
fn criterion_is_invariant_under_rotation() {
    // listing the embeddings in Frobenius order, rotating γ by one is a cyclic
    // shift of the weight vector
    for (p, f) in [(2u64, 3u32), (3, 3), (2, 4)] {
        let t = tower(p, f, 1, 3);
        for d in weights(f as usize, 4) {
            let base = theorem_conditions(&WeightProfile::new(&t, d.clone()).unwrap(), p).verdict;
            let mut r = d.clone();
            r.rotate_right(1);
            assert_eq!(theorem_conditions(&WeightProfile::new(&t, r).unwrap(), p).verdict, base);
        }
    }
}

#[test]
fn embedding_order_does_not_matter() {
    let emb = vec![Embedding { gamma: 0, j: 0 }, Embedding { gamma: 1, j: 1 }, Embedding { gamma: 1, j: 0 }, Embedding { gamma: 0, j: 1 }];
    let cfg = FieldConfig::new(3, 2, 2, None, 4, Some(emb)).unwrap();
    let t = Tower::new(cfg);
    let w = WeightProfile::new(&t, vec![1, 0, 2, 0]).unwrap();
    let r = theorem_conditions(&w, 3);
    assert!(r.verdict);
    assert_eq!(w.v(0), Some(1));
    let w = WeightProfile::new(&t, vec![1, 1, 1, 0]).unwrap();
    assert_eq!(theorem_conditions(&w, 3).witness_i, Some(1));
    assert!(!vandermonde_unit(&t, &w).unwrap());
}

proptest! {
    #[test]
    fn generator_choice_is_irrelevant(d0 in 0u32..5, d1 in 0u32..5, k in 1u64..8) {
        // any generator ζ^k with gcd(k, q−1) = 1 gives the same distinctness
        let t = tower(3, 2, 1, 4);
        prop_assume!(k % 2 == 1);
        let w = WeightProfile::new(&t, vec![d0, d1]).unwrap();
        let zeta = t.pow(&t.teich(t.fq_generator()), k);
        let mut seen = BTreeSet::new();
        let distinct = w.indices().filter(|i| i.total() > 0)
            .all(|i| seen.insert(t.residue(&t.power_multiindex_scalar(&zeta, &i.0)).unwrap()));
        prop_assert_eq!(distinct, vandermonde_unit(&t, &w).unwrap());
    }
}
