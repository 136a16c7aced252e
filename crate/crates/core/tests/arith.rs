use hecke_lattice::arith::{EScalar, FieldConfig, FqElem, LocalElem, Tower, Valuation};
use proptest::prelude::*;

fn tower(p: u64, f: u32, e: u32, m: u32) -> Tower {
    Tower::new(FieldConfig::standard(p, f, e, m).unwrap())
}

fn configs() -> Vec<Tower> {
    vec![
        tower(2, 1, 1, 10),
        tower(3, 1, 2, 6),
        tower(3, 2, 1, 5),
        tower(5, 1, 1, 6),
        tower(2, 2, 3, 5),
        tower(5, 2, 2, 4),
    ]
}

fn random_local(t: &Tower, seed: &[u64]) -> LocalElem {
    let rows: Vec<Vec<u64>> = (0..t.e())
        .map(|k| (0..t.f()).map(|i| seed[(k * t.f() + i) % seed.len()] % t.p().pow(t.precision())).collect())
        .collect();
    t.local_from_text(&rows).unwrap()
}

/// Teichmüller oracle: Newton iteration on `t^q − t` from the naive lift.
fn newton_teichmuller(t: &Tower, x: FqElem) -> LocalElem {
    let naive = t.local_from_zq(&t.zq_lift(x));
    if x.code() == 0 {
        return naive;
    }
    let q = t.q();
    let mut r = naive;
    for _ in 0..8 {
        let g = t.local_sub(&t.local_pow(&r, q), &r);
        let dg = t.local_sub(&t.local_scale(&t.local_pow(&r, q - 1), q as i64), &t.local_one());
        r = t.local_sub(&r, &t.local_mul(&g, &t.local_inv(&dg).unwrap()));
    }
    r
}

#[test]
fn teichmuller_matches_newton_oracle() {
    for t in configs() {
        for x in t.fq_elements() {
            let lift = t.local_teich(x);
            assert_eq!(lift, newton_teichmuller(&t, x));
            assert_eq!(t.local_residue(&lift), x);
            assert_eq!(t.local_pow(&lift, t.q()), lift);
        }
        assert!(t.local_is_zero(&t.local_teich(FqElem(0))));
        assert_eq!(t.local_teich(FqElem(1)), t.local_one());
    }
}

#[test]
fn teichmuller_is_multiplicative() {
    for t in configs() {
        for a in t.fq_elements() {
            for b in t.fq_elements() {
                let lhs = t.local_teich(t.fq_mul(a, b));
                let rhs = t.local_mul(&t.local_teich(a), &t.local_teich(b));
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn generator_of_gf9() {
    let t = tower(3, 2, 1, 4);
    // h = x^2 + 1; x has order 4, so the first generator is x + 1 (code 4).
    assert_eq!(t.config().h, vec![1, 0, 1]);
    assert_eq!(t.fq_generator(), FqElem(4));
    let z = t.fq_generator();
    let mut seen = std::collections::BTreeSet::new();
    for k in 0..8 {
        seen.insert(t.fq_pow(z, k));
    }
    assert_eq!(seen.len(), 8);
}

#[test]
fn frobenius_properties() {
    let t = tower(3, 2, 1, 4);
    // Order f, exhaustively over a slice of Zq.
    for a in 0..81u64 {
        for b in [0u64, 1, 7, 80] {
            let z = t.zq_from_text(&[a, b]).unwrap();
            assert_eq!(t.frobenius(&t.frobenius(&z)), z);
        }
    }
    for n in [0i64, 1, 5, -3, 40] {
        let z = t.zq_from_int(n);
        assert_eq!(t.frobenius(&z), z);
    }
    for x in t.fq_elements() {
        assert_eq!(t.frobenius(&t.teichmuller(x)), t.teichmuller(t.fq_pow(x, 3)));
    }
    let a = t.zq_from_text(&[5, 17]).unwrap();
    let b = t.zq_from_text(&[60, 2]).unwrap();
    assert_eq!(t.frobenius(&t.zq_mul(&a, &b)), t.zq_mul(&t.frobenius(&a), &t.frobenius(&b)));
    assert_eq!(t.frobenius(&t.zq_add(&a, &b)), t.zq_add(&t.frobenius(&a), &t.frobenius(&b)));
}

#[test]
fn embeddings_are_homomorphisms() {
    for t in configs() {
        let xs: Vec<LocalElem> = [[3u64, 9, 27, 1], [1, 1, 2, 5], [7, 0, 4, 11], [2, 8, 1, 1]]
            .iter()
            .map(|s| random_local(&t, s))
            .collect();
        for s in 0..t.degree() {
            for a in &xs {
                for b in &xs {
                    assert_eq!(t.embed(s, &t.local_mul(a, b)), t.local_mul(&t.embed(s, a), &t.embed(s, b)));
                    assert_eq!(t.embed(s, &t.local_add(a, b)), t.local_add(&t.embed(s, a), &t.embed(s, b)));
                }
            }
        }
        // Pairwise distinct on {[ω], π}.
        let w = t.local_teich(t.fq_generator());
        let pi = t.uniformizer();
        let images: Vec<(LocalElem, LocalElem)> =
            (0..t.degree()).map(|s| (t.embed(s, &w), t.embed(s, &pi))).collect();
        for i in 0..images.len() {
            for j in 0..i {
                assert_ne!(images[i], images[j]);
            }
        }
    }
}

#[test]
fn embedding_examples() {
    let t = tower(3, 1, 2, 6);
    let pi = t.uniformizer();
    let s = t.embeddings().iter().position(|e| e.gamma == 0 && e.j == 1).unwrap();
    assert_eq!(t.embed(s, &pi), t.local_neg(&pi));
    let iota = t.embeddings().iter().position(|e| e.gamma == 0 && e.j == 0).unwrap();
    let x = random_local(&t, &[4, 7]);
    assert_eq!(t.embed(iota, &x), x);

    let t = tower(3, 2, 1, 5);
    for z in t.fq_elements() {
        for l in 0..2 {
            let s = t.embeddings().iter().position(|e| e.gamma == l as u32).unwrap();
            assert_eq!(t.embed(s, &t.local_teich(z)), t.local_pow(&t.local_teich(z), 3u64.pow(l)));
        }
    }
}

#[test]
fn power_multiindex_examples() {
    let t = tower(3, 2, 1, 5);
    let z = t.fq_generator();
    let lz = t.local_teich(z);
    assert_eq!(t.power_multiindex(&lz, &[0, 0]), t.local_one());
    assert_eq!(t.power_multiindex(&lz, &[1, 1]), t.local_teich(t.fq_pow(z, 4)));
    let t = tower(5, 1, 1, 6);
    let pi = t.uniformizer();
    assert_eq!(t.power_multiindex(&pi, &[3]), t.local_from_int(125));
}

#[test]
fn valuations() {
    let t = tower(3, 1, 2, 6);
    assert_eq!(t.val(&t.from_int(3)), Valuation::Finite(2));
    assert_eq!(t.val(&t.zero()), Valuation::Infinite);
    let t = tower(3, 2, 1, 6);
    let x = t.mul(&t.pi_pow(3), &t.teich(t.fq_generator()));
    assert_eq!(t.val(&x), Valuation::Finite(6));
    assert_eq!(t.val(&t.pi_pow(1)), Valuation::Finite(2));
    assert_eq!(t.val(&t.from_int(9)), Valuation::Finite(4));
    // p^M is invisible to a full-precision subtraction.
    let a = t.from_int(1);
    let b = t.add(&a, &t.from_int(3i64.pow(6)));
    assert!(matches!(t.val(&t.sub(&b, &a)), Valuation::AtLeast(_)));
}

#[test]
fn capped_relative_precision() {
    let t = tower(5, 1, 1, 6);
    // 1 + 5^2·O(5^6) keeps absolute precision 6 after subtracting 1.
    let x = t.from_int(1 + 25 * 7);
    let y = t.sub(&x, &t.one());
    assert_eq!(y.exponent(), Some(2));
    assert_eq!(y.relative_precision(), 4);
    // Dividing by 5 loses nothing relatively.
    let z = t.div(&y, &t.from_int(5)).unwrap();
    assert_eq!(z.exponent(), Some(1));
    assert_eq!(z.relative_precision(), 4);
    assert!(t.eq_at_precision(&z, &t.from_int(35)));
    // Inexact zeros keep their bound through multiplication.
    let o = t.zero_at(3);
    assert_eq!(t.mul(&o, &t.pi_pow(-5)).exponent(), Some(-2));
    assert!(t.is_integral(&o).unwrap());
    assert!(t.is_integral(&t.zero_at(-1)).is_err());
}

#[test]
fn text_round_trip() {
    for t in configs() {
        let xs = [
            t.zero(),
            t.zero_at(-2),
            t.pi_pow(-3),
            t.from_local(&random_local(&t, &[3, 1, 4, 1, 5])),
            t.mul(&t.teich(t.fq_generator()), &t.pi_pow(7)),
        ];
        for x in &xs {
            let text = serde_json::to_string(&t.scalar_to_text(x)).unwrap();
            let back = t.scalar_from_text(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(&back, x, "{text}");
        }
    }
}

fn arb_int() -> impl Strategy<Value = i64> {
    -5000i64..5000
}

proptest! {
    #[test]
    fn scalar_ring_axioms(a in arb_int(), b in arb_int(), c in arb_int(), k in 0usize..6) {
        let t = &configs()[k];
        let (x, y, z) = (t.from_int(a), t.from_int(b), t.from_int(c));
        prop_assert!(t.eq_at_precision(&t.mul(&x, &t.add(&y, &z)), &t.add(&t.mul(&x, &y), &t.mul(&x, &z))));
        prop_assert!(t.eq_at_precision(&t.mul(&t.mul(&x, &y), &z), &t.mul(&x, &t.mul(&y, &z))));
        prop_assert!(t.eq_at_precision(&t.add(&x, &y), &t.from_int(a + b)));
        prop_assert!(t.eq_at_precision(&t.mul(&x, &y), &t.from_int(a * b)));
        if a != 0 && b != 0 {
            let v = |s: &EScalar| t.val(s).finite().unwrap();
            prop_assert_eq!(v(&t.mul(&x, &y)), v(&x) + v(&y));
        }
    }

    #[test]
    fn local_ring_axioms(seed in proptest::collection::vec(0u64..1 << 40, 12), k in 0usize..6) {
        let t = &configs()[k];
        let n = t.degree();
        let a = random_local(t, &seed[..n.max(1)]);
        let b = random_local(t, &seed[4..4 + n]);
        let c = random_local(t, &seed[8..8 + n.min(4)]);
        prop_assert_eq!(t.local_mul(&a, &t.local_mul(&b, &c)), t.local_mul(&t.local_mul(&a, &b), &c));
        prop_assert_eq!(t.local_mul(&a, &t.local_add(&b, &c)), t.local_add(&t.local_mul(&a, &b), &t.local_mul(&a, &c)));
        prop_assert_eq!(t.local_mul(&a, &b), t.local_mul(&b, &a));
        if let Some(inv) = t.local_inv(&a) {
            prop_assert_eq!(t.local_mul(&a, &inv), t.local_one());
        }
    }
}
