use hecke_lattice::arith::{EScalar, FieldConfig, FqElem, Tower};
use hecke_lattice::criterion::theorem_conditions;
use hecke_lattice::induction::{hecke_t, InducedFunction, SatakeData};
use hecke_lattice::rep::{LatticeVector, WeightProfile};
use hecke_lattice::tree::TreeVertex;
use hecke_lattice::verify::*;
use hecke_lattice::Error;

fn tower(p: u64, f: u32, e: u32, m: u32) -> Tower {
    Tower::new(FieldConfig::standard(p, f, e, m).unwrap())
}

fn satake(t: &Tower, k: i64) -> SatakeData {
    SatakeData::new(t, t.pi_pow(k)).unwrap()
}

/// Rank over GF(q) of the residues of integral columns.
fn residue_rank(t: &Tower, rows: usize, cols: &[Vec<FqElem>]) -> usize {
    let mut m: Vec<Vec<FqElem>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let ncols = cols.len();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != FqElem(0)) else { continue };
        m.swap(rank, p);
        let inv = t.fq_inv(m[rank][c]).unwrap();
        for r in 0..rows {
            if r != rank && m[r][c] != FqElem(0) {
                let fct = t.fq_mul(m[r][c], inv);
                for k in 0..ncols {
                    let x = t.fq_mul(fct, m[rank][k]);
                    m[r][k] = t.fq_sub(m[r][k], x);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Columns of `T − a_p` from single basis terms, bypassing the block cache.
fn direct_columns(t: &Tower, w: &WeightProfile, s: &SatakeData, a: &Assembly) -> Vec<Vec<EScalar>> {
    let mut cols = Vec::new();
    for u in &a.columns {
        for k in 0..w.dim() {
            let mut v = LatticeVector::zeros(t, w);
            v.set(k, t.one());
            let img = hecke_t(t, w, &InducedFunction::single(t, u.clone(), v), Some(s)).unwrap();
            cols.push(a.row_vector(t, &img).unwrap());
        }
    }
    cols
}

fn residue_columns(t: &Tower, w: &WeightProfile, s: &SatakeData, a: &Assembly) -> Vec<Vec<FqElem>> {
    let cols = direct_columns(t, w, s, a);
    cols.iter().map(|c| c.iter().map(|x| t.residue(x).unwrap()).collect()).collect()
}

/// Containment `L ⊆ B_N(O)` holds iff nothing in `π^{-1}B_N(O) \ B_N(O)` maps
/// to an integral function, i.e. iff the map is injective modulo `π`.
fn containment_oracle(t: &Tower, w: &WeightProfile, s: &SatakeData, n: usize) -> bool {
    let a = Assembly::new(t, w, Some(s), n, ProbeLimits::default().max_columns).unwrap();
    residue_rank(t, a.nrows(), &residue_columns(t, w, s, &a)) == a.ncols()
}

#[test]
fn counterexample_suite() {
    let cases = [
        (3, 1, 2, vec![1, 1], CounterexampleCase::RepeatedClass),
        (3, 2, 1, vec![3, 1], CounterexampleCase::GapOverflow),
        (3, 1, 1, vec![4], CounterexampleCase::SingleLarge),
        (3, 1, 1, vec![3], CounterexampleCase::SingleBoundary),
        (2, 1, 1, vec![2], CounterexampleCase::SingleBoundary),
    ];
    for (p, f, e, d, case) in cases {
        let t = tower(p, f, e, 12);
        let w = WeightProfile::new(&t, d.clone()).unwrap();
        for k in [1, 2] {
            let s = satake(&t, k);
            let ce = build_counterexample(&t, &w, &s).unwrap();
            assert_eq!(ce.case, case, "{d:?}");
            let check = check_counterexample(&t, &w, &ce.h, &s).unwrap();
            assert!(check.verdict, "p={p} f={f} e={e} d={d:?} val(a_p)={k}: {check:?}");
        }
    }
}

#[test]
fn repeated_class_vector() {
    let t = tower(3, 1, 2, 8);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    let s = satake(&t, 2);
    let ce = build_counterexample(&t, &w, &s).unwrap();
    // val(π) < val(a_p), so δ = π
    assert!(t.eq_at_precision(&ce.delta, &t.pi_pow(1)));
    let v = ce.h.get(&TreeVertex::origin()).unwrap();
    let di = t.pi_pow(-1);
    assert!(t.eq_at_precision(v.at(&w, &w.unit_index(0, 1)).unwrap(), &di));
    assert!(t.eq_at_precision(v.at(&w, &w.unit_index(1, 1)).unwrap(), &t.neg(&di)));
    assert_eq!(ce.h.len(), 1);
}

#[test]
fn single_large_vector() {
    let t = tower(3, 1, 1, 8);
    let w = WeightProfile::new(&t, vec![4]).unwrap();
    let ce = build_counterexample(&t, &w, &satake(&t, 1)).unwrap();
    // tie between val(π) and val(a_p) goes to a_p
    assert!(t.eq_at_precision(&ce.delta, &t.pi_pow(1)));
    let v = ce.h.get(&TreeVertex::origin()).unwrap();
    let di = t.pi_pow(-1);
    let expect = [t.zero(), di.clone(), t.zero(), t.neg(&di), t.zero()];
    for (k, x) in expect.iter().enumerate() {
        assert!(t.eq_at_precision(v.get(k), x), "coefficient {k}");
    }
}

#[test]
fn boundary_case_has_two_levels() {
    let t = tower(3, 1, 1, 8);
    let w = WeightProfile::new(&t, vec![3]).unwrap();
    let ce = build_counterexample(&t, &w, &satake(&t, 1)).unwrap();
    let v0 = ce.h.get(&TreeVertex::origin()).unwrap();
    // v₀ = δ^{-1}(q − 1)(e₀ − e_{q−1}) with δ = π = 3
    let c = t.div(&t.from_int(2), &t.pi_pow(1)).unwrap();
    assert!(t.eq_at_precision(v0.get(0), &c));
    assert!(t.eq_at_precision(v0.get(2), &t.neg(&c)));
    assert_eq!(ce.h.top_level(), Some(2));
    // σ(0)^{q−2} = 0 for q = 3, so only λ ≠ 0 contribute at level 2
    assert_eq!(ce.h.level_part(2).len(), 2);

    let t = tower(2, 1, 1, 8);
    let w = WeightProfile::new(&t, vec![2]).unwrap();
    let ce = build_counterexample(&t, &w, &satake(&t, 1)).unwrap();
    // q = 2: 0^0 = 1, so both digits contribute
    assert_eq!(ce.h.level_part(2).len(), 2);
}

#[test]
fn counterexample_needs_failing_weights() {
    let t = tower(3, 2, 1, 8);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    assert!(matches!(build_counterexample(&t, &w, &satake(&t, 1)), Err(Error::NotApplicable(_))));
}

#[test]
fn delta_selection() {
    let t = tower(3, 1, 2, 8);
    let pi = t.pi_pow(1);
    for (k, expect) in [(1, 1), (2, 1), (5, 1)] {
        let d = choose_delta(&t, &pi, &satake(&t, k)).unwrap();
        assert_eq!(d.exponent(), Some(expect));
    }
    let s = SatakeData::new(&t, t.mul(&t.from_int(2), &t.pi_pow(1))).unwrap();
    // same valuation as π: a_p wins the tie
    assert!(t.eq_at_precision(&choose_delta(&t, &pi, &s).unwrap(), s.a_p()));
    let s = SatakeData::new(&t, t.zero()).unwrap();
    assert!(t.eq_at_precision(&choose_delta(&t, &pi, &s).unwrap(), &pi));
}

#[test]
fn check_rejects_integral_and_weight_zero() {
    let t = tower(3, 1, 1, 8);
    let w = WeightProfile::new(&t, vec![2]).unwrap();
    let s = satake(&t, 1);
    let mut v = LatticeVector::zeros(&t, &w);
    v.set(0, t.one());
    let h = InducedFunction::single(&t, TreeVertex::origin(), v);
    assert!(!check_counterexample(&t, &w, &h, &s).unwrap().verdict);

    let w = WeightProfile::new(&t, vec![0]).unwrap();
    let mut v = LatticeVector::zeros(&t, &w);
    v.set(0, t.pi_pow(-1));
    let h = InducedFunction::single(&t, TreeVertex::origin(), v);
    let c = check_counterexample(&t, &w, &h, &s).unwrap();
    assert!(!c.h_integral && !c.image_integral && !c.verdict);
}

#[test]
fn power_sums() {
    for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)] {
        let t = tower(p, f, 1, 6);
        let q = t.q();
        for (s, (a, b)) in power_sum_identities(&t).into_iter().enumerate() {
            assert!(a && b, "q={q} σ={s}");
        }
        // the second sum is exactly 0 unless q − 2 ≡ 0 mod q − 1
        let expect = if q == 2 { t.from_int(2) } else { t.zero() };
        assert!(t.eq_at_precision(&teichmuller_power_sum(&t, 0, q - 2), &expect));
    }
}

#[test]
fn theta_weight_zero() {
    let t = tower(3, 1, 1, 12);
    let w = WeightProfile::new(&t, vec![0]).unwrap();
    let r = theta_kernel_probe(&t, &w, &satake(&t, 1), 1, &ProbeLimits::default()).unwrap();
    assert!(r.verdict);
    assert_eq!(r.certificate["dense_cross_check"], true);
    assert!(r.precision_margin > 0);
}

#[test]
fn theta_holding_config() {
    let t = tower(3, 2, 1, 12);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    let s = satake(&t, 1);
    let r = theta_kernel_probe(&t, &w, &s, 2, &ProbeLimits::default()).unwrap();
    assert!(r.verdict);
    assert!(containment_oracle(&t, &w, &s, 2));
}

#[test]
fn theta_failing_config_has_certificate() {
    let t = tower(3, 1, 2, 12);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    let s = satake(&t, 2);
    let r = theta_kernel_probe(&t, &w, &s, 1, &ProbeLimits::default()).unwrap();
    assert!(!r.verdict);
    assert!(!containment_oracle(&t, &w, &s, 1));
    assert_eq!(r.certificate["violating"]["check"]["verdict"], true);
    assert_eq!(r.certificate["known_counterexample"]["case"], "repeated_class");
    assert_eq!(r.certificate["known_counterexample"]["check"]["verdict"], true);
    assert_eq!(r.certificate["dense_cross_check"], false);

    // the textual certificate parses back and re-checks
    let terms: Vec<hecke_lattice::induction::TermText> = serde_json::from_value(r.certificate["violating"]["h"].clone()).unwrap();
    let h = InducedFunction::from_text(&t, &w, &terms).unwrap();
    assert!(check_counterexample(&t, &w, &h, &s).unwrap().verdict);
}

#[test]
fn theta_agrees_with_residue_oracle() {
    let cases: Vec<(u64, u32, u32, Vec<Vec<u32>>, usize)> = vec![
        (2, 1, 1, vec![vec![0], vec![1], vec![2], vec![3]], 2),
        (3, 1, 1, vec![vec![1], vec![2], vec![3], vec![4]], 2),
        (5, 1, 1, vec![vec![2], vec![4], vec![5]], 1),
        (2, 2, 1, vec![vec![1, 1], vec![2, 0], vec![1, 2]], 1),
        (3, 1, 2, vec![vec![2, 0], vec![1, 1], vec![0, 3]], 1),
    ];
    for (p, f, e, ds, n) in cases {
        let t = tower(p, f, e, 12);
        for d in ds {
            let w = WeightProfile::new(&t, d.clone()).unwrap();
            for k in [1, 2] {
                let s = satake(&t, k);
                let r = theta_kernel_probe(&t, &w, &s, n, &ProbeLimits::default()).unwrap();
                assert_eq!(r.verdict, containment_oracle(&t, &w, &s, n), "p={p} f={f} e={e} d={d:?} k={k}");
                if theorem_conditions(&w, p).verdict {
                    assert!(r.verdict, "p={p} f={f} e={e} d={d:?}");
                } else if n >= 2 || !matches!(build_counterexample(&t, &w, &s).unwrap().case, CounterexampleCase::SingleBoundary) {
                    assert!(!r.verdict, "p={p} f={f} e={e} d={d:?}");
                }
            }
        }
    }
}

#[test]
fn block_assembly_matches_direct_images() {
    for (p, f, e, d, n) in [(3, 1, 2, vec![1, 2], 2), (2, 2, 1, vec![1, 1], 2), (3, 2, 1, vec![2, 1], 1), (2, 1, 1, vec![3], 3)] {
        let t = tower(p, f, e, 10);
        let w = WeightProfile::new(&t, d).unwrap();
        let s = satake(&t, 1);
        let a = Assembly::new(&t, &w, Some(&s), n, 10_000).unwrap();
        let direct = direct_columns(&t, &w, &s, &a);
        let mut assembled = vec![vec![t.zero(); a.nrows()]; a.ncols()];
        for j in 0..a.ncols() {
            for (i, x) in a.column(j) {
                assembled[j][i] = t.add(&assembled[j][i], &x);
            }
        }
        for (x, y) in assembled.iter().flatten().zip(direct.iter().flatten()) {
            assert!(t.sub(x, y).is_zero());
        }
    }
}

#[test]
fn residue_only_decision_matches_full_elimination() {
    let residue_only = ProbeLimits { max_columns: 0, ..ProbeLimits::default() };
    let cases = [(3, 2, 1, vec![1, 1], 1, true), (3, 1, 2, vec![1, 1], 2, false), (5, 1, 1, vec![5], 1, false), (2, 2, 1, vec![0, 1], 1, true)];
    for (p, f, e, d, k, expect) in cases {
        let t = tower(p, f, e, 12);
        let w = WeightProfile::new(&t, d).unwrap();
        let s = satake(&t, k);
        let full = theta_kernel_probe(&t, &w, &s, 2, &ProbeLimits::default()).unwrap();
        let fast = theta_kernel_probe(&t, &w, &s, 2, &residue_only).unwrap();
        assert_eq!(full.verdict, expect);
        assert_eq!(fast.verdict, expect);
        assert!(fast.certificate.get("pivot_valuations").is_none());
        if !expect {
            assert_eq!(fast.certificate["violating"]["check"]["verdict"], true);
        }
    }
}

#[test]
fn injectivity_examples() {
    let lim = ProbeLimits::default();
    let t = tower(3, 1, 1, 12);
    let w0 = WeightProfile::new(&t, vec![0]).unwrap();
    let r = t_injectivity_probe(&t, &w0, 2, &lim).unwrap();
    assert!(r.verdict);
    assert_eq!(r.certificate["rank"], 26);
    let w = WeightProfile::new(&t, vec![2]).unwrap();
    assert!(t_injectivity_probe(&t, &w, 2, &lim).unwrap().verdict);
    for (p, f, e, d) in [(2, 2, 1, vec![1, 3]), (3, 1, 2, vec![4, 4]), (5, 1, 1, vec![6])] {
        let t = tower(p, f, e, 12);
        let w = WeightProfile::new(&t, d).unwrap();
        let r = t_injectivity_probe(&t, &w, 0, &lim).unwrap();
        assert!(r.verdict);
        assert_eq!(r.certificate["unpivoted_columns"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn size_cap_is_enforced() {
    let t = tower(5, 2, 1, 12);
    let w = WeightProfile::new(&t, vec![4, 4]).unwrap();
    let lim = ProbeLimits { max_columns: 1000, ..ProbeLimits::default() };
    assert!(matches!(t_injectivity_probe(&t, &w, 2, &lim), Err(Error::SizeCapExceeded(_))));
}

#[test]
fn separation_holds_with_descent() {
    let t = tower(3, 2, 1, 12);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    let s = satake(&t, 1);
    let opts = SeparationOptions { n_max: 3, samples: 3, seed: 7 };
    let r = separation_probe(&t, &w, &s, 2, &opts, &ProbeLimits::default()).unwrap();
    assert!(r.verdict, "{}", r.certificate);
    assert_eq!(r.certificate["certified_levels"], 3);
    assert!(r.precision_margin > 0);

    // mod-π solvability of each sample, decided independently by residue ranks
    let a = Assembly::new(&t, &w, Some(&s), 2, ProbeLimits::default().max_columns).unwrap();
    let cols = residue_columns(&t, &w, &s, &a);
    let base = residue_rank(&t, a.nrows(), &cols);
    let samples = r.certificate["samples"].as_array().unwrap();
    let first = &samples[0];
    assert_eq!(first["sample"], "identity");
    let mut e0 = LatticeVector::zeros(&t, &w);
    e0.set(0, t.one());
    let h = a.row_vector(&t, &InducedFunction::single(&t, TreeVertex::origin(), e0)).unwrap();
    let mut ext = cols.clone();
    ext.push(h.iter().map(|x| t.residue(x).unwrap()).collect());
    let solvable = residue_rank(&t, a.nrows(), &ext) == base;
    assert_eq!(first["levels"][1]["solvable"], solvable);
    for smp in samples.iter().filter(|x| x["sample"].as_str().unwrap().starts_with("image")) {
        assert_eq!(smp["levels"][1]["solvable"], true);
    }
}

#[test]
fn separation_guards() {
    let t = tower(3, 1, 2, 12);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    let lim = ProbeLimits::default();
    let opts = SeparationOptions::default();
    assert!(matches!(separation_probe(&t, &w, &satake(&t, 1), 2, &opts, &lim), Err(Error::NotApplicable(_))));
    let t = tower(3, 2, 1, 6);
    let w = WeightProfile::new(&t, vec![1, 1]).unwrap();
    let e = separation_probe(&t, &w, &satake(&t, 1), 2, &opts, &lim).unwrap_err();
    assert!(matches!(e, Error::PrecisionLoss(ref m) if m.contains("raise")));
}

#[test]
fn image_samples_are_trivially_consistent() {
    // h = (T − a_p)g with g integral: the back-substituted solution is g itself
    let t = tower(3, 1, 1, 12);
    let w = WeightProfile::new(&t, vec![1]).unwrap();
    let s = satake(&t, 1);
    let a = Assembly::new(&t, &w, Some(&s), 1, ProbeLimits::default().max_columns).unwrap();
    let mut g = InducedFunction::zero();
    let mut v = LatticeVector::zeros(&t, &w);
    v.set(1, t.one());
    g.add_term(&t, TreeVertex::alpha(), v.clone());
    g.add_term(&t, TreeVertex::origin(), v);
    let img = hecke_t(&t, &w, &g, Some(&s)).unwrap();
    assert!(a.row_vector(&t, &img).is_ok());
}

#[test]
fn probe_reports_serialize() {
    let t = tower(3, 1, 1, 12);
    let w = WeightProfile::new(&t, vec![4]).unwrap();
    let r = counterexample_probe(&t, &w, &satake(&t, 1)).unwrap();
    assert!(r.verdict);
    let json = serde_json::to_string(&r).unwrap();
    assert!(!json.contains("wall_time_ms"));
    let back: ProbeReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(serde_json::to_value(r.mode).unwrap(), "counterexample");
}

#[test]
fn small_sweep() {
    let spec = SweepSpec { primes: vec![3], residue_degrees: vec![1], max_weight: 3, ..SweepSpec::default() };
    let rep = sweep(&spec).unwrap();
    // (3,1,1): 4 rows; (3,1,2): 16 rows
    assert_eq!(rep.summary.rows, 20);
    assert_eq!(rep.summary.vandermonde_mismatches, 0);
    assert_eq!(rep.summary.det_mismatches, 0);
    assert_eq!(rep.summary.counterexamples, rep.summary.counterexamples_verified);
    assert_eq!(rep.summary.theta_probes, rep.summary.theta_contained);
    assert_eq!(rep.summary.theta_probes + rep.summary.probes_skipped, rep.summary.criterion_true);
    let again = sweep(&spec).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), serde_json::to_string(&rep).unwrap());

    let rep = sweep(&SweepSpec { primes: vec![], ..SweepSpec::default() }).unwrap();
    assert!(rep.rows.is_empty());
    let e = sweep(&SweepSpec { max_rows: 10, ..spec }).unwrap_err();
    assert!(matches!(e, Error::SizeCapExceeded(_)));
}
