//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hecke_lattice::arith::{EScalar, FieldConfig, FqElem, Tower};
use hecke_lattice::criterion::{bs_gate, theorem_conditions};
use hecke_lattice::induction::{act_g, hecke_generic, hecke_t, is_integral_fn, t_minus, t_plus, InducedFunction, SatakeData};
use hecke_lattice::rep::{act_kz, KZElement, LatticeVector, WeightProfile};
use hecke_lattice::tree::{enumerate_ball, DigitString, TreeVertex};
use hecke_lattice::verify::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn tower(p: u64, f: u32, e: u32, m: u32) -> Tower {
    Tower::new(FieldConfig::standard(p, f, e, m).unwrap())
}

fn satake(t: &Tower, k: i64) -> SatakeData {
    SatakeData::new(t, t.pi_pow(k)).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scalar(t: &Tower, rng: &mut ChaCha8Rng, min_exp: i64) -> EScalar {
    (0..3).fold(t.zero(), |acc, k| {
        let lam = FqElem(rng.gen_range(0..t.q() as u32));
        t.add(&acc, &t.mul(&t.teich(lam), &t.pi_pow(min_exp + k)))
    })
}

fn vector(t: &Tower, w: &WeightProfile, rng: &mut ChaCha8Rng, min_exp: i64) -> LatticeVector {
    LatticeVector::from_coeffs(w, (0..w.dim()).map(|_| scalar(t, rng, min_exp)).collect()).unwrap()
}

fn vertex(t: &Tower, rng: &mut ChaCha8Rng, max_level: usize) -> TreeVertex {
    let n = rng.gen_range(0..=max_level);
    let digits = (0..n).map(|_| FqElem(rng.gen_range(0..t.q() as u32))).collect();
    TreeVertex::new(rng.gen_range(0..2), DigitString::new(digits))
}

fn weights(t: &Tower, rng: &mut ChaCha8Rng) -> WeightProfile {
    WeightProfile::new(t, (0..t.degree()).map(|_| rng.gen_range(0..=4)).collect()).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let fields = [(2, 1, 1), (3, 1, 1), (3, 2, 1), (3, 1, 2), (5, 1, 1)];
    let (mut singles, mut sums) = (0, 0);
    for (p, f, e) in fields {
        let t = tower(p, f, e, 8);
        for k in 0..60 {
            let w = weights(&t, &mut rng);
            let terms = if k % 5 == 4 { 3 } else { 1 };
            let mut h = InducedFunction::zero();
            for _ in 0..terms {
                let min_exp = rng.gen_range(-1..=0);
                h.add_term(&t, vertex(&t, &mut rng, 2), vector(&t, &w, &mut rng, min_exp));
            }
            let a = hecke_t(&t, &w, &h, None).map_err(|e| e.to_string())?;
            let b = hecke_generic(&t, &w, &h).map_err(|e| e.to_string())?;
            ensure(a.eq_at_precision(&t, &b), || format!("mismatch at p={p} f={f} e={e} d={:?}", w.weights()))?;
            if terms == 1 {
                singles += 1;
            } else {
                sums += 1;
            }
        }
    }
    let el = start.elapsed();
    ensure(el < Duration::from_secs(120), || format!("took {el:?}"))?;
    Ok(format!("{singles} single terms and {sums} sums agree across 5 fields in {:.1}s", el.as_secs_f64()))
}

fn counterexample_suite() -> Outcome {
    let cases = [(3, 1, 2, vec![1, 1]), (3, 2, 1, vec![3, 1]), (3, 1, 1, vec![4]), (3, 1, 1, vec![3]), (2, 1, 1, vec![2])];
    let mut n = 0;
    for (p, f, e, d) in cases {
        let t = tower(p, f, e, 12);
        let w = WeightProfile::new(&t, d.clone()).unwrap();
        for k in [1, 2] {
            let s = satake(&t, k);
            let ce = build_counterexample(&t, &w, &s).map_err(|e| e.to_string())?;
            let c = check_counterexample(&t, &w, &ce.h, &s).map_err(|e| e.to_string())?;
            ensure(c.verdict, || format!("p={p} f={f} e={e} d={d:?} val(a_p)={k}: {c:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} counterexamples: h non-integral, (T - a_p)h integral"))
}

fn positive_direction(report: &SweepReport) -> Outcome {
    let mut slowest = Duration::ZERO;
    let mut n = 0;
    let lim = ProbeLimits::default();
    let mut run = |p: u64, f: u32, d: Vec<u32>| -> Result<(), String> {
        let t = tower(p, f, 1, 12);
        let w = WeightProfile::new(&t, d.clone()).unwrap();
        if !theorem_conditions(&w, p).verdict {
            return Ok(());
        }
        let start = Instant::now();
        let r = theta_kernel_probe(&t, &w, &satake(&t, 1), 2, &lim).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        n += 1;
        ensure(r.verdict, || format!("containment fails at p={p} f={f} d={d:?}"))
    };
    for a in 0..=2 {
        for b in 0..=2 {
            run(3, 2, vec![a, b])?;
        }
    }
    for a in 0..=4 {
        run(5, 1, vec![a])?;
    }
    ensure(slowest < Duration::from_secs(300), || format!("slowest probe took {slowest:?}"))?;
    let s = &report.summary;
    ensure(s.theta_probes == s.criterion_true, || {
        format!("only {} of {} criterion rows probed ({} above the size cap)", s.theta_probes, s.criterion_true, s.probes_skipped)
    })?;
    ensure(s.theta_probes == s.theta_contained, || format!("{} of {} sweep probes contained", s.theta_contained, s.theta_probes))?;
    Ok(format!(
        "{n} listed configs contained at N=2 (slowest {:.1}s); sweep: all {} criterion rows contained ({} decided mod pi only)",
        slowest.as_secs_f64(),
        s.criterion_true,
        s.theta_residue_only
    ))
}

fn vandermonde_equivalence(report: &SweepReport) -> Outcome {
    let s = &report.summary;
    ensure(s.vandermonde_mismatches == 0, || format!("{} Vandermonde mismatches", s.vandermonde_mismatches))?;
    ensure(s.det_mismatches == 0, || format!("{} determinant mismatches", s.det_mismatches))?;
    ensure(s.det_checked == s.rows, || format!("determinant evaluated on {} of {} rows", s.det_checked, s.rows))?;
    Ok(format!("{} rows, {} satisfying the criterion; node test and determinant agree on every row", s.rows, s.criterion_true))
}

fn structural_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57);
    let t = tower(3, 2, 1, 8);
    let wk = KZElement::w(&t);
    for _ in 0..100 {
        let w = weights(&t, &mut rng);
        let u = vertex(&t, &mut rng, 2);
        let u0 = TreeVertex::new(0, u.digits().clone());
        let v = vector(&t, &w, &mut rng, 0);
        let one = InducedFunction::single(&t, TreeVertex::new(1, u.digits().clone()), v.clone());
        let zero = InducedFunction::single(&t, u0, act_kz(&t, &wk, &v, &w));
        for op in [t_plus, t_minus] {
            let lhs = op(&t, &w, &one).map_err(|e| e.to_string())?;
            let rhs = act_g(&t, &w, &t.g_beta(), &op(&t, &w, &zero).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(lhs.eq_at_precision(&t, &rhs), || format!("beta conjugation fails at {u}"))?;
        }
    }
    let mut pairs = 0;
    for (p, f) in [(2, 2), (3, 1)] {
        let t = tower(p, f, 1, 6);
        let w = WeightProfile::new(&t, vec![1; f as usize]).unwrap();
        let ball = enumerate_ball(&t, 2);
        let supports: Vec<BTreeSet<TreeVertex>> = ball
            .iter()
            .map(|u| {
                let mut e = LatticeVector::zeros(&t, &w);
                e.set(0, t.one());
                t_plus(&t, &w, &InducedFunction::single(&t, u.clone(), e)).unwrap().support().cloned().collect()
            })
            .collect();
        for i in 0..ball.len() {
            for j in i + 1..ball.len() {
                ensure(supports[i].is_disjoint(&supports[j]), || format!("supports of {} and {} meet", ball[i], ball[j]))?;
                pairs += 1;
            }
        }
    }
    let t = tower(3, 1, 2, 8);
    for _ in 0..100 {
        let w = weights(&t, &mut rng);
        let mut h = InducedFunction::zero();
        for _ in 0..3 {
            h.add_term(&t, vertex(&t, &mut rng, 2), vector(&t, &w, &mut rng, 0));
        }
        let img = hecke_t(&t, &w, &h, None).map_err(|e| e.to_string())?;
        ensure(is_integral_fn(&t, &img).unwrap(), || format!("integrality lost at d={:?}", w.weights()))?;
    }
    let lim = ProbeLimits::default();
    let configs = [(2, 1, 1, vec![3]), (3, 1, 1, vec![2]), (3, 1, 2, vec![1, 2]), (2, 2, 1, vec![1, 1]), (5, 1, 1, vec![4])];
    for (p, f, e, d) in &configs {
        let t = tower(*p, *f, *e, 10);
        let w = WeightProfile::new(&t, d.clone()).unwrap();
        for n in 0..=3 {
            let r = t_injectivity_probe(&t, &w, n, &lim).map_err(|e| e.to_string())?;
            ensure(r.verdict, || format!("kernel at p={p} f={f} e={e} d={d:?} N={n}"))?;
        }
    }
    Ok(format!("100 beta-conjugations, {pairs} disjoint pairs, 100 integral images, injective to N=3 on 5 configs"))
}

fn power_sums() -> Outcome {
    for (p, f) in [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)] {
        let t = tower(p, f, 1, 8);
        for (s, (a, b)) in power_sum_identities(&t).into_iter().enumerate() {
            ensure(a && b, || format!("q={} embedding {s}", t.q()))?;
        }
    }
    Ok("q in {2, 3, 4, 5, 9}, every embedding".into())
}

fn gate_table() -> Outcome {
    // (p, f, d, val α, val β, expected); ef = f here.
    let rows: [(u64, u32, Vec<u32>, i64, i64, bool); 6] = [
        (3, 1, vec![1], 0, 2, true),   // unit α: val β = ef + Σd
        (3, 1, vec![1], 2, 0, true),   // unit β: val α = ef + Σd
        (3, 1, vec![1], 1, 1, true),   // central
        (3, 1, vec![1], 0, 1, false),  // valuations do not add up
        (3, 1, vec![1], -1, 3, false), // the sum holds but val β > ef + Σd
        (3, 2, vec![1, 1], 1, 3, true),
    ];
    for (p, f, d, a, b, expect) in rows {
        let cfg = FieldConfig::standard(p, f, 1, 6).unwrap();
        let w = WeightProfile::new(&Tower::new(cfg.clone()), d.clone()).unwrap();
        ensure(bs_gate(a, b, &w, &cfg) == expect, || format!("p={p} f={f} d={d:?} ({a}, {b})"))?;
    }
    Ok("6 rows".into())
}

fn determinism(first: &str) -> Outcome {
    let again = serde_json::to_string(&sweep(&SweepSpec::default()).map_err(|e| e.to_string())?).unwrap();
    ensure(again == first, || "sweep JSON differs between runs".into())?;
    Ok(format!("two full sweeps, {} bytes each, identical", first.len()))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(e) => Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()),
    }
}

fn main() {
    let report = sweep(&SweepSpec::default()).expect("default sweep runs");
    let json = serde_json::to_string(&report).unwrap();
    let results = [
        ("1 oracle equivalence", guarded(oracle_equivalence)),
        ("2 counterexample suite", guarded(counterexample_suite)),
        ("3 positive-direction probe", guarded(|| positive_direction(&report))),
        ("4 criterion/Vandermonde equivalence", guarded(|| vandermonde_equivalence(&report))),
        ("5 structural identities", guarded(structural_identities)),
        ("6 power sums", guarded(power_sums)),
        ("7 gate table", guarded(gate_table)),
        ("8 determinism", guarded(|| determinism(&json))),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(m) => println!("PASS {name}: {m}"),
            Err(m) => {
                failed += 1;
                println!("FAIL {name}: {m}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
