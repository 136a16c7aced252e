use serde::{Deserialize, Serialize};

use crate::arith::{EScalar, FqElem, Tower, Valuation};
use crate::criterion::theorem_conditions;
use crate::error::{precision, Error, Result};
use crate::induction::{hecke_t, is_integral_fn, InducedFunction, SatakeData};
use crate::rep::{LatticeVector, WeightProfile};
use crate::tree::{DigitString, TreeVertex};

/// Which construction produced a counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleCase {
    /// Two positive-weight embeddings agree on Teichmüller digits.
    RepeatedClass,
    /// Several classes, and some `d_σ ≥ p^{v_σ}`.
    GapOverflow,
    /// A single positive weight `d_σ ≥ q + 1`.
    SingleLarge,
    /// A single positive weight `d_σ = q`; the function lives on two levels.
    SingleBoundary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub case: CounterexampleCase,
    /// The embedding the construction is centred on.
    pub sigma: usize,
    /// The partner embedding, when there is one.
    pub tau: Option<usize>,
    /// The denominator `δ`.
    pub delta: EScalar,
    pub h: InducedFunction,
}

/// Outcome of [`check_counterexample`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleCheck {
    pub h_integral: bool,
    pub image_integral: bool,
    /// `h` is not integral while `(T − a_p)h` is.
    pub verdict: bool,
}

/// The one of `base` and `a_p` with smaller valuation, ties going to `a_p`.
pub fn choose_delta(t: &Tower, base: &EScalar, s: &SatakeData) -> Result<EScalar> {
    let vb = t.val_pi(base).finite().expect("base denominator is a nonzero scalar");
    match t.val_pi(s.a_p()) {
        Valuation::Finite(v) if v <= vb => Ok(s.a_p().clone()),
        Valuation::Finite(_) | Valuation::Infinite => Ok(base.clone()),
        Valuation::AtLeast(v) if v > vb => Ok(base.clone()),
        Valuation::AtLeast(_) => precision("cannot compare val(a_p) with the base denominator"),
    }
}

fn sign(t: &Tower, k: u64) -> EScalar {
    t.from_int(if k % 2 == 0 { 1 } else { -1 })
}

fn unit_vector(t: &Tower, w: &WeightProfile, s: usize, k: u32, c: EScalar) -> Result<LatticeVector> {
    LatticeVector::basis(t, w, &w.unit_index(s, k), c)
}

/// Builds an `h ∉ ind ρ⁰` with `(T − a_p)h ∈ ind ρ⁰`, for weights failing
/// the criterion.
pub fn build_counterexample(t: &Tower, w: &WeightProfile, s: &SatakeData) -> Result<Counterexample> {
    let report = theorem_conditions(w, t.p());
    if report.verdict {
        return Err(Error::NotApplicable("the weights satisfy the criterion; no counterexample exists".into()));
    }
    let pi = t.pi_pow(1);
    let q = t.q();
    if let Some(l) = report.witness_i {
        let (sigma, tau) = (w.class(l)[0], w.class(l)[1]);
        let delta = choose_delta(t, &pi, s)?;
        let di = t.inv(&delta)?;
        let v = unit_vector(t, w, sigma, 1, di.clone())?.sub(t, &unit_vector(t, w, tau, 1, di)?);
        let h = InducedFunction::single(t, TreeVertex::origin(), v);
        return Ok(Counterexample { case: CounterexampleCase::RepeatedClass, sigma, tau: Some(tau), delta, h });
    }
    let sigma = report.witness_ii.expect("a failing criterion has a witness");
    if w.s_plus().len() >= 2 {
        let vs = w.v(sigma).unwrap();
        let pv = t.p().pow(vs);
        let f = w.residue_degree();
        let tau = w.class(((w.gamma(sigma) + vs) % f) as usize)[0];
        let delta = choose_delta(t, &pi, s)?;
        let di = t.inv(&delta)?;
        let v1 = unit_vector(t, w, sigma, pv as u32, t.mul(&sign(t, pv), &di))?;
        let v2 = unit_vector(t, w, tau, 1, di)?;
        let h = InducedFunction::single(t, TreeVertex::origin(), v1.add(t, &v2));
        return Ok(Counterexample { case: CounterexampleCase::GapOverflow, sigma, tau: Some(tau), delta, h });
    }
    let d = w.weight(sigma) as u64;
    if d > q {
        let delta = choose_delta(t, &pi, s)?;
        let di = t.inv(&delta)?;
        let v = unit_vector(t, w, sigma, 1, di.clone())?
            .add(t, &unit_vector(t, w, sigma, q as u32, t.mul(&sign(t, q), &di))?);
        let h = InducedFunction::single(t, TreeVertex::origin(), v);
        return Ok(Counterexample { case: CounterexampleCase::SingleLarge, sigma, tau: None, delta, h });
    }
    debug_assert_eq!(d, q);
    let delta = choose_delta(t, t.sigma_pi(sigma), s)?;
    let di = t.inv(&delta)?;
    let odd = t.p() != 2;
    let (q32, one) = (q as u32, t.one());
    let e = |k: u32, c: &EScalar| unit_vector(t, w, sigma, k, c.clone());
    let pair = if odd { e(1, &one)?.sub(t, &e(q32, &one)?) } else { e(1, &one)?.add(t, &e(q32, &one)?).neg(t) };
    let tail = if odd { e(0, &one)?.sub(t, &e(q32 - 1, &one)?) } else { e(0, &one)?.add(t, &e(q32 - 1, &one)?) };
    let mut h = InducedFunction::single(t, TreeVertex::origin(), tail.scale(t, &t.mul(&di, &t.from_int(q as i64 - 1))));
    for lam in t.fq_elements() {
        let c = t.pow(&t.embed_scalar(sigma, &t.teich(lam)), q - 2);
        let u = TreeVertex::new(0, DigitString::new(vec![FqElem(0), lam]));
        h.add_term(t, u, pair.scale(t, &t.mul(&di, &c)));
    }
    Ok(Counterexample { case: CounterexampleCase::SingleBoundary, sigma, tau: None, delta, h })
}

/// Checks `h ∉ ind ρ⁰` and `(T − a_p)h ∈ ind ρ⁰`.
pub fn check_counterexample(
    t: &Tower,
    w: &WeightProfile,
    h: &InducedFunction,
    s: &SatakeData,
) -> Result<CounterexampleCheck> {
    let h_integral = is_integral_fn(t, h)?;
    let image_integral = is_integral_fn(t, &hecke_t(t, w, h, Some(s))?)?;
    Ok(CounterexampleCheck { h_integral, image_integral, verdict: !h_integral && image_integral })
}

/// `Σ_{λ ∈ I₁} σ([λ])^k`, with `0^0 = 1`.
pub fn teichmuller_power_sum(t: &Tower, sigma: usize, k: u64) -> EScalar {
    t.fq_elements().fold(t.zero(), |acc, lam| t.add(&acc, &t.pow(&t.embed_scalar(sigma, &t.teich(lam)), k)))
}

/// The two sums the boundary construction relies on:
/// `Σ σ([λ])^{2q−2} = q − 1` and `p | Σ σ([λ])^{q−2}`, for every embedding.
pub fn power_sum_identities(t: &Tower) -> Vec<(bool, bool)> {
    let q = t.q();
    let e = t.e() as i64;
    (0..t.degree())
        .map(|s| {
            let first = t.eq_at_precision(&teichmuller_power_sum(t, s, 2 * q - 2), &t.from_int(q as i64 - 1));
            let second = match t.val_pi(&teichmuller_power_sum(t, s, q - 2)) {
                Valuation::Finite(v) => v >= e,
                _ => true,
            };
            (first, second)
        })
        .collect()
}
