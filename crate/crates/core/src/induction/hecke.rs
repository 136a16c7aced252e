use super::{from_pair, InducedFunction, SatakeData};
use crate::arith::{EScalar, Tower, Valuation};
use crate::error::{precision, Result};
use crate::rep::{act_kz, conjugated_step, psi_alpha_inv, KZElement, LatticeVector, WeightProfile};
use crate::tree::{DigitString, GMatrix, TreeVertex};

/// `T⁺`: every term spawns `q` terms one level further out on its side.
pub fn t_plus(t: &Tower, w: &WeightProfile, f: &InducedFunction) -> Result<InducedFunction> {
    let wk = KZElement::w(t);
    let mut out = InducedFunction::zero();
    for (u, v) in f.terms() {
        // ψ(α^{-1})∘ρ⁰(w_λ w) = ρ⁰(w)∘(ρ⁰(w)∘ψ(α^{-1})∘ρ⁰(w_λ))∘ρ⁰(w)
        let src = if u.side() == 0 { v.clone() } else { act_kz(t, &wk, v, w) };
        for lam in t.fq_elements() {
            let mut img = conjugated_step(t, &src, &t.teich(lam), w);
            if u.side() == 1 {
                img = act_kz(t, &wk, &img, w);
            }
            out.add_term(t, TreeVertex::new(u.side(), u.digits().push(lam)), img);
        }
    }
    Ok(out)
}

/// `([μ]_{n−1} − μ)/π^{n−1}`, certified to be `−[μ_{n−1}]`.
fn top_digit_shift(t: &Tower, mu: &DigitString) -> Result<EScalar> {
    let n = mu.len();
    let head = mu.truncate(n - 1)?;
    let c = t.div(&t.sub(&head.value(t), &mu.value(t)), &t.pi_pow(n as i64 - 1))?;
    let top = t.teich(mu.digits()[n - 1]);
    if !t.add(&c, &top).is_zero() {
        return precision("truncation shift is not a Teichmüller digit at working precision");
    }
    Ok(t.neg(&top))
}

/// `T⁻`: every term moves one level inward, or across the base edge at level 0.
pub fn t_minus(t: &Tower, w: &WeightProfile, f: &InducedFunction) -> Result<InducedFunction> {
    let wk = KZElement::w(t);
    let mut out = InducedFunction::zero();
    for (u, v) in f.terms() {
        let n = u.level();
        let (target, img) = match (u.side(), n) {
            (0, 0) => (TreeVertex::alpha(), psi_alpha_inv(t, v, w)),
            (1, 0) => (TreeVertex::origin(), act_kz(t, &wk, &psi_alpha_inv(t, &act_kz(t, &wk, v, w), w), w)),
            (side, _) => {
                let c = top_digit_shift(t, u.digits())?;
                let wc = KZElement::w_lambda(t, &c)?;
                let img = if side == 0 {
                    act_kz(t, &wk.mul(t, &wc), &psi_alpha_inv(t, v, w), w)
                } else {
                    act_kz(t, &wc, &psi_alpha_inv(t, &act_kz(t, &wk, v, w), w), w)
                };
                (TreeVertex::new(side, u.digits().truncate(n - 1)?), img)
            }
        };
        out.add_term(t, target, img);
    }
    Ok(out)
}

/// `T = T⁺ + T⁻` by the closed formulas; with `s`, returns `(T − a_p)(f)`.
pub fn hecke_t(t: &Tower, w: &WeightProfile, f: &InducedFunction, s: Option<&SatakeData>) -> Result<InducedFunction> {
    let mut out = t_plus(t, w, f)?;
    out.add_assign(t, &t_minus(t, w, f)?);
    if let Some(s) = s {
        out.add_assign(t, &f.scale(t, &t.neg(s.a_p())));
    }
    Ok(out)
}

/// `ψ(y)(v)` for `ψ` supported on `KZα^{-1}KZ` with `ψ(α^{-1}) = U_d⃗`,
/// via `π^z y = κ_L·α·κ_R` and `α = π·w α^{-1} w`. Zero off the support.
pub fn psi_of(t: &Tower, w: &WeightProfile, y: &GMatrix, v: &LatticeVector) -> Result<LatticeVector> {
    let Some(z) = y.entries().iter().filter(|x| !x.is_zero()).filter_map(EScalar::exponent).min() else {
        return precision("matrix vanishes at working precision");
    };
    let sc = t.pi_pow(-z);
    let [a, b, c, d] = y.entries().clone().map(|x| t.mul(&x, &sc));
    let det = t.sub(&t.mul(&a, &d), &t.mul(&b, &c));
    match t.val_pi(&det) {
        Valuation::Finite(1) => {}
        Valuation::Finite(_) => return Ok(LatticeVector::zeros(t, w)),
        _ => return precision("determinant valuation cannot be certified"),
    }
    // Bring a unit entry to the top-left corner: y' = P_L·y·P_R.
    let is_unit = |x: &EScalar| t.val_pi(x) == Valuation::Finite(0);
    let (swap_l, swap_r) = if is_unit(&a) {
        (false, false)
    } else if is_unit(&b) {
        (false, true)
    } else if is_unit(&c) {
        (true, false)
    } else if is_unit(&d) {
        (true, true)
    } else {
        return precision("no certified unit entry");
    };
    let mut m = [a, b, c, d];
    if swap_l {
        m = [m[2].clone(), m[3].clone(), m[0].clone(), m[1].clone()];
    }
    if swap_r {
        m = [m[1].clone(), m[0].clone(), m[3].clone(), m[2].clone()];
    }
    let [a, b, c, _] = &m;
    // y' = [[1,0],[c/a,1]]·diag(1,π)·diag(a, det/(aπ))·[[1,b/a],[0,1]]
    let ai = t.inv(a)?;
    let wk = KZElement::w(t);
    let lower = KZElement::new(t, t.one(), t.zero(), t.mul(c, &ai), t.one(), 0)?;
    let second = t.div(&t.mul(&det, &ai), &t.pi_pow(1))?;
    let right = KZElement::diag(t, a, &second)?.mul(t, &KZElement::upper(t, &t.mul(b, &ai))?);
    let kl = if swap_l { wk.mul(t, &lower) } else { lower };
    let kr = if swap_r { right.mul(t, &wk) } else { right };
    let inner = act_kz(t, &wk.mul(t, &kr), v, w);
    Ok(act_kz(t, &kl.mul(t, &wk), &psi_alpha_inv(t, &inner, w), w))
}

/// The convolution `T([g, v]) = Σ_x [gx, ψ(x^{-1})v]` over the `q + 1`
/// neighbours `x·KZ` of the origin. Used as an oracle for [`hecke_t`].
pub fn hecke_generic(t: &Tower, w: &WeightProfile, f: &InducedFunction) -> Result<InducedFunction> {
    let mut nbrs = vec![t.g_alpha()];
    for lam in t.fq_elements() {
        nbrs.push(t.vertex_matrix(&TreeVertex::new(0, DigitString::new(vec![lam]))));
    }
    let inverses = nbrs.iter().map(|x| t.g_inverse(x)).collect::<Result<Vec<_>>>()?;
    let mut out = InducedFunction::zero();
    for (u, v) in f.terms() {
        let g = t.vertex_matrix(u);
        for (x, xi) in nbrs.iter().zip(&inverses) {
            let img = psi_of(t, w, xi, v)?;
            out.add_assign(t, &from_pair(t, w, &t.g_mul(&g, x), &img)?);
        }
    }
    Ok(out)
}
