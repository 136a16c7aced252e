use num_bigint::BigUint;

use super::{LatticeVector, MultiIndex, WeightProfile};
use crate::arith::{EScalar, Tower, Valuation};
use crate::error::{Error, Result};

/// An element `κ·π^z` of `KZ`: `κ ∈ GL₂(O_F)` and a central power of `π`,
/// which acts trivially on the lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KZElement {
    pub(crate) m: [EScalar; 4],
    pub(crate) z: i64,
}

impl KZElement {
    /// `[[a, b], [c, d]]·π^z`, checked to lie in `GL₂(O_F)·π^ℤ`.
    pub fn new(t: &Tower, a: EScalar, b: EScalar, c: EScalar, d: EScalar, z: i64) -> Result<KZElement> {
        for x in [&a, &b, &c, &d] {
            if !t.is_integral(x)? {
                return Err(Error::NotInvertible("entry is not integral".into()));
            }
        }
        let det = t.sub(&t.mul(&a, &d), &t.mul(&b, &c));
        match t.val_pi(&det) {
            Valuation::Finite(0) => Ok(KZElement { m: [a, b, c, d], z }),
            Valuation::Finite(_) => Err(Error::NotInvertible("determinant is not a unit".into())),
            _ => Err(Error::PrecisionLoss("determinant is zero to working precision".into())),
        }
    }

    pub fn identity(t: &Tower) -> KZElement {
        KZElement { m: [t.one(), t.zero(), t.zero(), t.one()], z: 0 }
    }

    /// `w = [[0, 1], [1, 0]]`.
    pub fn w(t: &Tower) -> KZElement {
        KZElement { m: [t.zero(), t.one(), t.one(), t.zero()], z: 0 }
    }

    /// `w_λ = [[0, 1], [1, −λ]]` for integral `λ`.
    pub fn w_lambda(t: &Tower, lam: &EScalar) -> Result<KZElement> {
        KZElement::new(t, t.zero(), t.one(), t.one(), t.neg(lam), 0)
    }

    /// Upper unipotent `[[1, b], [0, 1]]`.
    pub fn upper(t: &Tower, b: &EScalar) -> Result<KZElement> {
        KZElement::new(t, t.one(), b.clone(), t.zero(), t.one(), 0)
    }

    pub fn diag(t: &Tower, a: &EScalar, d: &EScalar) -> Result<KZElement> {
        KZElement::new(t, a.clone(), t.zero(), t.zero(), d.clone(), 0)
    }

    /// `[a, b, c, d]`, row-major.
    pub fn entries(&self) -> &[EScalar; 4] {
        &self.m
    }

    pub fn center(&self) -> i64 {
        self.z
    }

    pub fn mul(&self, t: &Tower, o: &KZElement) -> KZElement {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &o.m;
        let dot = |x: &EScalar, y: &EScalar, u: &EScalar, v: &EScalar| t.add(&t.mul(x, y), &t.mul(u, v));
        KZElement { m: [dot(a, e, b, g), dot(a, f, b, h), dot(c, e, d, g), dot(c, f, d, h)], z: self.z + o.z }
    }

    pub fn inverse(&self, t: &Tower) -> Result<KZElement> {
        let [a, b, c, d] = &self.m;
        let det = t.sub(&t.mul(a, d), &t.mul(b, c));
        let di = t.inv(&det)?;
        Ok(KZElement {
            m: [t.mul(d, &di), t.neg(&t.mul(b, &di)), t.neg(&t.mul(c, &di)), t.mul(a, &di)],
            z: -self.z,
        })
    }
}

/// `C(n, k)` exactly; weights are bounded so this fits in 64 bits.
pub(crate) fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n as u64 - i) / (i + 1);
    }
    r
}

/// `binom(i⃗, j⃗) = ∏_σ C(i_σ, j_σ)`.
pub fn multinomial(i: &MultiIndex, j: &MultiIndex) -> Result<BigUint> {
    if i.0.len() != j.0.len() || !j.le(i) {
        return Err(Error::ComponentOutOfRange(format!("{:?} is not ≤ {:?}", j.0, i.0)));
    }
    Ok(i.0.iter().zip(&j.0).fold(BigUint::from(1u32), |acc, (&a, &b)| acc * binomial(a, b)))
}

/// Reduces an exact non-negative integer into `E`.
pub fn scalar_from_biguint(t: &Tower, n: &BigUint) -> EScalar {
    let zero = BigUint::from(0u32);
    if *n == zero {
        return t.zero();
    }
    let p = BigUint::from(t.p());
    let mut v = 0i64;
    let mut u = n.clone();
    while &u % &p == zero {
        u /= &p;
        v += 1;
    }
    let m = BigUint::from(t.p().pow(t.precision()));
    let r = (u % m).to_u64_digits().first().copied().unwrap_or(0);
    t.mul(&t.from_int(r as i64), &t.pi_pow(v * t.e() as i64))
}

/// Applies one square matrix along axis `s` of the tensor:
/// `out[.., j, ..] = Σ_i mat[j][i] · v[.., i, ..]`.
fn apply_axis(t: &Tower, w: &WeightProfile, v: &[EScalar], s: usize, mat: &[EScalar]) -> Vec<EScalar> {
    let (n, stride) = w.axis(s);
    let block = n * stride;
    let mut out = vec![t.zero(); v.len()];
    for base in (0..v.len()).step_by(block) {
        for inner in 0..stride {
            for i in 0..n {
                let x = &v[base + i * stride + inner];
                if x.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let m = &mat[j * n + i];
                    if m.is_exact_zero() {
                        continue;
                    }
                    let k = base + j * stride + inner;
                    out[k] = t.add(&out[k], &t.mul(m, x));
                }
            }
        }
    }
    out
}

fn powers(t: &Tower, x: &EScalar, n: usize) -> Vec<EScalar> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = t.one();
    for _ in 0..=n {
        out.push(acc.clone());
        acc = t.mul(&acc, x);
    }
    out
}

/// Coefficients of `(a + cY)^k` for `k = 0..=n`.
fn binomial_rows(t: &Tower, a: &EScalar, c: &EScalar, n: usize) -> Vec<Vec<EScalar>> {
    let (pa, pc) = (powers(t, a, n), powers(t, c, n));
    (0..=n)
        .map(|k| {
            (0..=k)
                .map(|j| t.mul(&t.from_int(binomial(k as u32, j as u32) as i64), &t.mul(&pa[k - j], &pc[j])))
                .collect()
        })
        .collect()
}

/// The matrix of `Sym^n` of `[[a, b], [c, d]]` on `e_i = x^{n−i} y^i`:
/// `e_i ↦ (a x + c y)^{n−i} (b x + d y)^i`.
pub(crate) fn sym_matrix(t: &Tower, abcd: [&EScalar; 4], n: usize) -> Vec<EScalar> {
    let [a, b, c, d] = abcd;
    let first = binomial_rows(t, a, c, n);
    let second = binomial_rows(t, b, d, n);
    let mut mat = vec![t.zero(); (n + 1) * (n + 1)];
    for i in 0..=n {
        let (p1, p2) = (&first[n - i], &second[i]);
        for (j1, x) in p1.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j2, y) in p2.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let k = (j1 + j2) * (n + 1) + i;
                mat[k] = t.add(&mat[k], &t.mul(x, y));
            }
        }
    }
    mat
}

/// The untwisted action `ρ⁰(k)` on `⊗_σ Sym^{d_σ}`: each axis sees `σ(k)`.
pub fn act_kz(t: &Tower, k: &KZElement, v: &LatticeVector, w: &WeightProfile) -> LatticeVector {
    let mut coeffs = v.coeffs.clone();
    for &s in w.s_plus() {
        let e: Vec<EScalar> = k.m.iter().map(|x| t.embed_scalar(s, x)).collect();
        let mat = sym_matrix(t, [&e[0], &e[1], &e[2], &e[3]], w.weight(s) as usize);
        coeffs = apply_axis(t, w, &coeffs, s, &mat);
    }
    LatticeVector { coeffs }
}

/// `ψ(α^{-1})`: multiplies the coefficient at `i⃗` by `∏_σ σ(π)^{d_σ − i_σ}`.
pub fn psi_alpha_inv(t: &Tower, v: &LatticeVector, w: &WeightProfile) -> LatticeVector {
    let tables: Vec<Vec<EScalar>> = (0..w.num_embeddings())
        .map(|s| powers(t, t.sigma_pi(s), w.weight(s) as usize))
        .collect();
    let mut coeffs = v.coeffs.clone();
    for (k, c) in coeffs.iter_mut().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        let idx = w.unflatten(k);
        for &s in w.s_plus() {
            let e = (w.weight(s) - idx.0[s]) as usize;
            if e > 0 {
                *c = t.mul(c, &tables[s][e]);
            }
        }
    }
    LatticeVector { coeffs }
}

/// `ρ⁰(w) ∘ ψ(α^{-1}) ∘ ρ⁰(w_λ)` in closed form: the coefficient at `j⃗` is
/// `π^{j⃗} Σ_{i⃗ ≥ j⃗} c_{i⃗} binom(i⃗, j⃗) (−λ)^{i⃗ − j⃗}`. The sum factors over
/// the embeddings, which is how it is evaluated here.
pub fn conjugated_step(t: &Tower, v: &LatticeVector, lam: &EScalar, w: &WeightProfile) -> LatticeVector {
    let mut coeffs = v.coeffs.clone();
    let neg = t.neg(lam);
    for &s in w.s_plus() {
        let n = w.weight(s) as usize;
        let pi = powers(t, t.sigma_pi(s), n);
        let nl = powers(t, &t.embed_scalar(s, &neg), n);
        let mut mat = vec![t.zero(); (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=i {
                let c = t.from_int(binomial(i as u32, j as u32) as i64);
                mat[j * (n + 1) + i] = t.mul(&c, &t.mul(&pi[j], &nl[i - j]));
            }
        }
        coeffs = apply_axis(t, w, &coeffs, s, &mat);
    }
    LatticeVector { coeffs }
}
