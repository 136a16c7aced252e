use std::fmt;

use super::{DigitString, TreeVertex};
use crate::arith::{EScalar, Tower, Valuation};
use crate::error::{precision, Error, Result};
use crate::rep::KZElement;

/// An element of `GL₂(F)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMatrix {
    pub(crate) m: [EScalar; 4],
}

impl GMatrix {
    pub fn new(t: &Tower, a: EScalar, b: EScalar, c: EScalar, d: EScalar) -> Result<GMatrix> {
        let g = GMatrix { m: [a, b, c, d] };
        if t.det(&g).is_zero() {
            return Err(Error::NotInvertible("determinant vanishes at working precision".into()));
        }
        Ok(g)
    }

    pub fn entries(&self) -> &[EScalar; 4] {
        &self.m
    }
}

impl fmt::Display for GMatrix {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(out, "[[{a:?}, {b:?}], [{c:?}, {d:?}]]")
    }
}

impl Tower {
    pub fn g_identity(&self) -> GMatrix {
        GMatrix { m: [self.one(), self.zero(), self.zero(), self.one()] }
    }

    /// `α = [[1, 0], [0, π]]`.
    pub fn g_alpha(&self) -> GMatrix {
        GMatrix { m: [self.one(), self.zero(), self.zero(), self.pi_pow(1)] }
    }

    /// `β = [[0, 1], [π, 0]]`.
    pub fn g_beta(&self) -> GMatrix {
        GMatrix { m: [self.zero(), self.one(), self.pi_pow(1), self.zero()] }
    }

    /// `π^k` times the identity.
    pub fn g_central(&self, k: i64) -> GMatrix {
        GMatrix { m: [self.pi_pow(k), self.zero(), self.zero(), self.pi_pow(k)] }
    }

    pub fn g_from_kz(&self, k: &KZElement) -> GMatrix {
        let z = self.pi_pow(k.center());
        GMatrix { m: k.entries().clone().map(|x| self.mul(&x, &z)) }
    }

    pub fn g_mul(&self, x: &GMatrix, y: &GMatrix) -> GMatrix {
        let [a, b, c, d] = &x.m;
        let [e, f, g, h] = &y.m;
        let dot = |p: &EScalar, q: &EScalar, r: &EScalar, s: &EScalar| self.add(&self.mul(p, q), &self.mul(r, s));
        GMatrix { m: [dot(a, e, b, g), dot(a, f, b, h), dot(c, e, d, g), dot(c, f, d, h)] }
    }

    pub fn det(&self, g: &GMatrix) -> EScalar {
        let [a, b, c, d] = &g.m;
        self.sub(&self.mul(a, d), &self.mul(b, c))
    }

    pub fn g_inverse(&self, g: &GMatrix) -> Result<GMatrix> {
        let [a, b, c, d] = &g.m;
        let di = self.inv(&self.det(g))?;
        Ok(GMatrix { m: [self.mul(d, &di), self.neg(&self.mul(b, &di)), self.neg(&self.mul(c, &di)), self.mul(a, &di)] })
    }

    pub fn g_eq_at_precision(&self, x: &GMatrix, y: &GMatrix) -> bool {
        x.m.iter().zip(&y.m).all(|(a, b)| self.eq_at_precision(a, b))
    }

    /// The representative `g⁰_{n,μ} = [[π^n, μ], [0, 1]]` or
    /// `g¹_{n,μ} = [[1, 0], [πμ, π^{n+1}]]`.
    pub fn vertex_matrix(&self, v: &TreeVertex) -> GMatrix {
        let n = v.level() as i64;
        let mu = v.digits().value(self);
        if v.side() == 0 {
            GMatrix { m: [self.pi_pow(n), mu, self.zero(), self.one()] }
        } else {
            GMatrix { m: [self.one(), self.zero(), self.mul(&self.pi_pow(1), &mu), self.pi_pow(n + 1)] }
        }
    }

    /// The first `n` Teichmüller digits of an integral `x`.
    pub fn teich_digits(&self, x: &EScalar, n: usize) -> Result<DigitString> {
        let pi = self.pi_pow(1);
        let mut r = x.clone();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let d = self.residue(&r)?;
            out.push(d);
            r = self.div(&self.sub(&r, &self.teich(d)), &pi)?;
        }
        Ok(DigitString::new(out))
    }

    /// Writes `g = vertex_matrix(v)·κ` with `κ ∈ KZ`, and returns `(v, κ)`.
    pub fn cartan_reduce(&self, g: &GMatrix) -> Result<(TreeVertex, KZElement)> {
        let z = min_certified_exponent(self, &g.m)?;
        let scale = self.pi_pow(-z);
        let h = GMatrix { m: g.m.clone().map(|x| self.mul(&x, &scale)) };
        let n_det = match self.val_pi(&self.det(&h)) {
            Valuation::Finite(v) => v,
            _ => return Err(Error::NotInvertible("determinant vanishes at working precision".into())),
        };
        if n_det >= self.cap() as i64 {
            return precision(format!("determinant valuation {n_det} exceeds the working precision"));
        }
        let [a, b, c, d] = &h.m;
        let unit = |x: &EScalar| -> Result<bool> {
            match self.val_pi(x) {
                Valuation::Finite(v) => Ok(v == 0),
                Valuation::AtLeast(v) if v >= 1 => Ok(false),
                Valuation::Infinite => Ok(false),
                _ => precision("cannot decide whether an entry is a unit"),
            }
        };
        let vertex = if unit(d)? || unit(c)? {
            let (x, y) = if unit(d)? { (b, d) } else { (a, c) };
            let ratio = self.div(x, y)?;
            TreeVertex::new(0, self.teich_digits(&ratio, n_det as usize)?)
        } else {
            let (x, y) = if unit(a)? { (c, a) } else { (d, b) };
            let ratio = self.div(&self.div(x, y)?, &self.pi_pow(1))?;
            TreeVertex::new(1, self.teich_digits(&ratio, n_det as usize - 1)?)
        };
        let v = self.vertex_matrix(&vertex);
        let kappa = self.g_mul(&self.g_inverse(&v)?, &h);
        let [ka, kb, kc, kd] = kappa.m.clone();
        let k = KZElement::new(self, ka, kb, kc, kd, z).map_err(|e| match e {
            Error::NotInvertible(m) => Error::PrecisionLoss(format!("reduction failed to certify: {m}")),
            other => other,
        })?;
        if !self.g_eq_at_precision(&self.g_mul(&v, &self.g_from_kz(&k)), g) {
            return precision("re-multiplication check failed");
        }
        Ok((vertex, k))
    }
}

/// The least valuation among the entries, certified against undetermined
/// zeros that might be smaller.
fn min_certified_exponent(t: &Tower, m: &[EScalar; 4]) -> Result<i64> {
    let mut best: Option<i64> = None;
    let mut floor = i64::MAX;
    for x in m {
        match t.val_pi(x) {
            Valuation::Finite(v) => best = Some(best.map_or(v, |b| b.min(v))),
            Valuation::AtLeast(v) => floor = floor.min(v),
            Valuation::Infinite => {}
        }
    }
    match best {
        Some(b) if b <= floor => Ok(b),
        Some(_) => precision("an undetermined entry may have smaller valuation"),
        None => Err(Error::NotInvertible("matrix is zero at working precision".into())),
    }
}
