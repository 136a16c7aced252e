use super::{FqElem, LocalElem, Tower};
use crate::error::{precision, Error, Result};

/// The valuation of an [`EScalar`] in the `val_F` normalization, where
/// `val(π_E) = f` and `val(p) = e·f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Valuation {
    Finite(i64),
    /// The value is zero to the stated precision; its valuation is at least
    /// this much.
    AtLeast(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }
}

pub(crate) const EXACT: i64 = i64::MAX;

/// A capped-relative element of `E`: `π^exp · unit` where the unit is known
/// modulo `π^rel`.
///
/// A scalar with `rel = 0` is zero: exactly when `exp` is the exact-zero
/// marker, otherwise only known to lie in `π^exp·O_E`. Unit parts are kept
/// truncated, so derived equality is equality of values at equal precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EScalar {
    pub(crate) exp: i64,
    pub(crate) rel: u32,
    pub(crate) unit: LocalElem,
}

impl EScalar {
    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rel == 0 && self.exp == EXACT
    }

    /// For nonzero values, the `π`-adic exponent; for a zero `O(π^k)`, `k`.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_exact_zero() {
            None
        } else {
            Some(self.exp)
        }
    }

    pub fn relative_precision(&self) -> u32 {
        self.rel
    }

    /// The value is known modulo `π^k` for the returned `k` (`None` when exact zero).
    pub fn abs_precision(&self) -> Option<i64> {
        if self.is_exact_zero() {
            None
        } else {
            Some(self.exp + self.rel as i64)
        }
    }

    pub fn unit(&self) -> &LocalElem {
        &self.unit
    }
}

impl Tower {
    pub fn zero(&self) -> EScalar {
        EScalar { exp: EXACT, rel: 0, unit: self.local_zero() }
    }

    /// The inexact zero `O(π^k)`.
    pub fn zero_at(&self, k: i64) -> EScalar {
        EScalar { exp: k, rel: 0, unit: self.local_zero() }
    }

    pub fn one(&self) -> EScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> EScalar {
        if n == 0 {
            return self.zero();
        }
        let p = self.p as i64;
        let (mut v, mut u) = (0i64, n);
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        EScalar { exp: v * self.e as i64, rel: self.cap(), unit: self.local_from_int(u) }
    }

    /// `π^k`.
    pub fn pi_pow(&self, k: i64) -> EScalar {
        EScalar { exp: k, rel: self.cap(), unit: self.local_one() }
    }

    /// An element of `O_E` given modulo `π^{eM}`; zero becomes `O(π^{eM})`.
    pub fn from_local(&self, a: &LocalElem) -> EScalar {
        match self.local_val(a) {
            None => self.zero_at(self.cap() as i64),
            Some(v) => EScalar {
                exp: v as i64,
                rel: self.cap() - v,
                unit: self.local_truncate(&self.local_shr(a, v), self.cap() - v),
            },
        }
    }

    /// `π^exp·u` for a unit `u`, at full precision.
    pub fn from_unit(&self, exp: i64, u: &LocalElem) -> Result<EScalar> {
        if self.local_val(u) != Some(0) {
            return Err(Error::NotInvertible("unit part is not a unit".into()));
        }
        Ok(EScalar { exp, rel: self.cap(), unit: u.clone() })
    }

    /// The Teichmüller lift as a scalar; `[0]` is an exact zero.
    pub fn teich(&self, x: FqElem) -> EScalar {
        if x.0 == 0 {
            self.zero()
        } else {
            EScalar { exp: 0, rel: self.cap(), unit: self.local_teich(x) }
        }
    }

    /// Lowers the absolute precision to `k`.
    pub fn with_abs_precision(&self, a: &EScalar, k: i64) -> EScalar {
        if a.is_exact_zero() {
            return self.zero_at(k);
        }
        if a.rel == 0 {
            return self.zero_at(a.exp.min(k));
        }
        if k <= a.exp {
            return self.zero_at(k);
        }
        let rel = a.rel.min((k - a.exp).min(u32::MAX as i64) as u32);
        EScalar { exp: a.exp, rel, unit: self.local_truncate(&a.unit, rel) }
    }

    pub fn add(&self, a: &EScalar, b: &EScalar) -> EScalar {
        if a.is_exact_zero() {
            return b.clone();
        }
        if b.is_exact_zero() {
            return a.clone();
        }
        let prec = (a.exp + a.rel as i64).min(b.exp + b.rel as i64);
        match (a.rel, b.rel) {
            (0, 0) => self.zero_at(prec),
            (0, _) => self.with_abs_precision(b, prec),
            (_, 0) => self.with_abs_precision(a, prec),
            _ => {
                let (x, y) = if a.exp <= b.exp { (a, b) } else { (b, a) };
                let shift = y.exp - x.exp;
                let room = prec - x.exp;
                let sum = if shift >= room {
                    x.unit.clone()
                } else {
                    self.local_add(&x.unit, &self.local_shl(&y.unit, shift as u32))
                };
                match self.local_val(&sum) {
                    Some(k) if (k as i64) < room => {
                        let rel = (room - k as i64) as u32;
                        EScalar {
                            exp: x.exp + k as i64,
                            rel,
                            unit: self.local_truncate(&self.local_shr(&sum, k), rel),
                        }
                    }
                    _ => self.zero_at(prec),
                }
            }
        }
    }

    pub fn neg(&self, a: &EScalar) -> EScalar {
        if a.rel == 0 {
            return a.clone();
        }
        EScalar { exp: a.exp, rel: a.rel, unit: self.local_truncate(&self.local_neg(&a.unit), a.rel) }
    }

    pub fn sub(&self, a: &EScalar, b: &EScalar) -> EScalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &EScalar, b: &EScalar) -> EScalar {
        if a.is_exact_zero() || b.is_exact_zero() {
            return self.zero();
        }
        if a.rel == 0 || b.rel == 0 {
            return self.zero_at(a.exp + b.exp);
        }
        let rel = a.rel.min(b.rel);
        EScalar {
            exp: a.exp + b.exp,
            rel,
            unit: self.local_truncate(&self.local_mul(&a.unit, &b.unit), rel),
        }
    }

    /// Multiplication by an integer constant.
    pub fn scale(&self, a: &EScalar, n: i64) -> EScalar {
        self.mul(a, &self.from_int(n))
    }

    pub fn inv(&self, a: &EScalar) -> Result<EScalar> {
        if a.rel == 0 {
            return Err(Error::NotInvertible("zero has no inverse".into()));
        }
        let u = self.local_inv(&a.unit).expect("unit parts are units");
        Ok(EScalar { exp: -a.exp, rel: a.rel, unit: self.local_truncate(&u, a.rel) })
    }

    pub fn div(&self, a: &EScalar, b: &EScalar) -> Result<EScalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &EScalar, mut k: u64) -> EScalar {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Valuation in `π_E`-digits.
    pub fn val_pi(&self, a: &EScalar) -> Valuation {
        if a.is_exact_zero() {
            Valuation::Infinite
        } else if a.rel == 0 {
            Valuation::AtLeast(a.exp)
        } else {
            Valuation::Finite(a.exp)
        }
    }

    /// Valuation in the `val_F` normalization.
    pub fn val(&self, a: &EScalar) -> Valuation {
        let f = self.f as i64;
        match self.val_pi(a) {
            Valuation::Finite(v) => Valuation::Finite(v * f),
            Valuation::AtLeast(v) => Valuation::AtLeast(v * f),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    /// Whether `a ∈ O_E`, certified.
    pub fn is_integral(&self, a: &EScalar) -> Result<bool> {
        if a.rel > 0 {
            Ok(a.exp >= 0)
        } else if a.exp >= 0 {
            Ok(true)
        } else {
            precision(format!("zero known only modulo π^{}", a.exp))
        }
    }

    /// Reduction modulo `π_E` of an integral scalar.
    pub fn residue(&self, a: &EScalar) -> Result<FqElem> {
        if a.rel > 0 {
            match a.exp {
                0 => Ok(self.local_residue(&a.unit)),
                v if v > 0 => Ok(FqElem(0)),
                _ => Err(Error::NotApplicable("residue of a non-integral scalar".into())),
            }
        } else if a.exp >= 1 {
            Ok(FqElem(0))
        } else {
            precision("residue of an undetermined zero")
        }
    }

    /// `σ(a)` for the embedding with index `s`.
    pub fn embed_scalar(&self, s: usize, a: &EScalar) -> EScalar {
        if a.rel == 0 {
            return a.clone();
        }
        let emb = self.embeddings()[s];
        let mut u = self.embed(s, &a.unit);
        let twist = (emb.j as i64 * a.exp).rem_euclid(self.e as i64) as usize;
        if twist != 0 {
            u = self.local_mul(&u, &self.local_from_zq(self.zeta_e(twist)));
        }
        EScalar { exp: a.exp, rel: a.rel, unit: self.local_truncate(&u, a.rel) }
    }

    /// `∏_σ σ(z)^{n_σ}` on scalars.
    pub fn power_multiindex_scalar(&self, z: &EScalar, n: &[u32]) -> EScalar {
        let mut acc = self.one();
        for (s, &k) in n.iter().enumerate() {
            if k > 0 {
                acc = self.mul(&acc, &self.pow(&self.embed_scalar(s, z), k as u64));
            }
        }
        acc
    }

    /// Equality at the common precision: the difference is zero.
    pub fn eq_at_precision(&self, a: &EScalar, b: &EScalar) -> bool {
        self.sub(a, b).is_zero()
    }
}
