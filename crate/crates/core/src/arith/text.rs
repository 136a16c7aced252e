use serde::{Deserialize, Serialize};

use super::scalar::EXACT;
use super::{EScalar, FqElem, LocalElem, Tower, ZqElem};
use crate::error::{Error, Result};

/// Textual form of an [`EScalar`].
///
/// `unit` lists, for each power `y^k`, the little-endian coefficients of
/// `x^i` modulo `p^M`. A bare integer is accepted on input as an exact
/// constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Int(i64),
    Value { exp: i64, rel: u32, unit: Vec<Vec<u64>> },
    Zero(ZeroText),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroText {
    /// `None` for an exact zero, `Some(k)` for `O(π^k)`.
    pub zero: Option<i64>,
}

impl Tower {
    pub fn fq_to_text(&self, x: FqElem) -> Vec<u64> {
        self.fq_digits(x).to_vec()
    }

    pub fn fq_from_text(&self, d: &[u64]) -> Result<FqElem> {
        if d.len() != self.f || d.iter().any(|&c| c >= self.p) {
            return Err(Error::ParseError(format!("expected {} digits below {}", self.f, self.p)));
        }
        Ok(self.fq_from_digits(d))
    }

    pub fn zq_to_text(&self, x: &ZqElem) -> Vec<u64> {
        x.0.to_vec()
    }

    pub fn zq_from_text(&self, d: &[u64]) -> Result<ZqElem> {
        if d.len() != self.f || d.iter().any(|&c| c >= self.modulus) {
            return Err(Error::ParseError(format!("expected {} coefficients below p^M", self.f)));
        }
        Ok(ZqElem(d.iter().copied().collect()))
    }

    pub fn local_to_text(&self, x: &LocalElem) -> Vec<Vec<u64>> {
        x.0.chunks(self.f).map(|c| c.to_vec()).collect()
    }

    pub fn local_from_text(&self, rows: &[Vec<u64>]) -> Result<LocalElem> {
        if rows.len() != self.e {
            return Err(Error::ParseError(format!("expected {} rows of y-coefficients", self.e)));
        }
        let mut out = self.local_zero();
        for (k, r) in rows.iter().enumerate() {
            let z = self.zq_from_text(r)?;
            out.0[k * self.f..(k + 1) * self.f].copy_from_slice(&z.0);
        }
        Ok(out)
    }

    pub fn scalar_to_text(&self, a: &EScalar) -> ScalarText {
        if a.rel == 0 {
            let zero = if a.exp == EXACT { None } else { Some(a.exp) };
            ScalarText::Zero(ZeroText { zero })
        } else {
            ScalarText::Value { exp: a.exp, rel: a.rel, unit: self.local_to_text(&a.unit) }
        }
    }

    pub fn scalar_from_text(&self, t: &ScalarText) -> Result<EScalar> {
        match t {
            ScalarText::Int(n) => Ok(self.from_int(*n)),
            ScalarText::Zero(ZeroText { zero: None }) => Ok(self.zero()),
            ScalarText::Zero(ZeroText { zero: Some(k) }) => Ok(self.zero_at(*k)),
            ScalarText::Value { exp, rel, unit } => {
                if *rel == 0 || *rel > self.cap() {
                    return Err(Error::ParseError(format!("relative precision {rel} out of range")));
                }
                let u = self.local_from_text(unit)?;
                if self.local_val(&u) != Some(0) {
                    return Err(Error::ParseError("unit part is not a unit".into()));
                }
                Ok(EScalar { exp: *exp, rel: *rel, unit: self.local_truncate(&u, *rel) })
            }
        }
    }
}
