use serde::{Deserialize, Serialize};

use super::{MultiIndex, WeightProfile};
use crate::arith::{EScalar, ScalarText, Tower};
use crate::error::{Error, Result};

/// A vector of `⊗_σ Sym^{d_σ}`, in the basis `e_{d⃗,i⃗} = ⊗ x_σ^{d_σ−i_σ} y_σ^{i_σ}`,
/// stored densely in `≺` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    pub(crate) coeffs: Vec<EScalar>,
}

/// One `(multi-index, coefficient)` pair of the textual form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffText {
    pub index: Vec<u32>,
    pub value: ScalarText,
}

impl LatticeVector {
    pub fn zeros(t: &Tower, w: &WeightProfile) -> LatticeVector {
        LatticeVector { coeffs: vec![t.zero(); w.dim()] }
    }

    /// `c·e_{d⃗,i⃗}`.
    pub fn basis(t: &Tower, w: &WeightProfile, i: &MultiIndex, c: EScalar) -> Result<LatticeVector> {
        let mut v = LatticeVector::zeros(t, w);
        v.coeffs[w.flatten(i)?] = c;
        Ok(v)
    }

    pub fn from_coeffs(w: &WeightProfile, coeffs: Vec<EScalar>) -> Result<LatticeVector> {
        if coeffs.len() != w.dim() {
            return Err(Error::ComponentOutOfRange(format!(
                "{} coefficients for a space of dimension {}",
                coeffs.len(),
                w.dim()
            )));
        }
        Ok(LatticeVector { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[EScalar] {
        &self.coeffs
    }

    pub fn get(&self, k: usize) -> &EScalar {
        &self.coeffs[k]
    }

    pub fn at(&self, w: &WeightProfile, i: &MultiIndex) -> Result<&EScalar> {
        Ok(&self.coeffs[w.flatten(i)?])
    }

    pub fn set(&mut self, k: usize, x: EScalar) {
        self.coeffs[k] = x;
    }

    /// True when every coefficient is zero (exactly or to its precision).
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(EScalar::is_zero)
    }

    pub fn add(&self, t: &Tower, other: &LatticeVector) -> LatticeVector {
        LatticeVector { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| t.add(a, b)).collect() }
    }

    pub fn sub(&self, t: &Tower, other: &LatticeVector) -> LatticeVector {
        LatticeVector { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| t.sub(a, b)).collect() }
    }

    pub fn add_assign(&mut self, t: &Tower, other: &LatticeVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_exact_zero() {
                *a = t.add(a, b);
            }
        }
    }

    pub fn neg(&self, t: &Tower) -> LatticeVector {
        LatticeVector { coeffs: self.coeffs.iter().map(|a| t.neg(a)).collect() }
    }

    pub fn scale(&self, t: &Tower, c: &EScalar) -> LatticeVector {
        LatticeVector { coeffs: self.coeffs.iter().map(|a| t.mul(a, c)).collect() }
    }

    /// Whether every coefficient lies in `O_E`.
    pub fn is_integral(&self, t: &Tower) -> Result<bool> {
        for c in &self.coeffs {
            if !t.is_integral(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eq_at_precision(&self, t: &Tower, other: &LatticeVector) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| t.eq_at_precision(a, b))
    }

    /// Smallest exponent among nonzero coefficients.
    pub fn min_exponent(&self) -> Option<i64> {
        self.coeffs.iter().filter(|c| !c.is_zero()).filter_map(EScalar::exponent).min()
    }

    /// Nonzero-or-inexact coefficients as `(multi-index, scalar)` pairs.
    pub fn to_text(&self, t: &Tower, w: &WeightProfile) -> Vec<CoeffText> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(k, c)| CoeffText { index: w.unflatten(k).0, value: t.scalar_to_text(c) })
            .collect()
    }

    pub fn from_text(t: &Tower, w: &WeightProfile, entries: &[CoeffText]) -> Result<LatticeVector> {
        let mut v = LatticeVector::zeros(t, w);
        for e in entries {
            let k = w
                .flatten(&MultiIndex(e.index.clone()))
                .map_err(|err| Error::ParseError(err.to_string()))?;
            let x = t.scalar_from_text(&e.value)?;
            v.coeffs[k] = t.add(&v.coeffs[k], &x);
        }
        Ok(v)
    }
}
