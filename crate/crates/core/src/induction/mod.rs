//! Finitely supported functions in the compact induction `ind_{KZ}^G ρ_d⃗`,
//! written as sums of `[g, v]` over canonical tree vertices, and the Hecke
//! operator `T`.

mod hecke;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use hecke::{hecke_generic, hecke_t, psi_of, t_minus, t_plus};

use crate::arith::{EScalar, FqElem, ScalarText, Tower, Valuation};
use crate::error::{Error, Result};
use crate::rep::{act_kz, CoeffText, LatticeVector, WeightProfile};
use crate::tree::{DigitString, GMatrix, TreeVertex};

/// `Σ [vertex_matrix(u), v_u]` over a finite support.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InducedFunction {
    terms: BTreeMap<TreeVertex, LatticeVector>,
}

fn negligible(t: &Tower, v: &LatticeVector) -> bool {
    let cap = t.cap() as i64;
    v.coeffs().iter().all(|c| c.is_exact_zero() || (c.is_zero() && c.exponent().is_some_and(|k| k >= cap)))
}

impl InducedFunction {
    pub fn zero() -> InducedFunction {
        InducedFunction::default()
    }

    /// `[vertex_matrix(u), v]`.
    pub fn single(t: &Tower, u: TreeVertex, v: LatticeVector) -> InducedFunction {
        let mut f = InducedFunction::zero();
        f.add_term(t, u, v);
        f
    }

    pub fn terms(&self) -> &BTreeMap<TreeVertex, LatticeVector> {
        &self.terms
    }

    pub fn get(&self, u: &TreeVertex) -> Option<&LatticeVector> {
        self.terms.get(u)
    }

    pub fn support(&self) -> impl Iterator<Item = &TreeVertex> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every stored vector vanishes to its precision.
    pub fn is_zero(&self) -> bool {
        self.terms.values().all(LatticeVector::is_zero)
    }

    /// The largest level in the support.
    pub fn top_level(&self) -> Option<usize> {
        self.terms.keys().map(TreeVertex::level).max()
    }

    /// The terms supported on level `n`.
    pub fn level_part(&self, n: usize) -> InducedFunction {
        InducedFunction {
            terms: self.terms.iter().filter(|(u, _)| u.level() == n).map(|(u, v)| (u.clone(), v.clone())).collect(),
        }
    }

    /// Adds `[vertex_matrix(u), v]`, dropping the entry if it cancels.
    pub fn add_term(&mut self, t: &Tower, u: TreeVertex, v: LatticeVector) {
        match self.terms.get_mut(&u) {
            Some(old) => {
                old.add_assign(t, &v);
                if negligible(t, old) {
                    self.terms.remove(&u);
                }
            }
            None if !negligible(t, &v) => {
                self.terms.insert(u, v);
            }
            None => {}
        }
    }

    pub fn add(&self, t: &Tower, other: &InducedFunction) -> InducedFunction {
        let mut out = self.clone();
        out.add_assign(t, other);
        out
    }

    pub fn add_assign(&mut self, t: &Tower, other: &InducedFunction) {
        for (u, v) in &other.terms {
            self.add_term(t, u.clone(), v.clone());
        }
    }

    pub fn neg(&self, t: &Tower) -> InducedFunction {
        InducedFunction { terms: self.terms.iter().map(|(u, v)| (u.clone(), v.neg(t))).collect() }
    }

    pub fn sub(&self, t: &Tower, other: &InducedFunction) -> InducedFunction {
        self.add(t, &other.neg(t))
    }

    pub fn scale(&self, t: &Tower, c: &EScalar) -> InducedFunction {
        let mut out = InducedFunction::zero();
        for (u, v) in &self.terms {
            out.add_term(t, u.clone(), v.scale(t, c));
        }
        out
    }

    /// Equality at working precision: the difference vanishes.
    pub fn eq_at_precision(&self, t: &Tower, other: &InducedFunction) -> bool {
        self.sub(t, other).is_zero()
    }

    /// Textual form, one entry per support vertex.
    pub fn to_text(&self, t: &Tower, w: &WeightProfile) -> Vec<TermText> {
        self.terms
            .iter()
            .map(|(u, v)| TermText {
                side: u.side(),
                n: u.level(),
                digits: u.digits().digits().iter().map(|d| d.code()).collect(),
                vector: v.to_text(t, w),
            })
            .collect()
    }

    pub fn from_text(t: &Tower, w: &WeightProfile, entries: &[TermText]) -> Result<InducedFunction> {
        let mut f = InducedFunction::zero();
        for e in entries {
            if e.side > 1 || e.digits.len() != e.n {
                return Err(Error::ParseError(format!("bad vertex: side {} with {} digits at level {}", e.side, e.digits.len(), e.n)));
            }
            if let Some(d) = e.digits.iter().find(|&&d| d as u64 >= t.q()) {
                return Err(Error::ParseError(format!("digit code {d} is outside GF({})", t.q())));
            }
            let u = TreeVertex::new(e.side, DigitString::new(e.digits.iter().map(|&d| FqElem(d)).collect()));
            f.add_term(t, u, LatticeVector::from_text(t, w, &e.vector)?);
        }
        Ok(f)
    }
}

/// One `[g^{side}_{n,μ}, v]` of the textual form; digits by integer code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermText {
    pub side: u8,
    pub n: usize,
    pub digits: Vec<u32>,
    pub vector: Vec<CoeffText>,
}

/// `[g, v]` on its canonical vertex, using `[gκ, v] = [g, ρ⁰(κ)v]`.
pub fn from_pair(t: &Tower, w: &WeightProfile, g: &GMatrix, v: &LatticeVector) -> Result<InducedFunction> {
    let (u, k) = t.cartan_reduce(g)?;
    Ok(InducedFunction::single(t, u, act_kz(t, &k, v, w)))
}

/// Left translation `g·f`.
pub fn act_g(t: &Tower, w: &WeightProfile, g: &GMatrix, f: &InducedFunction) -> Result<InducedFunction> {
    let mut out = InducedFunction::zero();
    for (u, v) in f.terms() {
        let h = t.g_mul(g, &t.vertex_matrix(u));
        out.add_assign(t, &from_pair(t, w, &h, v)?);
    }
    Ok(out)
}

/// Whether every stored vector is integral, i.e. `f ∈ ind ρ_d⃗⁰`.
pub fn is_integral_fn(t: &Tower, f: &InducedFunction) -> Result<bool> {
    for v in f.terms.values() {
        if !v.is_integral(t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The eigenvalue `a_p ∈ p_E`, optionally derived from Satake parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeData {
    a_p: EScalar,
    parameters: Option<(EScalar, EScalar)>,
}

impl SatakeData {
    pub fn new(t: &Tower, a_p: EScalar) -> Result<SatakeData> {
        match t.val_pi(&a_p) {
            Valuation::Finite(v) if v >= 1 => {}
            Valuation::AtLeast(v) if v >= 1 => {}
            Valuation::Infinite => {}
            Valuation::Finite(v) => {
                return Err(Error::ConfigInvalid(format!("a_p must lie in the maximal ideal, got valuation {v}")))
            }
            Valuation::AtLeast(_) => return Err(Error::PrecisionLoss("cannot certify val(a_p) > 0".into())),
        }
        Ok(SatakeData { a_p, parameters: None })
    }

    /// `a_p = α^f + β^f`.
    pub fn from_satake(t: &Tower, alpha: EScalar, beta: EScalar) -> Result<SatakeData> {
        let f = t.f() as u64;
        let a_p = t.add(&t.pow(&alpha, f), &t.pow(&beta, f));
        let mut s = SatakeData::new(t, a_p)?;
        s.parameters = Some((alpha, beta));
        Ok(s)
    }

    pub fn a_p(&self) -> &EScalar {
        &self.a_p
    }

    pub fn parameters(&self) -> Option<&(EScalar, EScalar)> {
        self.parameters.as_ref()
    }
}

/// Textual form of [`SatakeData`] for configuration files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SatakeText {
    Eigenvalue { a_p: ScalarText },
    Parameters { alpha: ScalarText, beta: ScalarText },
}

impl SatakeText {
    pub fn resolve(&self, t: &Tower) -> Result<SatakeData> {
        match self {
            SatakeText::Eigenvalue { a_p } => SatakeData::new(t, t.scalar_from_text(a_p)?),
            SatakeText::Parameters { alpha, beta } => {
                SatakeData::from_satake(t, t.scalar_from_text(alpha)?, t.scalar_from_text(beta)?)
            }
        }
    }
}
