use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Tower;
use crate::error::{Error, Result};

/// Largest weight allowed on a single embedding.
pub const MAX_WEIGHT: u32 = 60;
/// Largest lattice dimension `∏(d_σ + 1)` allowed (storage is dense).
pub const MAX_DIM: usize = 1 << 18;

/// A multi-index `i⃗ = (i_σ)_σ`. The derived order is the lexicographic one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> MultiIndex {
        MultiIndex(vec![0; n])
    }

    /// `|n⃗| = Σ n_σ`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self − other`, defined when `other ≤ self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        other.le(self).then(|| MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

/// The weight vector `d⃗` together with the combinatorics the criterion
/// and the counterexamples need: `S⁺`, the Frobenius exponents `γ_σ`, the
/// classes `J_l` and the gaps `v_σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    d: Vec<u32>,
    gamma: Vec<u32>,
    f: u32,
    s_plus: Vec<usize>,
    classes: Vec<Vec<usize>>,
    v: Vec<Option<u32>>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl WeightProfile {
    pub fn new(t: &Tower, d: Vec<u32>) -> Result<WeightProfile> {
        if d.len() != t.degree() {
            return Err(Error::ConfigInvalid(format!(
                "weight vector has {} entries, expected one per embedding ({})",
                d.len(),
                t.degree()
            )));
        }
        if let Some(&w) = d.iter().find(|&&w| w > MAX_WEIGHT) {
            return Err(Error::ConfigInvalid(format!("weight {w} exceeds {MAX_WEIGHT}")));
        }
        let dims: Vec<usize> = d.iter().map(|&x| x as usize + 1).collect();
        let size = dims.iter().try_fold(1usize, |acc, &x| acc.checked_mul(x).filter(|&s| s <= MAX_DIM));
        let Some(size) = size else {
            return Err(Error::SizeCapExceeded(format!("lattice dimension exceeds {MAX_DIM}")));
        };
        let mut strides = vec![1; dims.len()];
        for s in (0..dims.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * dims[s + 1];
        }
        let f = t.f() as u32;
        let gamma: Vec<u32> = t.embeddings().iter().map(|e| e.gamma).collect();
        let s_plus: Vec<usize> = (0..d.len()).filter(|&s| d[s] > 0).collect();
        let mut classes = vec![Vec::new(); f as usize];
        for &s in &s_plus {
            classes[gamma[s] as usize].push(s);
        }
        let v = (0..d.len())
            .map(|s| {
                if d[s] == 0 {
                    return None;
                }
                (1..=f).find(|&i| !classes[((gamma[s] + i) % f) as usize].is_empty())
            })
            .collect();
        Ok(WeightProfile { d, gamma, f, s_plus, classes, v, dims, strides, size })
    }

    pub fn weights(&self) -> &[u32] {
        &self.d
    }

    pub fn weight(&self, s: usize) -> u32 {
        self.d[s]
    }

    pub fn num_embeddings(&self) -> usize {
        self.d.len()
    }

    pub fn gamma(&self, s: usize) -> u32 {
        self.gamma[s]
    }

    pub fn residue_degree(&self) -> u32 {
        self.f
    }

    pub fn s_plus(&self) -> &[usize] {
        &self.s_plus
    }

    /// `J_l`, in embedding order.
    pub fn class(&self, l: usize) -> &[usize] {
        &self.classes[l % self.f as usize]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// `v_σ`, defined for `σ ∈ S⁺`.
    pub fn v(&self, s: usize) -> Option<u32> {
        self.v[s]
    }

    /// `∏ (d_σ + 1)`.
    pub fn dim(&self) -> usize {
        self.size
    }

    pub(crate) fn axis(&self, s: usize) -> (usize, usize) {
        (self.dims[s], self.strides[s])
    }

    pub fn flatten(&self, i: &MultiIndex) -> Result<usize> {
        if i.0.len() != self.d.len() || i.0.iter().zip(&self.d).any(|(a, b)| a > b) {
            return Err(Error::ComponentOutOfRange(format!("{:?} is not below {:?}", i.0, self.d)));
        }
        Ok(i.0.iter().zip(&self.strides).map(|(&a, &s)| a as usize * s).sum())
    }

    pub fn unflatten(&self, mut k: usize) -> MultiIndex {
        let mut out = vec![0; self.d.len()];
        for s in 0..self.d.len() {
            out[s] = (k / self.strides[s]) as u32;
            k %= self.strides[s];
        }
        MultiIndex(out)
    }

    /// All multi-indices `0⃗ ≤ i⃗ ≤ d⃗` in the order `≺`.
    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.size).map(|k| self.unflatten(k))
    }

    /// The index `i⃗` with a single nonzero entry `k` at `σ = s`.
    pub fn unit_index(&self, s: usize, k: u32) -> MultiIndex {
        let mut out = vec![0; self.d.len()];
        out[s] = k;
        MultiIndex(out)
    }

    pub fn table_rows(&self) -> Vec<WeightRow> {
        (0..self.d.len())
            .map(|s| WeightRow {
                sigma: s,
                gamma: self.gamma[s],
                d: self.d[s],
                class: (self.d[s] > 0).then_some(self.gamma[s]),
                v: self.v[s],
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRow {
    pub sigma: usize,
    pub gamma: u32,
    pub d: u32,
    pub class: Option<u32>,
    pub v: Option<u32>,
}

impl fmt::Display for WeightProfile {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "{:>5} {:>5} {:>5} {:>7} {:>5}", "sigma", "gamma", "d", "J-class", "v")?;
        let dash = |x: Option<u32>| x.map_or("-".to_string(), |v| v.to_string());
        for r in self.table_rows() {
            writeln!(out, "{:>5} {:>5} {:>5} {:>7} {:>5}", r.sigma, r.gamma, r.d, dash(r.class), dash(r.v))?;
        }
        Ok(())
    }
}
