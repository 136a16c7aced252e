//! Self-contained run configurations: one TOML file holding the field, the
//! weights, the Hecke eigenvalue and the probe parameters.
//!
//! ```toml
//! p = 3
//! f = 2
//! precision = 12
//! weights = [1, 1]
//! a_p_valuation = 1      # or: a_p = …, alpha/beta = …, satake_valuations = [vα, vβ]
//! depth = 2
//! nmax = 3
//! seed = 0
//! ```

use serde::Deserialize;

use crate::arith::{FieldConfig, ScalarText, Tower};
use crate::error::{Error, Result};
use crate::induction::{SatakeData, SatakeText};
use crate::rep::WeightProfile;

const FIELD_KEYS: [&str; 6] = ["p", "f", "e", "h_coeffs", "precision", "embeddings"];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default)]
    weights: Vec<u32>,
    a_p: Option<ScalarText>,
    a_p_valuation: Option<i64>,
    alpha: Option<ScalarText>,
    beta: Option<ScalarText>,
    satake_valuations: Option<[i64; 2]>,
    #[serde(default = "two")]
    depth: usize,
    #[serde(default = "three")]
    nmax: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "four")]
    samples: usize,
}

fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn four() -> usize {
    4
}

/// How the eigenvalue is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApSpec {
    /// `a_p = π^k`.
    Valuation(i64),
    /// An explicit element or Satake pair.
    Text(SatakeText),
    /// `α = π^{vα}`, `β = π^{vβ}`.
    SatakeValuations(i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub weights: Vec<u32>,
    pub a_p: ApSpec,
    pub depth: usize,
    pub nmax: usize,
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    /// Parses and validates a run file. Without an eigenvalue, `a_p = π`.
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::ParseError(e.to_string()))?;
        let mut field = toml::Table::new();
        for k in FIELD_KEYS {
            if let Some(v) = table.remove(k) {
                field.insert(k.to_string(), v);
            }
        }
        let field = FieldConfig::from_table(field)?;
        let raw: RawRun = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ParseError(e.to_string()))?;
        let given = [raw.a_p.is_some(), raw.a_p_valuation.is_some(), raw.alpha.is_some() || raw.beta.is_some(), raw.satake_valuations.is_some()];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(Error::ConfigInvalid("give the eigenvalue in exactly one form".into()));
        }
        let a_p = match (raw.a_p, raw.a_p_valuation, raw.alpha, raw.beta, raw.satake_valuations) {
            (Some(a_p), ..) => ApSpec::Text(SatakeText::Eigenvalue { a_p }),
            (_, Some(k), ..) => ApSpec::Valuation(k),
            (_, _, Some(alpha), Some(beta), _) => ApSpec::Text(SatakeText::Parameters { alpha, beta }),
            (_, _, Some(_), None, _) | (_, _, None, Some(_), _) => {
                return Err(Error::ConfigInvalid("alpha and beta must be given together".into()))
            }
            (.., Some([va, vb])) => ApSpec::SatakeValuations(va, vb),
            _ => ApSpec::Valuation(1),
        };
        let cfg = RunConfig { field, weights: raw.weights, a_p, depth: raw.depth, nmax: raw.nmax, seed: raw.seed, samples: raw.samples };
        let t = cfg.tower();
        cfg.weight_profile(&t)?;
        cfg.satake(&t)?;
        Ok(cfg)
    }

    /// The same run at another precision.
    pub fn with_precision(&self, m: u32) -> Result<RunConfig> {
        Ok(RunConfig { field: self.field.with_precision(m)?, ..self.clone() })
    }

    pub fn tower(&self) -> Tower {
        Tower::new(self.field.clone())
    }

    pub fn weight_profile(&self, t: &Tower) -> Result<WeightProfile> {
        WeightProfile::new(t, self.weights.clone())
    }

    pub fn satake(&self, t: &Tower) -> Result<SatakeData> {
        match &self.a_p {
            ApSpec::Valuation(k) => SatakeData::new(t, t.pi_pow(*k)),
            ApSpec::Text(s) => s.resolve(t),
            ApSpec::SatakeValuations(a, b) => SatakeData::from_satake(t, t.pi_pow(*a), t.pi_pow(*b)),
        }
    }

    /// `(val α, val β)` when the eigenvalue was given through them.
    pub fn satake_valuations(&self) -> Option<(i64, i64)> {
        match self.a_p {
            ApSpec::SatakeValuations(a, b) => Some((a, b)),
            _ => None,
        }
    }
}
