use serde::{Deserialize, Serialize};

use super::counterexample::{build_counterexample, check_counterexample, CounterexampleCase};
use super::probes::{theta_kernel_probe, ProbeLimits};
use crate::arith::{FieldConfig, Tower, Valuation};
use crate::criterion::{theorem_conditions, vandermonde_matrix, vandermonde_unit};
use crate::error::{Error, Result};
use crate::induction::SatakeData;
use crate::linalg::det_valuation;
use crate::rep::WeightProfile;

fn default_primes() -> Vec<u64> {
    vec![2, 3, 5]
}
fn default_degrees() -> Vec<u32> {
    vec![1, 2]
}
fn default_ramification() -> Vec<u32> {
    vec![1, 2]
}
fn default_max_weight() -> u32 {
    4
}
fn default_precision() -> u32 {
    12
}
fn default_depth() -> usize {
    2
}
fn default_a_p_valuation() -> i64 {
    1
}
fn default_max_columns() -> usize {
    2_000
}
fn default_max_residue_columns() -> usize {
    40_000
}
fn default_max_rows() -> usize {
    20_000
}
fn default_det_nodes() -> usize {
    1_000
}
fn default_true() -> bool {
    true
}

/// A finite range of fields and weights. Ramification indices `e > 1` are
/// used only where `e | q − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default = "default_degrees")]
    pub residue_degrees: Vec<u32>,
    #[serde(default = "default_ramification")]
    pub ramification: Vec<u32>,
    /// Bound on each coordinate of `d⃗`.
    #[serde(default = "default_max_weight")]
    pub max_weight: u32,
    #[serde(default = "default_precision")]
    pub precision: u32,
    /// Depth `N` of the kernel probe.
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// `a_p = π^k` for this `k ≥ 1`.
    #[serde(default = "default_a_p_valuation")]
    pub a_p_valuation: i64,
    /// Run the kernel probe on rows satisfying the criterion.
    #[serde(default = "default_true")]
    pub probes: bool,
    /// Probes with up to this many unknowns are also eliminated over `O_E`.
    #[serde(default = "default_max_columns")]
    pub max_probe_columns: usize,
    /// Probes with more unknowns than this are skipped; between the two caps
    /// containment is decided mod `π` only.
    #[serde(default = "default_max_residue_columns")]
    pub max_residue_columns: usize,
    /// Vandermonde matrices with at most this many nodes also get their
    /// determinant valuation computed.
    #[serde(default = "default_det_nodes")]
    pub max_det_nodes: usize,
    /// The sweep refuses ranges with more rows than this.
    #[serde(default = "default_max_rows")]
    pub max_rows: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub f: u32,
    pub e: u32,
    pub weights: Vec<u32>,
    pub criterion: bool,
    pub witness_i: Option<usize>,
    pub witness_ii: Option<usize>,
    pub vandermonde: bool,
    /// Whether the Vandermonde determinant has valuation exactly zero; left
    /// out above `max_det_nodes`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_unit: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_case: Option<CounterexampleCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_contained: Option<bool>,
    /// The probe ran past `max_probe_columns`, on the reduction mod `π` alone.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub theta_residue_only: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub criterion_true: usize,
    /// Rows where the Vandermonde verdict differs from the criterion.
    pub vandermonde_mismatches: usize,
    pub det_checked: usize,
    pub det_mismatches: usize,
    pub counterexamples: usize,
    pub counterexamples_verified: usize,
    pub theta_probes: usize,
    pub theta_contained: usize,
    pub theta_residue_only: usize,
    pub probes_skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

fn weight_vectors(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..=bound).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn fields(spec: &SweepSpec) -> Result<Vec<FieldConfig>> {
    let mut out = Vec::new();
    for &p in &spec.primes {
        for &f in &spec.residue_degrees {
            for &e in &spec.ramification {
                let q = p.checked_pow(f).ok_or_else(|| Error::SizeCapExceeded(format!("{p}^{f} overflows")))?;
                if e > 1 && (q - 1) % e as u64 != 0 {
                    continue;
                }
                out.push(FieldConfig::standard(p, f, e, spec.precision)?);
            }
        }
    }
    Ok(out)
}

fn det_is_unit(t: &Tower, w: &WeightProfile, limit: usize) -> Result<Option<bool>> {
    let nodes = w.indices().filter(|i| i.total() > 0).count();
    if nodes == 0 {
        return Ok(Some(true));
    }
    if nodes > limit {
        return Ok(None);
    }
    Ok(Some(det_valuation(t, &vandermonde_matrix(t, w))? == Valuation::Finite(0)))
}

/// Runs the criterion, its Vandermonde form, the counterexample check and
/// (where small enough) the kernel probe over every field and weight in the
/// range. Rows are ordered by `(p, f, e)` and then lexicographically by `d⃗`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepReport> {
    let fields = fields(spec)?;
    let mut total = 0usize;
    for cfg in &fields {
        let n = (cfg.e * cfg.f) as u32;
        total = (spec.max_weight as usize + 1)
            .checked_pow(n)
            .and_then(|k| total.checked_add(k))
            .filter(|&k| k <= spec.max_rows)
            .ok_or_else(|| Error::SizeCapExceeded(format!("sweep has more than {} rows", spec.max_rows)))?;
    }
    let limits = ProbeLimits {
        max_columns: spec.max_probe_columns,
        max_residue_columns: spec.max_residue_columns,
        ..ProbeLimits::default()
    };
    let mut rows = Vec::with_capacity(total);
    let mut sum = SweepSummary::default();
    for cfg in fields {
        let t = Tower::new(cfg.clone());
        let s = SatakeData::new(&t, t.pi_pow(spec.a_p_valuation))?;
        for d in weight_vectors((cfg.e * cfg.f) as usize, spec.max_weight) {
            let w = WeightProfile::new(&t, d.clone())?;
            let r = theorem_conditions(&w, cfg.p);
            let mut row = SweepRow {
                p: cfg.p,
                f: cfg.f,
                e: cfg.e,
                weights: d,
                criterion: r.verdict,
                witness_i: r.witness_i,
                witness_ii: r.witness_ii,
                vandermonde: vandermonde_unit(&t, &w)?,
                det_unit: det_is_unit(&t, &w, spec.max_det_nodes)?,
                counterexample_case: None,
                counterexample_verified: None,
                theta_contained: None,
                theta_residue_only: false,
                skipped: None,
            };
            if r.verdict {
                if spec.probes {
                    match theta_kernel_probe(&t, &w, &s, spec.depth, &limits) {
                        Ok(rep) => {
                            row.theta_contained = Some(rep.verdict);
                            row.theta_residue_only = rep.certificate.get("pivot_valuations").is_none();
                        }
                        Err(Error::SizeCapExceeded(m)) => row.skipped = Some(m),
                        Err(e) => return Err(e),
                    }
                }
            } else {
                let ce = build_counterexample(&t, &w, &s)?;
                row.counterexample_case = Some(ce.case);
                row.counterexample_verified = Some(check_counterexample(&t, &w, &ce.h, &s)?.verdict);
            }
            tally(&mut sum, &row);
            rows.push(row);
        }
    }
    Ok(SweepReport { spec: spec.clone(), rows, summary: sum })
}

fn tally(sum: &mut SweepSummary, row: &SweepRow) {
    sum.rows += 1;
    sum.criterion_true += row.criterion as usize;
    sum.vandermonde_mismatches += (row.vandermonde != row.criterion) as usize;
    if let Some(u) = row.det_unit {
        sum.det_checked += 1;
        sum.det_mismatches += (u != row.criterion) as usize;
    }
    if let Some(v) = row.counterexample_verified {
        sum.counterexamples += 1;
        sum.counterexamples_verified += v as usize;
    }
    if let Some(v) = row.theta_contained {
        sum.theta_probes += 1;
        sum.theta_contained += v as usize;
        sum.theta_residue_only += row.theta_residue_only as usize;
    }
    sum.probes_skipped += row.skipped.is_some() as usize;
}
