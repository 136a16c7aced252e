use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::counterexample::{build_counterexample, check_counterexample};
use super::{ConfigSummary, ProbeMode, ProbeReport};
use crate::arith::{EScalar, FqElem, Tower, Valuation};
use crate::criterion::theorem_conditions;
use crate::error::{precision, Error, Result};
use crate::induction::{hecke_t, t_minus, t_plus, InducedFunction, SatakeData};
use crate::linalg::{fq_eliminate, hermite, preimage_lattice, EMatrix, LatticeBasis, SparseHermite, SparseMatrix};
use crate::rep::{LatticeVector, WeightProfile};
use crate::tree::{enumerate_ball, DigitString, TreeVertex};

/// Size limits for assembled systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeLimits {
    /// Largest number of unknowns (`|B_N| · dim`) a probe will assemble.
    pub max_columns: usize,
    /// Largest number of unknowns for the kernel probe, which beyond
    /// `max_columns` decides containment from the reduction mod `π` alone.
    pub max_residue_columns: usize,
    /// Systems with at most this many rows are also solved densely.
    pub dense_rows: usize,
}

impl Default for ProbeLimits {
    fn default() -> Self {
        ProbeLimits { max_columns: 20_000, max_residue_columns: 40_000, dense_rows: 160 }
    }
}

/// `|B_n| = 2(q^{n+1} − 1)/(q − 1)`, if it fits in a `usize`.
pub fn ball_size(q: u64, n: usize) -> Option<usize> {
    let top = q.checked_pow(n as u32 + 1)?;
    usize::try_from(2 * ((top - 1) / (q - 1))).ok()
}

/// Image of each basis vector `e_k` under one block of `T`, as sparse columns.
type Block<T> = Vec<Vec<(usize, T)>>;

/// `T⁺` acts on a vertex through a block that depends only on its side and the
/// new digit, and `T⁻` through one that depends only on its side and top digit.
#[derive(Clone, Debug)]
struct Blocks<T> {
    plus: [Vec<Block<T>>; 2],
    minus_base: [Block<T>; 2],
    minus: [Vec<Block<T>>; 2],
    diag: Option<T>,
}

impl<T> Blocks<T> {
    fn map<U>(&self, f: &impl Fn(&T) -> Result<U>) -> Result<Blocks<U>> {
        let block = |b: &Block<T>| -> Result<Block<U>> {
            b.iter().map(|c| c.iter().map(|(i, x)| Ok((*i, f(x)?))).collect()).collect()
        };
        let many = |v: &Vec<Block<T>>| v.iter().map(block).collect::<Result<Vec<_>>>();
        Ok(Blocks {
            plus: [many(&self.plus[0])?, many(&self.plus[1])?],
            minus_base: [block(&self.minus_base[0])?, block(&self.minus_base[1])?],
            minus: [many(&self.minus[0])?, many(&self.minus[1])?],
            diag: self.diag.as_ref().map(f).transpose()?,
        })
    }

    fn entries(&self) -> impl Iterator<Item = &T> {
        let blocks = self.plus.iter().chain(&self.minus).flatten().chain(&self.minus_base);
        blocks.flatten().flatten().map(|(_, x)| x).chain(&self.diag)
    }
}

/// The truncated map `B_N(E) → B_{N+1}(E)` of `T` or `T − a_p`, in the
/// coordinates (vertex in ball order, multi-index). The per-vertex blocks are
/// computed once and scattered.
pub struct Assembly {
    pub depth: usize,
    pub columns: Vec<TreeVertex>,
    pub rows: Vec<TreeVertex>,
    row_index: HashMap<TreeVertex, usize>,
    dim: usize,
    blocks: Blocks<EScalar>,
}

impl Assembly {
    /// Refuses systems with more than `max_columns` unknowns.
    pub fn new(
        t: &Tower,
        w: &WeightProfile,
        s: Option<&SatakeData>,
        depth: usize,
        max_columns: usize,
    ) -> Result<Assembly> {
        let dim = w.dim();
        let too_big = || Error::SizeCapExceeded(format!("B_{depth} × {dim} exceeds {max_columns} unknowns"));
        let ncols = ball_size(t.q(), depth).and_then(|b| b.checked_mul(dim)).ok_or_else(too_big)?;
        if ncols > max_columns {
            return Err(too_big());
        }
        let columns = enumerate_ball(t, depth);
        let rows = enumerate_ball(t, depth + 1);
        let row_index: HashMap<TreeVertex, usize> = rows.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();

        // one image per basis vector, read off at a fixed target vertex
        let block = |u: &TreeVertex,
                     op: fn(&Tower, &WeightProfile, &InducedFunction) -> Result<InducedFunction>,
                     at: &TreeVertex|
         -> Result<Block<EScalar>> {
            (0..dim)
                .map(|k| {
                    let mut v = LatticeVector::zeros(t, w);
                    v.set(k, t.one());
                    let img = op(t, w, &InducedFunction::single(t, u.clone(), v))?;
                    Ok(img.get(at).map_or_else(Vec::new, |x| {
                        x.coeffs().iter().enumerate().filter(|(_, c)| !c.is_exact_zero()).map(|(i, c)| (i, c.clone())).collect()
                    }))
                })
                .collect()
        };
        let mut blocks = Blocks {
            plus: Default::default(),
            minus_base: Default::default(),
            minus: Default::default(),
            diag: s.map(|s| t.neg(s.a_p())),
        };
        for side in 0..2u8 {
            let root = TreeVertex::new(side, DigitString::empty());
            let across = if side == 0 { TreeVertex::alpha() } else { TreeVertex::origin() };
            blocks.minus_base[side as usize] = block(&root, t_minus, &across)?;
            for lam in t.fq_elements() {
                let child = TreeVertex::new(side, DigitString::new(vec![lam]));
                blocks.plus[side as usize].push(block(&root, t_plus, &child)?);
                blocks.minus[side as usize].push(block(&child, t_minus, &root)?);
            }
        }
        Ok(Assembly { depth, columns, rows, row_index, dim, blocks })
    }

    fn scatter<T: Clone>(&self, b: &Blocks<T>, j: usize) -> Vec<(usize, T)> {
        let (u, k) = (&self.columns[j / self.dim], j % self.dim);
        let side = u.side() as usize;
        let mut out = Vec::new();
        let mut put = |target: &TreeVertex, col: &[(usize, T)]| {
            let base = self.row_index[target] * self.dim;
            out.extend(col.iter().map(|(i, x)| (base + i, x.clone())));
        };
        for (lam, blk) in b.plus[side].iter().enumerate() {
            put(&TreeVertex::new(u.side(), u.digits().push(FqElem(lam as u32))), &blk[k]);
        }
        match u.level() {
            0 => put(&if side == 0 { TreeVertex::alpha() } else { TreeVertex::origin() }, &b.minus_base[side][k]),
            n => {
                let top = u.digits().digits()[n - 1].0 as usize;
                let parent = TreeVertex::new(u.side(), DigitString::new(u.digits().digits()[..n - 1].to_vec()));
                put(&parent, &b.minus[side][top][k]);
            }
        }
        if let Some(c) = &b.diag {
            out.push((self.row_index[u] * self.dim + k, c.clone()));
        }
        out
    }

    /// Column `j` as `(row, entry)` pairs, possibly with exact zeros.
    pub fn column(&self, j: usize) -> Vec<(usize, EScalar)> {
        self.scatter(&self.blocks, j)
    }

    pub fn matrix(&self, t: &Tower) -> SparseMatrix {
        let cols: Vec<_> = (0..self.ncols()).map(|j| self.column(j)).collect();
        SparseMatrix::from_columns(t, self.nrows(), &cols)
    }

    /// The map reduced mod `π`; every entry is integral.
    pub fn residue_columns(&self, t: &Tower) -> Result<Vec<Vec<(usize, FqElem)>>> {
        let b = self.blocks.map(&|x| t.residue(x))?;
        Ok((0..self.ncols())
            .map(|j| {
                // targets within a column are distinct vertices, so rows never repeat
                let mut col = self.scatter(&b, j);
                col.retain(|e| e.1 != FqElem(0));
                col
            })
            .collect())
    }

    /// Smallest absolute precision among the assembled entries.
    pub fn entry_precision(&self, t: &Tower) -> i64 {
        self.blocks.entries().filter_map(EScalar::abs_precision).fold(t.cap() as i64, i64::min)
    }

    pub fn ncols(&self) -> usize {
        self.columns.len() * self.dim
    }

    pub fn nrows(&self) -> usize {
        self.rows.len() * self.dim
    }

    /// Level of the vertex behind column `j`.
    pub fn column_level(&self, j: usize) -> usize {
        self.columns[j / self.dim].level()
    }

    /// Columns from the outermost level inwards, so that leading terms are
    /// eliminated first.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.ncols()).collect();
        order.sort_by_key(|&j| std::cmp::Reverse(self.column_level(j)));
        order
    }

    pub fn to_function(&self, t: &Tower, w: &WeightProfile, x: &[EScalar]) -> Result<InducedFunction> {
        let mut f = InducedFunction::zero();
        for (i, u) in self.columns.iter().enumerate() {
            let v = LatticeVector::from_coeffs(w, x[i * self.dim..(i + 1) * self.dim].to_vec())?;
            f.add_term(t, u.clone(), v);
        }
        Ok(f)
    }

    /// Row coordinates of a function supported on `B_{N+1}`.
    pub fn row_vector(&self, t: &Tower, f: &InducedFunction) -> Result<Vec<EScalar>> {
        let mut out = vec![t.zero(); self.nrows()];
        for (x, v) in f.terms() {
            let Some(&i) = self.row_index.get(x) else {
                return Err(Error::IndexOutOfRange(format!("{x} lies outside B_{}", self.depth + 1)));
            };
            for (k, c) in v.coeffs().iter().enumerate() {
                out[i * self.dim + k] = c.clone();
            }
        }
        Ok(out)
    }

    fn dense(&self, t: &Tower) -> EMatrix {
        let mut m = EMatrix::zeros(t, self.nrows(), self.ncols());
        for j in 0..self.ncols() {
            for (i, x) in self.column(j) {
                m.set(i, j, t.add(m.get(i, j), &x));
            }
        }
        m
    }
}

/// Pivot valuations as a histogram, plus the margin between the largest pivot
/// valuation and the precision at which zeros were accepted.
fn pivot_summary(t: &Tower, h: &SparseHermite) -> (BTreeMap<i64, usize>, i64) {
    let mut hist = BTreeMap::new();
    let mut floor = h.discarded_precision.min(t.cap() as i64);
    let mut top = 0;
    for &c in &h.order {
        let x = h.pivot_entry(c).unwrap();
        let e = x.exponent().unwrap();
        *hist.entry(e).or_insert(0) += 1;
        top = top.max(e);
        floor = floor.min(x.abs_precision().unwrap());
    }
    (hist, floor - top)
}

fn levels_profile(a: &Assembly, h: &SparseHermite) -> serde_json::Value {
    let mut by_level: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for j in 0..a.ncols() {
        let e = by_level.entry(a.column_level(j)).or_default();
        e.0 += 1;
        if h.pivot_row[j].is_some() {
            e.1 += 1;
        }
    }
    by_level.into_iter().map(|(n, (cols, rank))| json!({"level": n, "columns": cols, "rank": rank})).collect()
}

fn text(t: &Tower, w: &WeightProfile, f: &InducedFunction) -> serde_json::Value {
    serde_json::to_value(f.to_text(t, w)).expect("textual forms serialize")
}

/// Builds the counterexample for `w` and checks it.
pub fn counterexample_probe(t: &Tower, w: &WeightProfile, s: &SatakeData) -> Result<ProbeReport> {
    let ce = build_counterexample(t, w, s)?;
    let check = check_counterexample(t, w, &ce.h, s)?;
    let image = hecke_t(t, w, &ce.h, Some(s))?;
    let floor = image
        .terms()
        .values()
        .flat_map(|v| v.coeffs().iter().filter_map(EScalar::abs_precision))
        .fold(t.cap() as i64, i64::min);
    Ok(ProbeReport {
        config: ConfigSummary::new(t, w, Some(s)),
        mode: ProbeMode::Counterexample,
        depth: ce.h.top_level().unwrap_or(0),
        verdict: check.verdict,
        certificate: json!({
            "case": ce.case,
            "sigma": ce.sigma,
            "tau": ce.tau,
            "delta": t.scalar_to_text(&ce.delta),
            "h": text(t, w, &ce.h),
            "image": text(t, w, &image),
            "check": check,
        }),
        precision_margin: floor,
        wall_time_ms: None,
    })
}

/// Whether every `x ∈ B_N(E)` with `(T − a_p)x` integral is itself integral.
///
/// Since the map is integral, containment holds exactly when it stays
/// injective mod `π`; a kernel vector `x̄` lifts to the violating `[x̄]/π`.
/// Up to `max_columns` unknowns the map is also eliminated over `O_E` from its
/// outermost level inwards: the row operations are unimodular and the pivot
/// block is triangular, so containment holds exactly when every pivot is a
/// unit. The two decisions must agree, and any violating vector is re-checked
/// by direct evaluation.
pub fn theta_kernel_probe(
    t: &Tower,
    w: &WeightProfile,
    s: &SatakeData,
    depth: usize,
    limits: &ProbeLimits,
) -> Result<ProbeReport> {
    let cap = limits.max_columns.max(limits.max_residue_columns);
    let a = Assembly::new(t, w, Some(s), depth, cap)?;
    let order = a.descending_order();
    let fq = fq_eliminate(t, a.nrows(), &a.residue_columns(t)?, &order);
    let free = fq.free_columns();
    let verdict = free.is_empty();
    let mut margin = a.entry_precision(t) - 1;
    let mut cert = json!({
        "columns": a.ncols(),
        "rows": a.nrows(),
        "residue_rank": fq.rank(),
    });

    let mut violating = None;
    if a.ncols() <= limits.max_columns {
        let h = hermite(t, a.matrix(t), Vec::new(), &order, t.cap() as i64)?;
        if h.order.len() < a.ncols() {
            return Err(Error::NotInjective(format!("rank {} < {} for T − a_p", h.order.len(), a.ncols())));
        }
        let (hist, m) = pivot_summary(t, &h);
        margin = m;
        let offending = h.order.iter().copied().find(|&c| h.pivot_entry(c).unwrap().exponent().unwrap() > 0);
        if offending.is_none() != verdict {
            return precision("elimination over O_E and mod π disagree on containment");
        }
        cert["pivot_valuations"] = json!(hist);
        if let Some(c) = offending {
            let mut b = vec![t.zero(); a.nrows()];
            b[h.pivot_row[c].unwrap()] = t.one();
            violating = Some((c, h.back_substitute(t, &b, a.ncols())?));
        }
    }
    if violating.is_none() {
        if let Some(&c) = free.first() {
            let lift = t.pi_pow(-1);
            let x = fq.kernel_vector(t, c).into_iter().map(|r| t.mul(&t.teich(r), &lift)).collect();
            violating = Some((c, x));
        }
    }

    cert["dense_cross_check"] = json!(if a.nrows() <= limits.dense_rows {
        let l = preimage_lattice(t, &a.dense(t), &LatticeBasis::standard(t, a.nrows()))?;
        let contained = l.is_integral(t)?;
        if contained != verdict {
            return precision("sparse and dense elimination disagree on containment");
        }
        Some(contained)
    } else {
        None
    });
    if let Some((c, x)) = violating {
        let f = a.to_function(t, w, &x)?;
        let check = check_counterexample(t, w, &f, s)?;
        if !check.verdict {
            return precision("violating vector fails direct re-evaluation");
        }
        cert["violating"] = json!({
            "pivot_column": c,
            "vertex": a.columns[c / a.dim].label(),
            "h": text(t, w, &f),
            "check": check,
        });
        if !theorem_conditions(w, t.p()).verdict {
            let ce = build_counterexample(t, w, s)?;
            if ce.h.top_level().is_some_and(|n| n <= depth) {
                cert["known_counterexample"] = json!({
                    "case": ce.case,
                    "check": check_counterexample(t, w, &ce.h, s)?,
                });
            }
        }
    }
    Ok(ProbeReport {
        config: ConfigSummary::new(t, w, Some(s)),
        mode: ProbeMode::ThetaKernel,
        depth,
        verdict,
        certificate: cert,
        precision_margin: margin,
        wall_time_ms: None,
    })
}

/// Whether `T: B_N(E) → B_{N+1}(E)` has trivial kernel at working precision.
pub fn t_injectivity_probe(t: &Tower, w: &WeightProfile, depth: usize, limits: &ProbeLimits) -> Result<ProbeReport> {
    let a = Assembly::new(t, w, None, depth, limits.max_columns)?;
    let order = a.descending_order();
    let h = hermite(t, a.matrix(t), Vec::new(), &order, t.cap() as i64)?;
    let (hist, margin) = pivot_summary(t, &h);
    let missing: Vec<usize> = (0..a.ncols()).filter(|&c| h.pivot_row[c].is_none()).collect();
    Ok(ProbeReport {
        config: ConfigSummary::new(t, w, None),
        mode: ProbeMode::TInjectivity,
        depth,
        verdict: missing.is_empty(),
        certificate: json!({
            "columns": a.ncols(),
            "rank": h.order.len(),
            "rank_by_level": levels_profile(&a, &h),
            "pivot_valuations": hist,
            "unpivoted_columns": missing,
        }),
        precision_margin: margin,
        wall_time_ms: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeparationOptions {
    pub n_max: usize,
    /// Number of samples of each random kind.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        SeparationOptions { n_max: 3, samples: 4, seed: 0 }
    }
}

fn random_integral(t: &Tower, rng: &mut ChaCha8Rng) -> EScalar {
    (0..3).fold(t.zero(), |acc, k| {
        let lam = FqElem(rng.gen_range(0..t.q() as u32));
        t.add(&acc, &t.mul(&t.teich(lam), &t.pi_pow(k)))
    })
}

fn random_function(t: &Tower, w: &WeightProfile, depth: usize, rng: &mut ChaCha8Rng) -> Result<InducedFunction> {
    let mut f = InducedFunction::zero();
    for u in enumerate_ball(t, depth) {
        if rng.gen_bool(0.5) {
            let coeffs = (0..w.dim()).map(|_| random_integral(t, rng)).collect();
            f.add_term(t, u, LatticeVector::from_coeffs(w, coeffs)?);
        }
    }
    Ok(f)
}

/// Compares `x` with the threshold `k`: `Some(val x ≥ k)` when certified.
fn at_least(t: &Tower, x: &EScalar, k: i64) -> Option<bool> {
    match t.val_pi(x) {
        Valuation::Finite(v) => Some(v >= k),
        Valuation::Infinite => Some(true),
        Valuation::AtLeast(v) => (v >= k).then_some(true),
    }
}

/// Finite-depth check of the descent behind separatedness: whenever an
/// integral `h ∈ B_N(O)` satisfies `h ≡ (T − a_p)y (mod p^n)` with
/// `y ∈ B_N(E)`, the level-`N` part of `y` lies in `p^n·(integral)`.
///
/// With unit pivots the solutions mod `p^n` are unique up to `p^n·B_N(O)`,
/// so checking the back-substituted solution decides the claim.
pub fn separation_probe(
    t: &Tower,
    w: &WeightProfile,
    s: &SatakeData,
    depth: usize,
    opts: &SeparationOptions,
    limits: &ProbeLimits,
) -> Result<ProbeReport> {
    let SeparationOptions { n_max, samples, seed } = *opts;
    if !theorem_conditions(w, t.p()).verdict {
        return Err(Error::NotApplicable("the weights fail the criterion; separation is not expected".into()));
    }
    let e = t.e() as i64;
    let ef = (t.e() * t.f()) as u64;
    if n_max as u64 * ef >= t.precision() as u64 {
        return precision(format!(
            "n_max·ef = {} reaches the precision M = {}; raise the precision",
            n_max as u64 * ef,
            t.precision()
        ));
    }
    if depth == 0 {
        return Err(Error::IndexOutOfRange("separation needs depth at least 1".into()));
    }
    let a = Assembly::new(t, w, Some(s), depth, limits.max_columns)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // (label, h, levels at which h is solvable by construction)
    let mut cases: Vec<(String, InducedFunction, usize)> = Vec::new();
    let mut e0 = LatticeVector::zeros(t, w);
    e0.set(0, t.one());
    cases.push(("identity".into(), InducedFunction::single(t, TreeVertex::origin(), e0), 0));
    for i in 0..samples {
        let g = random_function(t, w, depth - 1, &mut rng)?;
        let k = 1 + i % n_max.max(1);
        let r = random_function(t, w, depth, &mut rng)?;
        let h = hecke_t(t, w, &g, Some(s))?.add(t, &r.scale(t, &t.from_int(t.p().pow(k as u32) as i64)));
        cases.push((format!("image+p^{k}"), h, k));
    }
    for i in 0..samples {
        cases.push((format!("random{i}"), random_function(t, w, depth, &mut rng)?, 0));
    }

    let rhs: Vec<Vec<EScalar>> = {
        let vecs = cases.iter().map(|(_, h, _)| a.row_vector(t, h)).collect::<Result<Vec<_>>>()?;
        (0..a.nrows()).map(|r| vecs.iter().map(|v| v[r].clone()).collect()).collect()
    };
    let order = a.descending_order();
    let h = hermite(t, a.matrix(t), rhs, &order, t.cap() as i64)?;
    let (_, margin) = pivot_summary(t, &h);
    let units = h.order.len() == a.ncols() && h.pivot_exponents().iter().all(|&(_, v)| v == 0);
    let top: Vec<usize> = (0..a.ncols()).filter(|&j| a.column_level(j) == depth).collect();

    let mut verdict = units;
    let mut certified = n_max;
    let mut rows_out = Vec::new();
    for (k, (label, _, built)) in cases.iter().enumerate() {
        let b: Vec<EScalar> = (0..a.nrows()).map(|r| h.rhs[r][k].clone()).collect();
        let y = h.back_substitute(t, &b, a.ncols())?;
        let mut levels = Vec::new();
        for n in 0..=n_max {
            let thr = e * n as i64;
            let solvable = (0..a.nrows())
                .filter(|&r| !h.is_pivot_row(r))
                .map(|r| at_least(t, &b[r], thr))
                .try_fold(true, |acc, x| x.map(|x| acc && x));
            let descends = top.iter().map(|&j| at_least(t, &y[j], thr)).try_fold(true, |acc, x| x.map(|x| acc && x));
            let (Some(solvable), Some(descends)) = (solvable, descends) else {
                certified = certified.min(n.saturating_sub(1));
                break;
            };
            if (n <= *built && !solvable) || (solvable && !descends) {
                verdict = false;
            }
            levels.push(json!({"n": n, "solvable": solvable, "descends": solvable && descends}));
        }
        rows_out.push(json!({"sample": label, "levels": levels}));
    }
    if certified < n_max {
        verdict = false;
    }
    Ok(ProbeReport {
        config: ConfigSummary::new(t, w, Some(s)),
        mode: ProbeMode::Separation,
        depth,
        verdict,
        certificate: json!({
            "n_max": n_max,
            "certified_levels": certified,
            "seed": seed,
            "unit_pivots": units,
            "samples": rows_out,
            "scope": "finite-depth surrogate; says nothing beyond B_N",
        }),
        precision_margin: margin.min(t.cap() as i64) - e * n_max as i64,
        wall_time_ms: None,
    })
}
