//! Sparse Hermite elimination over `O_E` for the large, very sparse
//! truncated Hecke maps assembled by the probes.
//!
//! Only unimodular row operations `row_r ← row_r − c·row_p` with integral
//! `c` are used, so the transformed system describes the same lattices.

use std::collections::BTreeSet;

use crate::arith::{EScalar, Tower, Valuation};
use crate::error::{precision, Result};

pub type SparseRow = Vec<(usize, EScalar)>;

#[derive(Clone, Debug)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrix {
    /// Builds a matrix from sparse columns `(row, value)`; exact zeros are
    /// skipped and repeated positions summed.
    pub fn from_columns(t: &Tower, nrows: usize, cols: &[Vec<(usize, EScalar)>]) -> SparseMatrix {
        let mut rows: Vec<SparseRow> = vec![Vec::new(); nrows];
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col {
                if x.is_exact_zero() {
                    continue;
                }
                match rows[*i].last_mut() {
                    Some((c, y)) if *c == j => *y = t.add(y, x),
                    _ => rows[*i].push((j, x.clone())),
                }
            }
        }
        SparseMatrix { nrows, ncols: cols.len(), rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }
}

/// The outcome of [`hermite`].
#[derive(Clone, Debug)]
pub struct SparseHermite {
    /// Transformed rows.
    pub rows: Vec<SparseRow>,
    /// Transformed right-hand sides, per row.
    pub rhs: Vec<Vec<EScalar>>,
    /// For each column, the row holding its pivot.
    pub pivot_row: Vec<Option<usize>>,
    /// Pivoted columns in elimination order.
    pub order: Vec<usize>,
    /// Smallest absolute precision of any entry discarded as zero
    /// (`i64::MAX` if none was).
    pub discarded_precision: i64,
}

impl SparseHermite {
    pub fn pivot_entry(&self, col: usize) -> Option<&EScalar> {
        let r = self.pivot_row[col]?;
        self.rows[r].iter().find(|(c, _)| *c == col).map(|(_, x)| x)
    }

    /// Valuation (in `π`-digits) of each pivot, in elimination order.
    pub fn pivot_exponents(&self) -> Vec<(usize, i64)> {
        self.order
            .iter()
            .map(|&c| (c, self.pivot_entry(c).and_then(|x| x.exponent()).unwrap()))
            .collect()
    }

    pub fn is_pivot_row(&self, r: usize) -> bool {
        self.pivot_row.iter().any(|p| *p == Some(r))
    }

    /// Solves `R·y = b` on the pivot rows by back substitution; `b` is
    /// indexed by row. Non-pivot columns get zero.
    pub fn back_substitute(&self, t: &Tower, b: &[EScalar], ncols: usize) -> Result<Vec<EScalar>> {
        let mut y = vec![t.zero(); ncols];
        for &c in self.order.iter().rev() {
            let r = self.pivot_row[c].unwrap();
            let mut acc = b[r].clone();
            let mut piv = None;
            for (j, x) in &self.rows[r] {
                if *j == c {
                    piv = Some(x);
                } else if !y[*j].is_exact_zero() {
                    acc = t.sub(&acc, &t.mul(x, &y[*j]));
                }
            }
            y[c] = t.div(&acc, piv.unwrap())?;
        }
        Ok(y)
    }
}

fn droppable(x: &EScalar, drop_at: i64) -> bool {
    x.is_exact_zero() || (x.is_zero() && x.exponent().unwrap() >= drop_at)
}

/// Hermite elimination following `col_order`. The pivot of a column is the
/// active row of minimal valuation, ties broken by fewest nonzeros, then by
/// index. Zero entries with absolute precision at least `drop_at` are
/// discarded; a column whose only entries are less precise zeros aborts with
/// `PrecisionLoss`. Columns with no entry at all stay unpivoted.
pub fn hermite(
    t: &Tower,
    m: SparseMatrix,
    rhs: Vec<Vec<EScalar>>,
    col_order: &[usize],
    drop_at: i64,
) -> Result<SparseHermite> {
    let SparseMatrix { nrows, ncols, mut rows } = m;
    let mut rhs = if rhs.is_empty() { vec![Vec::new(); nrows] } else { rhs };
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c].insert(i);
        }
    }
    let mut pivot_row = vec![None; ncols];
    let mut order = Vec::new();
    let mut discarded = i64::MAX;
    for &c in col_order {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut ambiguous = false;
        for &r in &col_rows[c] {
            let x = &rows[r].iter().find(|(j, _)| *j == c).unwrap().1;
            match t.val_pi(x) {
                Valuation::Finite(v) => {
                    let key = (v, rows[r].len(), r);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
                _ => ambiguous = true,
            }
        }
        let Some((_, _, p)) = best else {
            if ambiguous {
                return precision(format!("column {c} has only imprecise zero entries"));
            }
            continue;
        };
        pivot_row[c] = Some(p);
        order.push(c);
        for (j, _) in &rows[p] {
            col_rows[*j].remove(&p);
        }
        let prow = std::mem::take(&mut rows[p]);
        let prhs = std::mem::take(&mut rhs[p]);
        let piv = &prow.iter().find(|(j, _)| *j == c).unwrap().1;
        let piv_inv = t.inv(piv)?;
        let targets: Vec<usize> = col_rows[c].iter().copied().collect();
        for r in targets {
            let old = std::mem::take(&mut rows[r]);
            let a_rc = &old.iter().find(|(j, _)| *j == c).unwrap().1;
            let fct = t.mul(a_rc, &piv_inv);
            let mut merged: SparseRow = Vec::with_capacity(old.len() + prow.len());
            let (mut i, mut k) = (0, 0);
            while i < old.len() || k < prow.len() {
                let ci = old.get(i).map_or(usize::MAX, |e| e.0);
                let ck = prow.get(k).map_or(usize::MAX, |e| e.0);
                let (col, val) = if ci < ck {
                    i += 1;
                    (ci, old[i - 1].1.clone())
                } else if ck < ci {
                    k += 1;
                    col_rows[ck].insert(r);
                    (ck, t.neg(&t.mul(&fct, &prow[k - 1].1)))
                } else {
                    i += 1;
                    k += 1;
                    (ci, t.sub(&old[i - 1].1, &t.mul(&fct, &prow[k - 1].1)))
                };
                if col == c || droppable(&val, drop_at) {
                    debug_assert!(col != c || val.is_zero());
                    if let Some(k) = val.exponent() {
                        discarded = discarded.min(k);
                    }
                    col_rows[col].remove(&r);
                    continue;
                }
                merged.push((col, val));
            }
            rows[r] = merged;
            for (x, y) in rhs[r].iter_mut().zip(&prhs) {
                *x = t.sub(x, &t.mul(&fct, y));
            }
        }
        rows[p] = prow;
        rhs[p] = prhs;
    }
    Ok(SparseHermite { rows, rhs, pivot_row, order, discarded_precision: discarded })
}
