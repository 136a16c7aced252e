//! Sparse elimination over the residue field, for maps too large to carry
//! through `O_E` arithmetic.

use crate::arith::{FqElem, Tower};

type Row = Vec<(u32, FqElem)>;

const ZERO: FqElem = FqElem(0);

/// Row-reduced form of a sparse matrix over `GF(q)`.
#[derive(Clone, Debug)]
pub struct FqElimination {
    rows: Vec<Row>,
    /// For each column, the row holding its pivot.
    pub pivot_row: Vec<Option<usize>>,
    /// Columns in the order they were visited.
    pub order: Vec<usize>,
}

impl FqElimination {
    pub fn rank(&self) -> usize {
        self.pivot_row.iter().filter(|p| p.is_some()).count()
    }

    /// Columns without a pivot, in visiting order.
    pub fn free_columns(&self) -> Vec<usize> {
        self.order.iter().copied().filter(|&c| self.pivot_row[c].is_none()).collect()
    }

    /// A kernel vector with `x_c = 1` for the free column `c`, supported on `c`
    /// and the pivot columns visited before it.
    pub fn kernel_vector(&self, t: &Tower, c: usize) -> Vec<FqElem> {
        assert!(self.pivot_row[c].is_none(), "column {c} has a pivot");
        let ncols = self.pivot_row.len();
        let mut x = vec![ZERO; ncols];
        x[c] = FqElem(1);
        let pos = self.order.iter().position(|&j| j == c).unwrap();
        for &j in self.order[..pos].iter().rev() {
            let Some(r) = self.pivot_row[j] else { continue };
            let mut acc = ZERO;
            let mut piv = ZERO;
            for &(k, a) in &self.rows[r] {
                if k as usize == j {
                    piv = a;
                } else if x[k as usize] != ZERO {
                    acc = t.fq_add(acc, t.fq_mul(a, x[k as usize]));
                }
            }
            x[j] = t.fq_neg(t.fq_mul(acc, t.fq_inv(piv).unwrap()));
        }
        x
    }
}

fn entry(row: &Row, c: u32) -> Option<FqElem> {
    row.binary_search_by_key(&c, |e| e.0).ok().map(|i| row[i].1)
}

/// Eliminates column by column in `col_order`, pivoting on the sparsest
/// available row. `cols[j]` lists `(row, value)`; zeros are ignored.
pub fn fq_eliminate(t: &Tower, nrows: usize, cols: &[Vec<(usize, FqElem)>], col_order: &[usize]) -> FqElimination {
    let ncols = cols.len();
    let mut rows: Vec<Row> = vec![Vec::new(); nrows];
    for (j, col) in cols.iter().enumerate() {
        for &(i, x) in col {
            if x != ZERO {
                rows[i].push((j as u32, x));
            }
        }
    }
    // columns arrive in increasing order, so rows are already sorted
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut active = vec![true; nrows];
    let mut pivot_row = vec![None; ncols];
    for &c in col_order {
        let cu = c as u32;
        let mut cand: Vec<u32> = std::mem::take(&mut col_rows[c]);
        cand.sort_unstable();
        cand.dedup();
        cand.retain(|&r| active[r as usize] && entry(&rows[r as usize], cu).is_some());
        let Some(&p) = cand.iter().min_by_key(|&&r| (rows[r as usize].len(), r)) else { continue };
        let p = p as usize;
        active[p] = false;
        pivot_row[c] = Some(p);
        let prow = std::mem::take(&mut rows[p]);
        let inv = t.fq_inv(entry(&prow, cu).unwrap()).unwrap();
        for &r in &cand {
            let r = r as usize;
            if r == p {
                continue;
            }
            let old = std::mem::take(&mut rows[r]);
            let fct = t.fq_mul(entry(&old, cu).unwrap(), inv);
            let mut merged = Vec::with_capacity(old.len() + prow.len());
            let (mut i, mut k) = (0, 0);
            while i < old.len() || k < prow.len() {
                let ci = old.get(i).map_or(u32::MAX, |e| e.0);
                let ck = prow.get(k).map_or(u32::MAX, |e| e.0);
                let (col, val) = if ci < ck {
                    i += 1;
                    (ci, old[i - 1].1)
                } else if ck < ci {
                    k += 1;
                    col_rows[ck as usize].push(r as u32);
                    (ck, t.fq_neg(t.fq_mul(fct, prow[k - 1].1)))
                } else {
                    i += 1;
                    k += 1;
                    (ci, t.fq_sub(old[i - 1].1, t.fq_mul(fct, prow[k - 1].1)))
                };
                if val != ZERO {
                    merged.push((col, val));
                }
            }
            rows[r] = merged;
        }
        rows[p] = prow;
    }
    FqElimination { rows, pivot_row, order: col_order.to_vec() }
}
