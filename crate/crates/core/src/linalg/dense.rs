use serde::{Deserialize, Serialize};

use crate::arith::{EScalar, ScalarText, Tower, Valuation};
use crate::error::{precision, Error, Result};

/// A dense matrix over `E`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EMatrix {
    rows: usize,
    cols: usize,
    data: Vec<EScalar>,
}

/// A pivot of an echelon form; the valuation is in `val_F` units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
    pub valuation: i64,
}

#[derive(Clone, Debug)]
pub struct Echelon {
    pub form: EMatrix,
    /// `transform · input = form`, with unit determinant.
    pub transform: EMatrix,
    pub pivots: Vec<Pivot>,
}

/// `left · input · right = diag`, with `left`, `right` invertible over `O_E`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: EMatrix,
    pub left: EMatrix,
    pub right: EMatrix,
    /// Valuations (in `π`-digits) of the nonzero diagonal entries, in order.
    pub exponents: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixText {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarText>,
}

impl EMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<EScalar>) -> EMatrix {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        EMatrix { rows, cols, data }
    }

    pub fn zeros(t: &Tower, rows: usize, cols: usize) -> EMatrix {
        EMatrix { rows, cols, data: vec![t.zero(); rows * cols] }
    }

    pub fn identity(t: &Tower, n: usize) -> EMatrix {
        let mut m = EMatrix::zeros(t, n, n);
        for i in 0..n {
            m.set(i, i, t.one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> EScalar) -> EMatrix {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        EMatrix { rows, cols, data }
    }

    /// A matrix whose columns are the given vectors.
    pub fn from_columns(t: &Tower, dim: usize, cols: &[Vec<EScalar>]) -> EMatrix {
        let mut m = EMatrix::zeros(t, dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &EScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: EScalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<EScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, t: &Tower, other: &EMatrix) -> EMatrix {
        assert_eq!(self.cols, other.rows);
        EMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = t.zero();
            for k in 0..self.cols {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if !a.is_exact_zero() && !b.is_exact_zero() {
                    acc = t.add(&acc, &t.mul(a, b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, t: &Tower, v: &[EScalar]) -> Vec<EScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = t.zero();
                for (k, x) in v.iter().enumerate() {
                    acc = t.add(&acc, &t.mul(self.get(i, k), x));
                }
                acc
            })
            .collect()
    }

    /// Entrywise equality at precision.
    pub fn eq_at_precision(&self, t: &Tower, other: &EMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| t.eq_at_precision(a, b))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row_i ← row_i − c·row_k`.
    fn row_axpy(&mut self, t: &Tower, i: usize, k: usize, c: &EScalar) {
        for j in 0..self.cols {
            let x = self.get(k, j);
            if !x.is_exact_zero() {
                let y = t.sub(self.get(i, j), &t.mul(c, x));
                self.set(i, j, y);
            }
        }
    }

    /// `col_j ← col_j − c·col_k`.
    fn col_axpy(&mut self, t: &Tower, j: usize, k: usize, c: &EScalar) {
        for i in 0..self.rows {
            let x = self.get(i, k);
            if !x.is_exact_zero() {
                let y = t.sub(self.get(i, j), &t.mul(c, x));
                self.set(i, j, y);
            }
        }
    }

    /// Smallest exponent among nonzero entries (0 for an all-zero matrix).
    fn min_exponent(&self) -> i64 {
        self.data.iter().filter(|x| !x.is_zero()).map(|x| x.exponent().unwrap()).min().unwrap_or(0)
    }

    pub fn to_json(&self, t: &Tower) -> serde_json::Value {
        let text = MatrixText {
            rows: self.rows,
            cols: self.cols,
            entries: self.data.iter().map(|x| t.scalar_to_text(x)).collect(),
        };
        serde_json::to_value(text).expect("matrix text serializes")
    }

    pub fn from_json(t: &Tower, v: &serde_json::Value) -> Result<EMatrix> {
        let text: MatrixText =
            serde_json::from_value(v.clone()).map_err(|e| Error::ParseError(e.to_string()))?;
        if text.entries.len() != text.rows * text.cols {
            return Err(Error::ParseError("entry count does not match dimensions".into()));
        }
        let data = text.entries.iter().map(|x| t.scalar_from_text(x)).collect::<Result<_>>()?;
        Ok(EMatrix { rows: text.rows, cols: text.cols, data })
    }
}

/// Zero threshold for a matrix: entries `O(π^k)` with `k` at least this are
/// zero; smaller `k` is ambiguous.
fn zero_threshold(t: &Tower, m: &EMatrix) -> i64 {
    t.cap() as i64 + m.min_exponent().min(0)
}

enum ColumnPick {
    Pivot(usize),
    Zero,
}

fn pick_in_column(t: &Tower, m: &EMatrix, col: usize, from: usize, thr: i64) -> Result<ColumnPick> {
    let mut best: Option<(i64, usize)> = None;
    let mut ambiguous = false;
    for i in from..m.rows {
        let x = m.get(i, col);
        match t.val_pi(x) {
            Valuation::Finite(v) => {
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, i));
                }
            }
            Valuation::AtLeast(k) if k < thr => ambiguous = true,
            _ => {}
        }
    }
    match best {
        Some((_, i)) => Ok(ColumnPick::Pivot(i)),
        None if ambiguous => precision(format!("column {col} is zero only to low precision")),
        None => Ok(ColumnPick::Zero),
    }
}

/// Row-echelon form by minimal-valuation partial pivoting.
pub fn echelonize(t: &Tower, m: &EMatrix) -> Result<Echelon> {
    let thr = zero_threshold(t, m);
    let mut a = m.clone();
    let mut u = EMatrix::identity(t, m.rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let ColumnPick::Pivot(best) = pick_in_column(t, &a, c, r, thr)? else {
            continue;
        };
        a.swap_rows(r, best);
        u.swap_rows(r, best);
        let piv_inv = t.inv(a.get(r, c))?;
        for i in r + 1..m.rows {
            if a.get(i, c).is_zero() {
                continue;
            }
            let factor = t.mul(a.get(i, c), &piv_inv);
            a.row_axpy(t, i, r, &factor);
            u.row_axpy(t, i, r, &factor);
        }
        pivots.push(Pivot { row: r, col: c, valuation: t.val(a.get(r, c)).finite().unwrap() });
        r += 1;
    }
    Ok(Echelon { form: a, transform: u, pivots })
}

/// Valuation of the determinant. When the matrix is singular at precision
/// the result is a certified lower bound `AtLeast(_)`, or `Infinite` if the
/// elimination met exactly zero columns only.
pub fn det_valuation(t: &Tower, m: &EMatrix) -> Result<Valuation> {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let thr = zero_threshold(t, m);
    let mut a = m.clone();
    let mut total = 0i64;
    for c in 0..n {
        match pick_in_column(t, &a, c, c, thr)? {
            ColumnPick::Pivot(best) => {
                a.swap_rows(c, best);
                let piv_inv = t.inv(a.get(c, c))?;
                total += a.get(c, c).exponent().unwrap();
                for i in c + 1..n {
                    if a.get(i, c).is_zero() {
                        continue;
                    }
                    let factor = t.mul(a.get(i, c), &piv_inv);
                    // Columns left of c are already eliminated in row i.
                    for j in c..n {
                        let x = a.get(c, j);
                        if !x.is_exact_zero() {
                            let y = t.sub(a.get(i, j), &t.mul(&factor, x));
                            a.set(i, j, y);
                        }
                    }
                }
            }
            ColumnPick::Zero => {
                // Row-minimum bound on the current matrix: every Leibniz
                // term takes one entry from each row.
                let mut bound = 0i64;
                for i in 0..n {
                    match (0..n).filter_map(|j| a.get(i, j).exponent()).min() {
                        Some(k) => bound += k,
                        None => return Ok(Valuation::Infinite),
                    }
                }
                return Ok(Valuation::AtLeast(bound * t.f() as i64));
            }
        }
    }
    Ok(Valuation::Finite(total * t.f() as i64))
}

/// Smith normal form by minimal-valuation full pivoting (ties by smallest
/// `(row, col)`).
pub fn smith(t: &Tower, m: &EMatrix) -> Result<Smith> {
    let thr = zero_threshold(t, m);
    let mut a = m.clone();
    let mut left = EMatrix::identity(t, m.rows);
    let mut right = EMatrix::identity(t, m.cols);
    let mut exponents = Vec::new();
    for k in 0..m.rows.min(m.cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut ambiguous = false;
        for i in k..m.rows {
            for j in k..m.cols {
                match t.val_pi(a.get(i, j)) {
                    Valuation::Finite(v) => {
                        if best.is_none_or(|(b, _, _)| v < b) {
                            best = Some((v, i, j));
                        }
                    }
                    Valuation::AtLeast(z) if z < thr => ambiguous = true,
                    _ => {}
                }
            }
        }
        let Some((v, bi, bj)) = best else {
            if ambiguous {
                return precision("Smith form: remaining block is zero only to low precision");
            }
            break;
        };
        a.swap_rows(k, bi);
        left.swap_rows(k, bi);
        a.swap_cols(k, bj);
        right.swap_cols(k, bj);
        let piv_inv = t.inv(a.get(k, k))?;
        for i in k + 1..m.rows {
            if !a.get(i, k).is_zero() {
                let c = t.mul(a.get(i, k), &piv_inv);
                a.row_axpy(t, i, k, &c);
                left.row_axpy(t, i, k, &c);
            }
        }
        for j in k + 1..m.cols {
            if !a.get(k, j).is_zero() {
                let c = t.mul(a.get(k, j), &piv_inv);
                a.col_axpy(t, j, k, &c);
                right.col_axpy(t, j, k, &c);
            }
        }
        exponents.push(v);
    }
    Ok(Smith { diag: a, left, right, exponents })
}

/// Solves `b·x = rhs` for square `b` invertible over `E`.
pub fn solve(t: &Tower, b: &EMatrix, rhs: &EMatrix) -> Result<EMatrix> {
    assert_eq!(b.rows, b.cols);
    assert_eq!(b.rows, rhs.rows);
    let n = b.rows;
    let thr = zero_threshold(t, b);
    let mut a = b.clone();
    let mut r = rhs.clone();
    for c in 0..n {
        let ColumnPick::Pivot(best) = pick_in_column(t, &a, c, c, thr)? else {
            return Err(Error::NotInvertible("singular matrix".into()));
        };
        a.swap_rows(c, best);
        r.swap_rows(c, best);
        let piv_inv = t.inv(a.get(c, c))?;
        for i in c + 1..n {
            if !a.get(i, c).is_zero() {
                let f = t.mul(a.get(i, c), &piv_inv);
                a.row_axpy(t, i, c, &f);
                r.row_axpy(t, i, c, &f);
            }
        }
    }
    let mut x = EMatrix::zeros(t, n, rhs.cols);
    for k in 0..rhs.cols {
        for i in (0..n).rev() {
            let mut acc = r.get(i, k).clone();
            for j in i + 1..n {
                acc = t.sub(&acc, &t.mul(a.get(i, j), x.get(j, k)));
            }
            x.set(i, k, t.div(&acc, a.get(i, i))?);
        }
    }
    Ok(x)
}

/// A full-rank `O_E`-lattice in `E^n`, given by a basis.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    dim: usize,
    basis: Vec<Vec<EScalar>>,
    /// Elementary divisors relative to `O_E^n`, in `val_F` units, ascending.
    divisors: Vec<i64>,
}

impl LatticeBasis {
    pub fn standard(t: &Tower, n: usize) -> LatticeBasis {
        let e = EMatrix::identity(t, n);
        LatticeBasis { dim: n, basis: (0..n).map(|j| e.column(j)).collect(), divisors: vec![0; n] }
    }

    /// The lattice spanned by `n` independent vectors of `E^n`.
    pub fn new(t: &Tower, dim: usize, basis: Vec<Vec<EScalar>>) -> Result<LatticeBasis> {
        if basis.len() != dim || basis.iter().any(|v| v.len() != dim) {
            return Err(Error::NotApplicable("a full-rank lattice needs dim vectors of length dim".into()));
        }
        let s = smith(t, &EMatrix::from_columns(t, dim, &basis))?;
        if s.exponents.len() != dim {
            return Err(Error::NotInjective("lattice generators are dependent".into()));
        }
        let mut divisors: Vec<i64> = s.exponents.iter().map(|v| v * t.f() as i64).collect();
        divisors.sort_unstable();
        Ok(LatticeBasis { dim, basis, divisors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<EScalar>] {
        &self.basis
    }

    pub fn divisors(&self) -> &[i64] {
        &self.divisors
    }

    pub fn matrix(&self, t: &Tower) -> EMatrix {
        EMatrix::from_columns(t, self.dim, &self.basis)
    }

    /// Whether the lattice lies inside `O_E^n`.
    pub fn is_integral(&self, t: &Tower) -> Result<bool> {
        for v in &self.basis {
            for x in v {
                if !t.is_integral(x)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `{x : phi·x ∈ target}`.
pub fn preimage_lattice(t: &Tower, phi: &EMatrix, target: &LatticeBasis) -> Result<LatticeBasis> {
    assert_eq!(phi.rows, target.dim, "target lives in the codomain");
    let a = solve(t, &target.matrix(t), phi)?;
    let shift = (-a.min_exponent()).max(0);
    let scaled = scale_matrix(t, &a, shift);
    let s = smith(t, &scaled)?;
    if s.exponents.len() < phi.cols {
        return Err(Error::NotInjective(format!(
            "rank {} < {} at working precision",
            s.exponents.len(),
            phi.cols
        )));
    }
    let basis: Vec<Vec<EScalar>> = (0..phi.cols)
        .map(|i| {
            let c = t.pi_pow(shift - s.exponents[i]);
            s.right.column(i).iter().map(|x| t.mul(x, &c)).collect()
        })
        .collect();
    let mut divisors: Vec<i64> =
        s.exponents.iter().map(|a| (shift - a) * t.f() as i64).collect();
    divisors.sort_unstable();
    Ok(LatticeBasis { dim: phi.cols, basis, divisors })
}

fn scale_matrix(t: &Tower, m: &EMatrix, k: i64) -> EMatrix {
    let c = t.pi_pow(k);
    EMatrix { rows: m.rows, cols: m.cols, data: m.data.iter().map(|x| t.mul(x, &c)).collect() }
}

/// Whether `candidate` lies in the `O_E`-span of `outer`.
pub fn lattice_contains(t: &Tower, outer: &LatticeBasis, candidate: &[EScalar]) -> Result<bool> {
    assert_eq!(candidate.len(), outer.dim, "dimension mismatch");
    let rhs = EMatrix::from_columns(t, outer.dim, &[candidate.to_vec()]);
    let c = solve(t, &outer.matrix(t), &rhs)?;
    for i in 0..outer.dim {
        if !t.is_integral(c.get(i, 0))? {
            return Ok(false);
        }
    }
    Ok(true)
}
