//! Vertices of the Bruhat–Tits tree of `PGL₂(F)` as cosets `g·KZ`, with
//! their canonical representatives `g⁰_{n,μ}` and `g¹_{n,μ}`.

mod matrix;

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

pub use matrix::GMatrix;

use crate::arith::{EScalar, FqElem, Tower};
use crate::error::{Error, Result};

/// `μ = [μ₀] + π[μ₁] + … + π^{n−1}[μ_{n−1}]`, stored by its digits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DigitString(pub Vec<FqElem>);

impl DigitString {
    pub fn new(digits: Vec<FqElem>) -> DigitString {
        DigitString(digits)
    }

    pub fn empty() -> DigitString {
        DigitString(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[FqElem] {
        &self.0
    }

    /// The element of `O_F` this string represents.
    pub fn value(&self, t: &Tower) -> EScalar {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, d)| d.0 != 0)
            .fold(t.zero(), |acc, (i, &d)| t.add(&acc, &t.mul(&t.pi_pow(i as i64), &t.teich(d))))
    }

    /// `[μ]_m`, the first `m` digits.
    pub fn truncate(&self, m: usize) -> Result<DigitString> {
        if m > self.len() {
            return Err(Error::IndexOutOfRange(format!("cannot truncate {} digits to {m}", self.len())));
        }
        Ok(DigitString(self.0[..m].to_vec()))
    }

    pub fn push(&self, d: FqElem) -> DigitString {
        let mut out = self.0.clone();
        out.push(d);
        DigitString(out)
    }
}

/// The coset `g^{side}_{n,μ}·KZ`, with `n` the length of `μ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeVertex {
    side: u8,
    digits: DigitString,
}

impl TreeVertex {
    pub fn new(side: u8, digits: DigitString) -> TreeVertex {
        assert!(side <= 1, "side must be 0 or 1");
        TreeVertex { side, digits }
    }

    /// The vertex `Id·KZ`.
    pub fn origin() -> TreeVertex {
        TreeVertex::new(0, DigitString::empty())
    }

    /// The vertex `α·KZ`.
    pub fn alpha() -> TreeVertex {
        TreeVertex::new(1, DigitString::empty())
    }

    pub fn side(&self) -> u8 {
        self.side
    }

    pub fn level(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &DigitString {
        &self.digits
    }

    /// Distance to `Id·KZ`: side-1 vertices sit behind `α·KZ`.
    pub fn distance_to_origin(&self) -> usize {
        self.level() + self.side as usize
    }

    /// The neighbour one step closer to the base edge `{Id·KZ, α·KZ}`, if any.
    pub fn parent(&self) -> Option<TreeVertex> {
        let n = self.level();
        (n > 0).then(|| TreeVertex::new(self.side, self.digits.truncate(n - 1).unwrap()))
    }

    /// The `q` neighbours one level further out.
    pub fn children(&self, t: &Tower) -> Vec<TreeVertex> {
        t.fq_elements().map(|d| TreeVertex::new(self.side, self.digits.push(d))).collect()
    }

    /// A compact label `side:n:c₀.c₁…`, digits by their integer codes.
    pub fn label(&self) -> String {
        let codes: Vec<String> = self.digits.0.iter().map(|d| d.code().to_string()).collect();
        format!("{}:{}:{}", self.side, self.level(), codes.join("."))
    }
}

impl Ord for TreeVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level(), self.side, &self.digits).cmp(&(other.level(), other.side, &other.digits))
    }
}

impl PartialOrd for TreeVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(&self.label())
    }
}

/// All `q^n` strings of length `n`, lexicographic in the digit codes.
pub fn digit_strings(t: &Tower, n: usize) -> Vec<DigitString> {
    let mut out = vec![DigitString::empty()];
    for _ in 0..n {
        out = out.iter().flat_map(|s| t.fq_elements().map(move |d| s.push(d))).collect();
    }
    out
}

/// `S_n^{side}`.
pub fn enumerate_sphere(t: &Tower, side: u8, n: usize) -> Vec<TreeVertex> {
    digit_strings(t, n).into_iter().map(|mu| TreeVertex::new(side, mu)).collect()
}

/// `B_n = ⋃_{m ≤ n} S_m⁰ ∪ S_m¹`, in vertex order.
pub fn enumerate_ball(t: &Tower, n: usize) -> Vec<TreeVertex> {
    (0..=n).flat_map(|m| [0, 1].into_iter().flat_map(move |s| enumerate_sphere(t, s, m))).collect()
}

/// The ball `B_n` as a Graphviz graph, one edge per vertex towards its parent
/// plus the base edge.
pub fn ball_to_dot(t: &Tower, n: usize) -> String {
    ball_to_dot_marked(t, n, &[])
}

/// [`ball_to_dot`] with the vertices in `marked` filled, e.g. the support of
/// a function.
pub fn ball_to_dot_marked(t: &Tower, n: usize, marked: &[TreeVertex]) -> String {
    let mut out = String::from("graph ball {\n  node [shape=circle, fontsize=9];\n");
    let vertices = enumerate_ball(t, n);
    for v in &vertices {
        let fill = if marked.contains(v) { ", style=filled, fillcolor=gray80" } else { "" };
        let _ = writeln!(out, "  \"{v}\" [label=\"{}\"{fill}];", v.label());
    }
    let _ = writeln!(out, "  \"{}\" -- \"{}\";", TreeVertex::origin(), TreeVertex::alpha());
    for v in &vertices {
        if let Some(p) = v.parent() {
            let _ = writeln!(out, "  \"{p}\" -- \"{v}\";");
        }
    }
    out.push_str("}\n");
    out
}

/// `[μ]_m`; see [`DigitString::truncate`].
pub fn truncate(mu: &DigitString, m: usize) -> Result<DigitString> {
    mu.truncate(m)
}
