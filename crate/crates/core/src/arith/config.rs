use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An embedding descriptor `(γ, j)`: Frobenius power `γ` on the unramified
/// part, and `y ↦ ζ_e^j · y` on the uniformizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub gamma: u32,
    pub j: u32,
}

/// Field parameters for the tower `GF(q) → Zq → O_F = Zq[y]/(y^e − p)`.
///
/// `h` is the monic defining polynomial of `GF(q)` over `GF(p)`, stored
/// little-endian with `f + 1` coefficients (the last one is `1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u64,
    pub f: u32,
    pub e: u32,
    pub h: Vec<u64>,
    pub precision: u32,
    pub embeddings: Vec<Embedding>,
}

/// Upper bound on `q`; the residue field is tabulated.
pub const MAX_Q: u64 = 1 << 16;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    p: u64,
    f: u32,
    #[serde(default = "one")]
    e: u32,
    h_coeffs: Option<Vec<u64>>,
    #[serde(default = "default_precision")]
    precision: u32,
    embeddings: Option<Vec<[u32; 2]>>,
}

fn one() -> u32 {
    1
}

pub(crate) fn default_precision() -> u32 {
    12
}

impl FieldConfig {
    /// Validates and builds a configuration. Missing `h` defaults to the
    /// smallest monic irreducible polynomial (by integer encoding of its low
    /// coefficients); missing embeddings default to `γ`-major order
    /// `index = γ·e + j`.
    pub fn new(
        p: u64,
        f: u32,
        e: u32,
        h: Option<Vec<u64>>,
        precision: u32,
        embeddings: Option<Vec<Embedding>>,
    ) -> Result<FieldConfig> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if p < 2 || !is_prime(p) {
            return bad(format!("p = {p} is not prime"));
        }
        if f == 0 || e == 0 {
            return bad("f and e must be positive".into());
        }
        let q = match p.checked_pow(f) {
            Some(q) if q <= MAX_Q => q,
            _ => return bad(format!("q = {p}^{f} exceeds the supported bound {MAX_Q}")),
        };
        if e > 1 && (q - 1) % e as u64 != 0 {
            return bad(format!("e = {e} does not divide q - 1 = {}", q - 1));
        }
        if precision < 2 {
            return bad("precision M must be at least 2".into());
        }
        match p.checked_pow(precision) {
            Some(m) if m < 1 << 62 => {}
            _ => return bad(format!("p^M = {p}^{precision} does not fit below 2^62")),
        }
        let h = match h {
            Some(h) => {
                let mut h: Vec<u64> = h.iter().map(|c| c % p).collect();
                while h.len() > 1 && h.last() == Some(&0) {
                    h.pop();
                }
                if h.len() != f as usize + 1 || h[f as usize] != 1 {
                    return bad(format!("h_coeffs must describe a monic polynomial of degree {f}"));
                }
                if !is_irreducible(&h, p) {
                    return bad(format!("h = {h:?} is not irreducible over GF({p})"));
                }
                h
            }
            None => default_modulus(p, f),
        };
        let embeddings = match embeddings {
            Some(list) => {
                if list.len() != (e * f) as usize {
                    return bad(format!("expected {} embeddings, got {}", e * f, list.len()));
                }
                for (k, s) in list.iter().enumerate() {
                    if s.gamma >= f || s.j >= e {
                        return bad(format!("embedding {k} = ({}, {}) out of range", s.gamma, s.j));
                    }
                    if list[..k].contains(s) {
                        return bad(format!("embedding ({}, {}) listed twice", s.gamma, s.j));
                    }
                }
                if !list.contains(&Embedding { gamma: 0, j: 0 }) {
                    return bad("the identity embedding (0, 0) must be listed".into());
                }
                list
            }
            None => (0..f)
                .flat_map(|gamma| (0..e).map(move |j| Embedding { gamma, j }))
                .collect(),
        };
        Ok(FieldConfig { p, f, e, h, precision, embeddings })
    }

    /// Default configuration for `(p, f, e)` at precision `m`.
    pub fn standard(p: u64, f: u32, e: u32, m: u32) -> Result<FieldConfig> {
        FieldConfig::new(p, f, e, None, m, None)
    }

    /// Parses the TOML form with keys `p`, `f`, `e`, `h_coeffs`, `precision`,
    /// `embeddings`.
    pub fn from_toml(text: &str) -> Result<FieldConfig> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
        FieldConfig::from_parts(raw)
    }

    pub(crate) fn from_table(table: toml::Table) -> Result<FieldConfig> {
        let raw: RawConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ParseError(e.to_string()))?;
        FieldConfig::from_parts(raw)
    }

    fn from_parts(raw: RawConfig) -> Result<FieldConfig> {
        let emb = raw
            .embeddings
            .map(|v| v.into_iter().map(|[gamma, j]| Embedding { gamma, j }).collect());
        FieldConfig::new(raw.p, raw.f, raw.e, raw.h_coeffs, raw.precision, emb)
    }

    pub fn to_toml(&self) -> String {
        let emb: Vec<String> =
            self.embeddings.iter().map(|s| format!("[{}, {}]", s.gamma, s.j)).collect();
        format!(
            "p = {}\nf = {}\ne = {}\nh_coeffs = {:?}\nprecision = {}\nembeddings = [{}]\n",
            self.p,
            self.f,
            self.e,
            self.h,
            self.precision,
            emb.join(", ")
        )
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    /// `[F : Q_p] = e·f`, the number of embeddings.
    pub fn degree(&self) -> usize {
        (self.e * self.f) as usize
    }

    /// Same field, different working precision.
    pub fn with_precision(&self, m: u32) -> Result<FieldConfig> {
        FieldConfig::new(self.p, self.f, self.e, Some(self.h.clone()), m, Some(self.embeddings.clone()))
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over GF(p), little-endian, trimmed.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1;
    let (mut b, mut k) = (a % p, p - 2);
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead = inv_mod(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead % p;
        for (i, &mi) in m.iter().enumerate() {
            r[k + i] = (r[k + i] + p - c * mi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % p;
        }
    }
    poly_rem(&c, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod h`.
fn frobenius_power_of_x(h: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut x = poly_rem(&[0, 1], h, p);
    for _ in 0..k {
        let mut acc = vec![1];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, h, p);
            }
            base = poly_mulmod(&base, &base, h, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin-style test: `x^(p^f) ≡ x` and `gcd(x^(p^k) − x, h) = 1` for `k < f`.
pub(crate) fn is_irreducible(h: &[u64], p: u64) -> bool {
    let f = h.len() - 1;
    if f == 0 {
        return false;
    }
    let x = poly_rem(&[0, 1], h, p);
    if frobenius_power_of_x(h, p, f as u32) != x {
        return false;
    }
    for k in 1..f as u32 {
        let mut t = frobenius_power_of_x(h, p, k);
        t.resize(t.len().max(2), 0);
        t[1] = (t[1] + p - 1) % p;
        let g = poly_gcd(&t, h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn default_modulus(p: u64, f: u32) -> Vec<u64> {
    let count = p.pow(f);
    for code in 0..count {
        let mut h: Vec<u64> = (0..f).map(|i| code / p.pow(i) % p).collect();
        h.push(1);
        if is_irreducible(&h, p) {
            return h;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}
