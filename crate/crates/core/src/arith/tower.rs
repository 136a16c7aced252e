use smallvec::{smallvec, SmallVec};

use super::config::{Embedding, FieldConfig};
use super::scalar::EScalar;
use super::{FqElem, LocalElem, ZqElem};

/// The ring tower for one [`FieldConfig`], with every table the arithmetic
/// needs precomputed once: the discrete log of `GF(q)`, Teichmüller lifts of
/// all residues, the Frobenius powers of `x` and the images `σ(π)`.
///
/// Elements are plain data; all operations go through the tower, in the
/// style `tower.mul(&a, &b)`.
#[derive(Clone, Debug)]
pub struct Tower {
    cfg: FieldConfig,
    pub(crate) p: u64,
    pub(crate) f: usize,
    pub(crate) e: usize,
    pub(crate) q: u64,
    pub(crate) m: u32,
    pub(crate) modulus: u64,
    small: bool,
    pub(crate) ppow: Vec<u64>,
    /// Low coefficients of the monic modulus `h̃`, as integers.
    hlow: Vec<u64>,
    fq_exp: Vec<u32>,
    fq_log: Vec<u32>,
    teich: Vec<ZqElem>,
    /// `frob[γ][i] = φ^γ(x^i)`.
    frob: Vec<Vec<ZqElem>>,
    zeta_e: Vec<ZqElem>,
    sigma_pi: Vec<EScalar>,
}

impl Tower {
    pub fn new(cfg: FieldConfig) -> Tower {
        let p = cfg.p;
        let f = cfg.f as usize;
        let e = cfg.e as usize;
        let q = cfg.q();
        let m = cfg.precision;
        let ppow: Vec<u64> = (0..=m).map(|k| p.pow(k)).collect();
        let modulus = ppow[m as usize];
        let hlow = cfg.h[..f].to_vec();
        let mut t = Tower {
            p,
            f,
            e,
            q,
            m,
            modulus,
            small: modulus < 1 << 32,
            ppow,
            hlow,
            fq_exp: Vec::new(),
            fq_log: Vec::new(),
            teich: Vec::new(),
            frob: Vec::new(),
            zeta_e: Vec::new(),
            sigma_pi: Vec::new(),
            cfg,
        };
        t.build_log_tables();
        t.teich = (0..q as u32).map(|c| t.compute_teichmuller(FqElem(c))).collect();
        t.build_frobenius();
        let step = ((q - 1) / e as u64) as usize;
        t.zeta_e = (0..e).map(|k| t.teich[t.fq_exp[k * step] as usize].clone()).collect();
        t.sigma_pi = (0..t.degree()).map(|s| t.compute_sigma_pi(s)).collect();
        t
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    /// Number of embeddings, `e·f`.
    pub fn degree(&self) -> usize {
        self.e * self.f
    }

    /// Relative precision cap in `π`-digits: `e·M`.
    pub fn cap(&self) -> u32 {
        self.e as u32 * self.m
    }

    pub fn embeddings(&self) -> &[Embedding] {
        &self.cfg.embeddings
    }

    pub(crate) fn local_len(&self) -> usize {
        self.e * self.f
    }

    // ----- modular integers -----

    #[inline]
    pub(crate) fn mm(&self, a: u64, b: u64) -> u64 {
        if self.small {
            a * b % self.modulus
        } else {
            ((a as u128 * b as u128) % self.modulus as u128) as u64
        }
    }

    #[inline]
    pub(crate) fn ma(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn mneg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub(crate) fn reduce_int(&self, n: i64) -> u64 {
        let m = self.modulus as i128;
        ((n as i128 % m + m) % m) as u64
    }

    // ----- GF(q) -----

    fn fq_mul_slow(&self, a: u32, b: u32) -> u32 {
        let (p, f) = (self.p, self.f);
        let da = self.fq_digits(FqElem(a));
        let db = self.fq_digits(FqElem(b));
        let mut c = vec![0u64; 2 * f];
        for i in 0..f {
            for j in 0..f {
                c[i + j] = (c[i + j] + da[i] * db[j]) % p;
            }
        }
        for k in (f..2 * f).rev() {
            let t = c[k];
            if t != 0 {
                for i in 0..f {
                    c[k - f + i] = (c[k - f + i] + (p - self.hlow[i]) * t) % p;
                }
                c[k] = 0;
            }
        }
        self.fq_from_digits(&c[..f]).0
    }

    fn build_log_tables(&mut self) {
        let q = self.q as u32;
        let order = q - 1;
        let gen = (1..q)
            .find(|&g| {
                let mut x = g;
                for k in 1..order {
                    if x == 1 {
                        return k == order;
                    }
                    x = self.fq_mul_slow(x, g);
                }
                x == 1
            })
            .expect("GF(q)^x is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = 1u32;
        for k in 0..order {
            exp.push(x);
            log[x as usize] = k;
            x = self.fq_mul_slow(x, gen);
        }
        self.fq_exp = exp;
        self.fq_log = log;
    }

    /// Digits of `x` in the polynomial basis, little-endian.
    pub fn fq_digits(&self, x: FqElem) -> SmallVec<[u64; 4]> {
        let mut c = x.0 as u64;
        (0..self.f)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    pub fn fq_from_digits(&self, d: &[u64]) -> FqElem {
        let mut c = 0u64;
        for &x in d.iter().rev() {
            c = c * self.p + x % self.p;
        }
        FqElem(c as u32)
    }

    /// All elements of `GF(q)` in encoding order.
    pub fn fq_elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q as u32).map(FqElem)
    }

    /// The generator `ω` of `GF(q)^×` with the smallest encoding.
    pub fn fq_generator(&self) -> FqElem {
        FqElem(self.fq_exp[1 % self.fq_exp.len()])
    }

    /// `ω^k`.
    pub fn fq_gen_pow(&self, k: u64) -> FqElem {
        FqElem(self.fq_exp[(k % (self.q - 1)) as usize])
    }

    pub fn fq_log(&self, x: FqElem) -> Option<u32> {
        match self.fq_log[x.0 as usize] {
            u32::MAX => None,
            l => Some(l),
        }
    }

    pub fn fq_add(&self, a: FqElem, b: FqElem) -> FqElem {
        let (da, db) = (self.fq_digits(a), self.fq_digits(b));
        let s: SmallVec<[u64; 4]> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.fq_from_digits(&s)
    }

    pub fn fq_neg(&self, a: FqElem) -> FqElem {
        let s: SmallVec<[u64; 4]> =
            self.fq_digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.fq_from_digits(&s)
    }

    pub fn fq_sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.fq_add(a, self.fq_neg(b))
    }

    pub fn fq_mul(&self, a: FqElem, b: FqElem) -> FqElem {
        match (self.fq_log(a), self.fq_log(b)) {
            (Some(x), Some(y)) => self.fq_gen_pow(x as u64 + y as u64),
            _ => FqElem(0),
        }
    }

    pub fn fq_inv(&self, a: FqElem) -> Option<FqElem> {
        self.fq_log(a).map(|l| self.fq_gen_pow(self.q - 1 - l as u64))
    }

    /// `a^k` with `0^0 = 1`.
    pub fn fq_pow(&self, a: FqElem, k: u64) -> FqElem {
        if k == 0 {
            return FqElem(1);
        }
        match self.fq_log(a) {
            Some(l) => self.fq_gen_pow(l as u64 * (k % (self.q - 1))),
            None => FqElem(0),
        }
    }

    // ----- Zq = (Z/p^M)[x]/(h̃) on coefficient slices -----

    pub(crate) fn zq_add_into(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        for i in 0..self.f {
            out[i] = self.ma(a[i], b[i]);
        }
    }

    pub(crate) fn zq_mul_into(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let f = self.f;
        if f == 1 {
            out[0] = self.mm(a[0], b[0]);
            return;
        }
        let mut c: SmallVec<[u64; 8]> = smallvec![0; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                c[i + j] = self.ma(c[i + j], self.mm(a[i], b[j]));
            }
        }
        for k in (f..2 * f - 1).rev() {
            let t = c[k];
            if t != 0 {
                for i in 0..f {
                    if self.hlow[i] != 0 {
                        let d = self.mm(self.hlow[i], t);
                        c[k - f + i] = self.ma(c[k - f + i], self.mneg(d));
                    }
                }
            }
        }
        out[..f].copy_from_slice(&c[..f]);
    }

    pub fn zq_zero(&self) -> ZqElem {
        ZqElem(smallvec![0; self.f])
    }

    pub fn zq_one(&self) -> ZqElem {
        self.zq_from_int(1)
    }

    pub fn zq_from_int(&self, n: i64) -> ZqElem {
        let mut z = self.zq_zero();
        z.0[0] = self.reduce_int(n);
        z
    }

    /// Reduces an arbitrary-degree integer polynomial modulo `h̃` and `p^M`.
    pub fn zq_from_poly(&self, coeffs: &[i64]) -> ZqElem {
        let f = self.f;
        let mut c: Vec<u64> = coeffs.iter().map(|&x| self.reduce_int(x)).collect();
        c.resize(c.len().max(f), 0);
        for k in (f..c.len()).rev() {
            let t = c[k];
            if t != 0 {
                for i in 0..f {
                    let d = self.mm(self.hlow[i], t);
                    c[k - f + i] = self.ma(c[k - f + i], self.mneg(d));
                }
            }
        }
        ZqElem(c[..f].iter().copied().collect())
    }

    pub fn zq_add(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let mut out = self.zq_zero();
        self.zq_add_into(&a.0, &b.0, &mut out.0);
        out
    }

    pub fn zq_neg(&self, a: &ZqElem) -> ZqElem {
        ZqElem(a.0.iter().map(|&x| self.mneg(x)).collect())
    }

    pub fn zq_sub(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        self.zq_add(a, &self.zq_neg(b))
    }

    pub fn zq_mul(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let mut out = self.zq_zero();
        self.zq_mul_into(&a.0, &b.0, &mut out.0);
        out
    }

    pub fn zq_pow(&self, a: &ZqElem, mut k: u64) -> ZqElem {
        let mut acc = self.zq_one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.zq_mul(&acc, &base);
            }
            base = self.zq_mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Reduction modulo `p`.
    pub fn zq_residue(&self, a: &ZqElem) -> FqElem {
        let d: SmallVec<[u64; 4]> = a.0.iter().map(|x| x % self.p).collect();
        self.fq_from_digits(&d)
    }

    /// Lift of a residue by its digits (not the Teichmüller lift).
    pub fn zq_lift(&self, x: FqElem) -> ZqElem {
        ZqElem(self.fq_digits(x))
    }

    /// Inverse of a unit by Newton iteration; `None` for non-units.
    pub fn zq_inv(&self, a: &ZqElem) -> Option<ZqElem> {
        let r = self.fq_inv(self.zq_residue(a))?;
        let mut w = self.zq_lift(r);
        let two = self.zq_from_int(2);
        let mut prec = 1;
        while prec < self.m {
            let t = self.zq_sub(&two, &self.zq_mul(a, &w));
            w = self.zq_mul(&w, &t);
            prec *= 2;
        }
        Some(w)
    }

    pub fn zq_is_zero(&self, a: &ZqElem) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    /// `p`-adic valuation of a `Zq` element, `None` for zero.
    pub fn zq_val(&self, a: &[u64]) -> Option<u32> {
        a.iter()
            .filter(|&&x| x != 0)
            .map(|&x| {
                let mut v = 0;
                let mut y = x;
                while y % self.p == 0 {
                    y /= self.p;
                    v += 1;
                }
                v
            })
            .min()
    }

    fn compute_teichmuller(&self, x: FqElem) -> ZqElem {
        let mut t = self.zq_lift(x);
        for _ in 0..self.m {
            t = self.zq_pow(&t, self.q);
        }
        t
    }

    /// The Teichmüller lift `[x]`: the unique `t ≡ x (mod p)` with `t^q = t`.
    pub fn teichmuller(&self, x: FqElem) -> ZqElem {
        self.teich[x.0 as usize].clone()
    }

    fn eval_h(&self, r: &ZqElem) -> (ZqElem, ZqElem) {
        // Horner for h̃ and h̃'.
        let f = self.f;
        let mut val = self.zq_one();
        let mut der = self.zq_zero();
        for i in (0..f).rev() {
            der = self.zq_add(&self.zq_mul(&der, r), &val);
            val = self.zq_add(&self.zq_mul(&val, r), &self.zq_from_int(self.hlow[i] as i64));
        }
        (val, der)
    }

    fn build_frobenius(&mut self) {
        let f = self.f;
        let x = self.zq_from_poly(&[0, 1]);
        // φ(x) is the root of h̃ congruent to x^p.
        let mut r = self.zq_pow(&x, self.p);
        let mut prec = 1;
        while prec < 2 * self.m {
            let (v, d) = self.eval_h(&r);
            let dinv = self.zq_inv(&d).expect("h is separable");
            r = self.zq_sub(&r, &self.zq_mul(&v, &dinv));
            prec *= 2;
        }
        debug_assert!(self.zq_is_zero(&self.eval_h(&r).0));
        let powers = |base: &ZqElem| -> Vec<ZqElem> {
            let mut out = Vec::with_capacity(f);
            let mut acc = self.zq_one();
            for _ in 0..f {
                out.push(acc.clone());
                acc = self.zq_mul(&acc, base);
            }
            out
        };
        let phi1 = powers(&r);
        let mut tables = vec![powers(&x)];
        let mut cur = x;
        for _ in 1..f {
            cur = apply_table(self, &phi1, &cur);
            tables.push(powers(&cur));
        }
        self.frob = tables;
    }

    /// The absolute Frobenius `φ` on `Zq`.
    pub fn frobenius(&self, x: &ZqElem) -> ZqElem {
        self.frobenius_pow(x, 1)
    }

    /// `φ^γ`, with `γ` taken modulo `f`.
    pub fn frobenius_pow(&self, x: &ZqElem, gamma: usize) -> ZqElem {
        apply_table(self, &self.frob[gamma % self.f], x)
    }

    pub(crate) fn frobenius_into(&self, x: &[u64], gamma: usize, out: &mut [u64]) {
        if gamma == 0 {
            out[..self.f].copy_from_slice(&x[..self.f]);
            return;
        }
        let tab = &self.frob[gamma];
        out[..self.f].iter_mut().for_each(|c| *c = 0);
        let mut tmp: SmallVec<[u64; 4]> = smallvec![0; self.f];
        for (i, &c) in x.iter().enumerate().take(self.f) {
            if c == 0 {
                continue;
            }
            for k in 0..self.f {
                tmp[k] = self.mm(c, tab[i].0[k]);
            }
            for k in 0..self.f {
                out[k] = self.ma(out[k], tmp[k]);
            }
        }
    }

    /// `ζ_e^k` where `ζ_e = [ω]^{(q−1)/e}`.
    pub(crate) fn zeta_e(&self, k: usize) -> &ZqElem {
        &self.zeta_e[k % self.e]
    }

    fn compute_sigma_pi(&self, s: usize) -> EScalar {
        let emb = self.cfg.embeddings[s];
        let mut u = self.local_zero();
        u.0[..self.f].copy_from_slice(&self.zeta_e(emb.j as usize).0);
        EScalar { exp: 1, rel: self.cap(), unit: u }
    }

    /// `σ(π)` for the embedding with the given index.
    pub fn sigma_pi(&self, s: usize) -> &EScalar {
        &self.sigma_pi[s]
    }

    /// The uniformizer `π = y` as an element of `O_F`.
    pub fn uniformizer(&self) -> LocalElem {
        let mut u = self.local_zero();
        if self.e == 1 {
            u.0[0] = self.p % self.modulus;
        } else {
            u.0[self.f] = 1;
        }
        u
    }
}

fn apply_table(t: &Tower, tab: &[ZqElem], x: &ZqElem) -> ZqElem {
    let mut out = t.zq_zero();
    for (i, &c) in x.0.iter().enumerate() {
        if c != 0 {
            let term = ZqElem(tab[i].0.iter().map(|&y| t.mm(c, y)).collect());
            out = t.zq_add(&out, &term);
        }
    }
    out
}
