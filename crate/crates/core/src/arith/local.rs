use smallvec::{smallvec, SmallVec};

use super::{FqElem, LocalElem, Tower, ZqElem};

// Layout: coefficient of x^i y^k sits at index k·f + i.

impl Tower {
    pub fn local_zero(&self) -> LocalElem {
        LocalElem(smallvec![0; self.local_len()])
    }

    pub fn local_one(&self) -> LocalElem {
        self.local_from_int(1)
    }

    pub fn local_from_int(&self, n: i64) -> LocalElem {
        let mut z = self.local_zero();
        z.0[0] = self.reduce_int(n);
        z
    }

    /// Embeds `Zq` as the constant term in `y`.
    pub fn local_from_zq(&self, a: &ZqElem) -> LocalElem {
        let mut z = self.local_zero();
        z.0[..self.f].copy_from_slice(&a.0);
        z
    }

    /// The coefficient of `y^k`.
    pub fn local_coeff(&self, a: &LocalElem, k: usize) -> ZqElem {
        ZqElem(a.0[k * self.f..(k + 1) * self.f].iter().copied().collect())
    }

    /// Builds `Σ_k A_k y^k`.
    pub fn local_from_coeffs(&self, coeffs: &[ZqElem]) -> LocalElem {
        let mut z = self.local_zero();
        for (k, c) in coeffs.iter().enumerate().take(self.e) {
            z.0[k * self.f..(k + 1) * self.f].copy_from_slice(&c.0);
        }
        z
    }

    /// `[λ]` viewed in `O_F`.
    pub fn local_teich(&self, x: FqElem) -> LocalElem {
        self.local_from_zq(&self.teichmuller(x))
    }

    pub fn local_is_zero(&self, a: &LocalElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn local_add(&self, a: &LocalElem, b: &LocalElem) -> LocalElem {
        LocalElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.ma(x, y)).collect())
    }

    pub fn local_neg(&self, a: &LocalElem) -> LocalElem {
        LocalElem(a.0.iter().map(|&x| self.mneg(x)).collect())
    }

    pub fn local_sub(&self, a: &LocalElem, b: &LocalElem) -> LocalElem {
        LocalElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.ma(x, self.mneg(y))).collect())
    }

    pub fn local_mul(&self, a: &LocalElem, b: &LocalElem) -> LocalElem {
        let (e, f) = (self.e, self.f);
        let mut out = self.local_zero();
        if e == 1 {
            self.zq_mul_into(&a.0, &b.0, &mut out.0);
            return out;
        }
        let mut prod: SmallVec<[u64; 4]> = smallvec![0; f];
        for k in 0..e {
            let ak = &a.0[k * f..(k + 1) * f];
            if ak.iter().all(|&c| c == 0) {
                continue;
            }
            for l in 0..e {
                let bl = &b.0[l * f..(l + 1) * f];
                if bl.iter().all(|&c| c == 0) {
                    continue;
                }
                self.zq_mul_into(ak, bl, &mut prod);
                let (slot, scale) = if k + l < e { (k + l, 1) } else { (k + l - e, self.p) };
                for i in 0..f {
                    let v = if scale == 1 { prod[i] } else { self.mm(prod[i], scale) };
                    out.0[slot * f + i] = self.ma(out.0[slot * f + i], v);
                }
            }
        }
        out
    }

    pub fn local_pow(&self, a: &LocalElem, mut k: u64) -> LocalElem {
        let mut acc = self.local_one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.local_mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.local_mul(&base, &base);
            }
        }
        acc
    }

    /// Multiplication by an integer.
    pub fn local_scale(&self, a: &LocalElem, n: i64) -> LocalElem {
        let c = self.reduce_int(n);
        LocalElem(a.0.iter().map(|&x| self.mm(x, c)).collect())
    }

    /// `π`-adic valuation in `π`-digits; `None` when the element is zero
    /// modulo `π^{eM}`.
    pub fn local_val(&self, a: &LocalElem) -> Option<u32> {
        let (e, f) = (self.e, self.f);
        (0..e)
            .filter_map(|k| self.zq_val(&a.0[k * f..(k + 1) * f]).map(|v| e as u32 * v + k as u32))
            .min()
    }

    /// Multiplication by `π^s`.
    pub fn local_shl(&self, a: &LocalElem, s: u32) -> LocalElem {
        let (e, f) = (self.e, self.f);
        if s >= self.cap() {
            return self.local_zero();
        }
        if e == 1 {
            let c = self.ppow[s as usize];
            return LocalElem(a.0.iter().map(|&x| self.mm(x, c)).collect());
        }
        let mut out = self.local_zero();
        for k in 0..e {
            let t = k + s as usize;
            let (slot, pw) = (t % e, t / e);
            if pw >= self.m as usize {
                continue;
            }
            let c = self.ppow[pw];
            for i in 0..f {
                out.0[slot * f + i] = self.mm(a.0[k * f + i], c);
            }
        }
        out
    }

    /// Division by `π^s`; the caller guarantees `val(a) ≥ s`. The top `s`
    /// digits of the result are undetermined and set to zero.
    pub fn local_shr(&self, a: &LocalElem, s: u32) -> LocalElem {
        let (e, f) = (self.e, self.f);
        if s == 0 {
            return a.clone();
        }
        let mut out = self.local_zero();
        for k in 0..e {
            let t = k + s as usize;
            let (src, pw) = (t % e, t / e);
            if pw > self.m as usize {
                continue;
            }
            let d = self.ppow[pw];
            for i in 0..f {
                out.0[k * f + i] = a.0[src * f + i] / d;
            }
        }
        out
    }

    /// Reduction modulo `π^r`.
    pub fn local_truncate(&self, a: &LocalElem, r: u32) -> LocalElem {
        if r >= self.cap() {
            return a.clone();
        }
        let (e, f) = (self.e as u32, self.f);
        let mut out = a.clone();
        for k in 0..e {
            let digits = if r <= k { 0 } else { (r - k).div_ceil(e) };
            let md = self.ppow[digits as usize];
            for i in 0..f {
                let c = &mut out.0[k as usize * f + i];
                *c %= md;
            }
        }
        out
    }

    /// Residue in `GF(q)`.
    pub fn local_residue(&self, a: &LocalElem) -> FqElem {
        self.zq_residue(&ZqElem(a.0[..self.f].iter().copied().collect()))
    }

    /// Inverse of a unit by Newton iteration; `None` for non-units.
    pub fn local_inv(&self, a: &LocalElem) -> Option<LocalElem> {
        let r = self.fq_inv(self.local_residue(a))?;
        let mut w = self.local_from_zq(&self.zq_lift(r));
        let two = self.local_from_int(2);
        let mut prec = 1;
        while prec < self.cap() {
            let t = self.local_sub(&two, &self.local_mul(a, &w));
            w = self.local_mul(&w, &t);
            prec *= 2;
        }
        Some(w)
    }

    /// The embedding with index `s`: `φ^γ` on coefficients and
    /// `y ↦ ζ_e^j·y`.
    pub fn embed(&self, s: usize, a: &LocalElem) -> LocalElem {
        let emb = self.embeddings()[s];
        let (e, f) = (self.e, self.f);
        if emb.gamma == 0 && emb.j == 0 {
            return a.clone();
        }
        let mut out = self.local_zero();
        let mut tmp: SmallVec<[u64; 4]> = smallvec![0; f];
        for k in 0..e {
            let ak = &a.0[k * f..(k + 1) * f];
            self.frobenius_into(ak, emb.gamma as usize, &mut tmp);
            let z = self.zeta_e(emb.j as usize * k);
            self.zq_mul_into(&tmp, &z.0, &mut out.0[k * f..(k + 1) * f]);
        }
        out
    }

    /// `z^{n⃗} = ∏_σ σ(z)^{n_σ}`.
    pub fn power_multiindex(&self, z: &LocalElem, n: &[u32]) -> LocalElem {
        assert_eq!(n.len(), self.degree(), "one exponent per embedding");
        let mut acc = self.local_one();
        for (s, &k) in n.iter().enumerate() {
            if k > 0 {
                acc = self.local_mul(&acc, &self.local_pow(&self.embed(s, z), k as u64));
            }
        }
        acc
    }
}
