//! Fixed-precision arithmetic for the ring tower
//! `GF(q) → Zq = W(GF(q))/p^M → O_F = Zq[y]/(y^e − p)`.
//!
//! The coefficient ring `O_E` is taken to be `O_F` itself; with `e | q − 1`
//! it already contains the images of every embedding. All elements are plain
//! values and every operation is a method on [`Tower`].

mod config;
mod local;
mod scalar;
mod text;
mod tower;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

pub use config::{Embedding, FieldConfig, MAX_Q};
pub use scalar::{EScalar, Valuation};
pub use text::ScalarText;
pub use tower::Tower;

/// An element of `GF(q)`, stored by its polynomial-basis encoding
/// `Σ c_i p^i` (digits little-endian).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FqElem(pub u32);

impl FqElem {
    pub fn code(self) -> u32 {
        self.0
    }
}

/// An element of `Zq`: `f` coefficients modulo `p^M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZqElem(pub(crate) SmallVec<[u64; 4]>);

impl ZqElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

/// An element of `O_F` (equivalently `O_E`) modulo `p^M`, as `e`
/// coefficients in `Zq` of the powers of `y`. Stored flat.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalElem(pub(crate) SmallVec<[u64; 4]>);

impl LocalElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

pub type OFElem = LocalElem;
pub type OEElem = LocalElem;
