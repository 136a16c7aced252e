//! The weight representation `⊗_σ Sym^{d_σ} O_E²` of `KZ`, its lattice
//! vectors, and the closed-form operators used by the Hecke action.

mod action;
mod vector;
mod weights;

pub use action::{act_kz, conjugated_step, multinomial, psi_alpha_inv, scalar_from_biguint, KZElement};
pub use vector::{CoeffText, LatticeVector};
pub use weights::{MultiIndex, WeightProfile, WeightRow, MAX_DIM, MAX_WEIGHT};

use crate::arith::Tower;
use crate::error::Result;

/// Whether `v` lies in the lattice `⊗ Sym^{d_σ} O_E²`.
pub fn is_integral_vec(t: &Tower, v: &LatticeVector) -> Result<bool> {
    v.is_integral(t)
}
