//! Linear algebra over `O_E` and `E` at working precision.
//!
//! Dense routines serve small systems (Vandermonde matrices, lattice
//! preimages, cross-checks); [`sparse`] handles the truncated Hecke maps.

mod dense;
mod fq;
pub mod sparse;

pub use dense::{
    det_valuation, echelonize, lattice_contains, preimage_lattice, smith, solve, EMatrix, Echelon,
    LatticeBasis, Pivot, Smith,
};
pub use fq::{fq_eliminate, FqElimination};
pub use sparse::{hermite, SparseHermite, SparseMatrix};
