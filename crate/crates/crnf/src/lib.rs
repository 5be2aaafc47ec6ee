//! Formal normal forms for real hypersurfaces at generic Levi degeneracies.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated weighted power series, substitution, Fischer
//!   decompositions, graph/complex conversions.
//! * [`linalg`]: Hermitian eigensystems, Takagi factorization, group tests.
//! * [`cr_tensors`]: CR frames, the spaces `E_j` and `F_k`,
//!   nondegeneracy, the tensors `psi_j` and the cubic form.
//! * [`partial_nf`]: regular coordinates, third-order form, the semidefinite
//!   trichotomy and the generic partial normal form.
//! * [`normal_space`] and [`full_nf`]: the space of normal forms and the
//!   degree-by-degree normalization.
//! * [`equivalence`]: invariant signatures and normal-form comparison.
//! * [`parse`]: a small polynomial expression language for inputs.

pub mod coeff;
pub mod cr_tensors;
pub mod equivalence;
pub mod error;
pub mod full_nf;
pub mod hypersurface;
pub mod linalg;
pub mod map;
pub mod normal_space;
pub mod parse;
pub mod partial_nf;
pub mod series;

pub use error::{Error, Result};
