//! Spectral lifts of symmetric functions.
//!
//! A function `F = f ∘ λ` on symmetric matrices inherits variational structure
//! from the permutation-invariant function `f` on eigenvalue vectors. This crate
//! provides the computational side of that correspondence:
//!
//! * [`matdecomp`]: Jacobi eigen/singular value decompositions and the
//!   orthogonal conjugation action `U.X = UᵀXU`.
//! * [`symmetry`]: value partitions, permutation stabilizers, orbit and
//!   stabilizer dimensions, symmetrization of sets.
//! * [`polyfun`]: exact rational calculus for convex polyhedral (max-affine)
//!   functions: subdifferentials, cones, Fenchel conjugates, the face
//!   stratification and its duality map.
//! * [`lift`]: spectral values, subdifferential certificates, projections,
//!   proximal maps, lifted stratifications and singular-value analogues.
//! * [`idlab`]: numerical probes for projection calculus, prox-regularity,
//!   identifiability and partial smoothness.
//! * [`io`] and [`suite`]: JSON function files and verification suites.
//!
//! Matrices follow the convention `X = Uᵀ Diag(λ) U`: the rows of `U` are
//! eigenvectors.

pub mod corpus;
pub mod error;
pub mod idlab;
pub mod io;
pub mod lift;
pub mod matdecomp;
pub mod polyfun;
pub mod suite;
pub mod symmetry;

pub use error::{Error, Result};
