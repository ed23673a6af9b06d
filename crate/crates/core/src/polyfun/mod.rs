//! Exact rational calculus for symmetric convex polyhedral functions.

pub mod conjugate;
pub mod function;
pub mod lp;
pub mod polyhedron;
pub mod qlinalg;
pub mod rational;
pub mod sets;
pub mod stratify;

pub use conjugate::{
    biconjugate_check, conjugate_stratification, conjugate_value, dual_map, fenchel_young_check, j_fstar,
    ConjugateStratification, RelOpen,
};
pub use function::{ExtValue, MaxAffineFn, Signature};
pub use polyhedron::GenPolyhedron;
pub use rational::Rational;
pub use sets::{PolySet, PolyUnion, SymmetryMode};
pub use stratify::{stratify, Stratification, Stratum};
