//! Seeded random points in strata, in relative interiors, and on spectral
//! orbits.

use num_traits::Zero;
use rand::Rng;

use crate::matdecomp::{conjugate_by, diag_embed, random_orthogonal, SymMatrix};
use crate::polyfun::rational::{self, qfrac, scale, QVec, Rational};
use crate::polyfun::{GenPolyhedron, MaxAffineFn, Stratum};

/// Random point of the stratum `M` near its representative, with
/// coordinates of small denominator. Moves along `aff M` and halves the step
/// until the signature is preserved.
pub fn sample_in_stratum(f: &MaxAffineFn, m: &Stratum, rng: &mut impl Rng) -> QVec {
    let basis = m.affine_hull.direction.basis();
    let mut step = Rational::from_integer(1.into());
    for _ in 0..40 {
        let mut z = m.representative.clone();
        for b in basis {
            let c = qfrac(rng.random_range(-16..=16), 16) * &step;
            z = rational::add(&z, &scale(b, &c));
        }
        if m.contains(f, &z) {
            return z;
        }
        step /= Rational::from_integer(2.into());
    }
    m.representative.clone()
}

/// Random point of `ri P`: positive convex weights on the points plus
/// positive multiples of the rays.
pub fn sample_ri(p: &GenPolyhedron, rng: &mut impl Rng) -> QVec {
    let weights: Vec<i64> = p.points().iter().map(|_| rng.random_range(1..=64)).collect();
    let total: i64 = weights.iter().sum();
    let mut x = vec![Rational::zero(); p.n];
    for (w, pt) in weights.iter().zip(p.points()) {
        x = rational::add(&x, &scale(pt, &qfrac(*w, total)));
    }
    for r in p.rays() {
        x = rational::add(&x, &scale(r, &qfrac(rng.random_range(1..=32), 8)));
    }
    x
}

/// `Uᵀ Diag(x) U` for a Haar-random `U`.
pub fn random_conjugate(x: &[f64], rng: &mut impl Rng) -> SymMatrix {
    let u = random_orthogonal(x.len(), rng);
    conjugate_by(&u, &diag_embed(x)).expect("dimensions agree")
}
