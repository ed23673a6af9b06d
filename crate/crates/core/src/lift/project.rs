//! Distances, projections and proximal maps of spectral sets/functions.

use num_traits::Zero;

use super::SpectralFn;
use crate::error::{Error, Result};
use crate::matdecomp::{conjugate_by, diag_embed, eig_sym, SymMatrix};
use crate::polyfun::rational::{from_f64_exact, norm2, scale, sub, vec_from_f64_exact, vec_to_f64, QVec, Rational};
use crate::polyfun::{ExtValue, PolyUnion};
use crate::symmetry::sort_desc;

/// `d_{λ⁻¹(Q)}(X) = d_Q(λ(X))`, computed exactly on the dyadic value of `λ(X)`.
pub fn spectral_distance(q: &PolyUnion, x: &SymMatrix) -> Result<f64> {
    let e = eig_sym(x)?;
    q.distance_f64(&e.lambda)
}

/// `Uᵀ Diag(p) U` with `p = P_Q(λ(X))` sorted and `U` from `eig_sym(X)`.
/// Errors when the vector projection is not unique within `tol`.
pub fn spectral_project(q: &PolyUnion, x: &SymMatrix, tol: f64) -> Result<SymMatrix> {
    let e = eig_sym(x)?;
    let p = q.project_f64(&e.lambda, tol)?;
    let (sorted, _) = sort_desc(&p);
    conjugate_by(&e.u, &diag_embed(&sorted))
}

/// Feasible prox candidates `(x, f(x) + ‖x − y‖²/(2t))`, one per stratum.
///
/// On the stratum `M` containing the minimizer, `f` is affine with gradient
/// `a_{i₀}` and `(y − x)/t − a_{i₀} ⊥ aff M`, so the minimizer is
/// `P_{aff M}(y − t·a_{i₀})`.
pub fn prox_candidates(f: &SpectralFn, t: &Rational, y: &[Rational]) -> Result<Vec<(QVec, Rational)>> {
    if *t <= Rational::zero() {
        return Err(Error::InvalidInput("prox parameter must be positive".into()));
    }
    let base = &f.base;
    let two_t = t * Rational::from_integer(2.into());
    let mut out = Vec::new();
    for (proj, a) in f.prox_pieces()? {
        let cand = proj.project(&sub(y, &scale(a, t)));
        let ExtValue::Finite(v) = base.value(&cand) else {
            continue;
        };
        let obj = v + norm2(&sub(&cand, y)) / &two_t;
        out.push((cand, obj));
    }
    Ok(out)
}

/// Exact `prox_{tf}(y) = argmin f(x) + ‖x − y‖²/(2t)`: the best of the
/// [`prox_candidates`].
pub fn vector_prox(f: &SpectralFn, t: &Rational, y: &[Rational]) -> Result<QVec> {
    let (x, _) = prox_candidates(f, t, y)?
        .into_iter()
        .min_by(|a, b| a.1.cmp(&b.1))
        .ok_or_else(|| Error::Inconclusive("no feasible prox candidate".into()))?;
    if cfg!(debug_assertions) {
        // Optimality: (y − x)/t ∈ ∂f(x).
        let g = scale(&sub(y, &x), &t.recip());
        assert!(f.base.subdiff(&x)?.contains(&g)?, "prox optimality residual failed");
    }
    Ok(x)
}

/// `Uᵀ Diag(prox_{tf}(λ(X))) U`.
pub fn spectral_prox(f: &SpectralFn, t: f64, x: &SymMatrix) -> Result<SymMatrix> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("prox parameter must be positive".into()));
    }
    let e = eig_sym(x)?;
    let y = vec_from_f64_exact(&e.lambda)?;
    let p = vector_prox(f, &from_f64_exact(t)?, &y)?;
    conjugate_by(&e.u, &diag_embed(&vec_to_f64(&p)))
}

/// Soft-threshold `sign(y)·max(|y| − t, 0)`, the prox of `t‖·‖₁`.
pub fn soft_threshold(y: &[f64], t: f64) -> Vec<f64> {
    y.iter().map(|v| v.signum() * (v.abs() - t).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::polyfun::rational::{q, qfrac};

    #[test]
    fn negative_part_projection() {
        let q = PolyUnion::single(corpus::neg_orthant(2));
        let x = diag_embed(&[1.0, -2.0]);
        assert!((spectral_distance(&q, &x).unwrap() - 1.0).abs() < 1e-15);
        let p = spectral_project(&q, &x, 1e-12).unwrap();
        assert!(p.sub(&diag_embed(&[0.0, -2.0])).frobenius_norm() < 1e-14);
        let inside = diag_embed(&[-1.0, -2.0]);
        assert_eq!(spectral_distance(&q, &inside).unwrap(), 0.0);
    }

    #[test]
    fn l1_prox_is_soft_threshold() {
        let f = SpectralFn::eigen(corpus::l1(2)).unwrap();
        let p = vector_prox(&f, &q(1), &[q(2), qfrac(-1, 2)]).unwrap();
        assert_eq!(p, vec![q(1), q(0)]);
        let r = spectral_prox(&f, 1.0, &diag_embed(&[2.0, -0.5])).unwrap();
        assert!(r.sub(&diag_embed(&[1.0, 0.0])).frobenius_norm() < 1e-14);
        let y = [0.7, -0.2, 3.1];
        let f3 = SpectralFn::eigen(corpus::l1(3)).unwrap();
        let p = vector_prox(&f3, &qfrac(1, 4), &vec_from_f64_exact(&y).unwrap()).unwrap();
        let st = soft_threshold(&y, 0.25);
        for (a, b) in vec_to_f64(&p).iter().zip(&st) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn prox_of_indicator_is_projection() {
        let f = SpectralFn::eigen(corpus::neg_orthant_indicator(3)).unwrap();
        let p = vector_prox(&f, &q(5), &[q(1), q(-2), qfrac(1, 3)]).unwrap();
        assert_eq!(p, vec![q(0), q(-2), q(0)]);
    }
}
