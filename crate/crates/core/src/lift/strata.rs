//! Lifted stratifications: dimensions of `λ⁻¹(M^sym)` and the lifted
//! duality map `J_F`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sample::{random_conjugate, sample_in_stratum, sample_ri};
use super::{snap_vector, spectral_subdiff, SpectralFn, Which};
use crate::error::Result;
use crate::matdecomp::{conjugate_by, diag_embed, eig_sym, givens, random_orthogonal, Matrix, SymMatrix};
use crate::polyfun::conjugate::{conjugate_stratification, j_fstar, ConjugateStratification};
use crate::polyfun::polyhedron::{strictly_feasible, Halfspace};
use crate::polyfun::rational::{dot, format_vec, sub, to_f64, unit, vec_to_f64, zeros, QVec, Rational};
use crate::polyfun::{GenPolyhedron, MaxAffineFn, Stratification, Stratum};
use crate::symmetry::{orbit_dim, Partition};

/// A relatively open convex region of `Rⁿ`.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Stratum(&'a MaxAffineFn, &'a Stratum),
    RelOpen(&'a GenPolyhedron),
}

impl Region<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Region::Stratum(_, m) => m.dim,
            Region::RelOpen(p) => p.dim(),
        }
    }

    /// A point of the region whose sorted pattern of equal coordinates is
    /// exactly the contiguous partition `p`, if any.
    pub fn meet_pattern(&self, p: &Partition) -> Result<Option<QVec>> {
        let n = p.n();
        let mut pat_eq: Vec<QVec> = Vec::new();
        let mut pat_strict: Vec<QVec> = Vec::new();
        for (bi, block) in p.blocks().iter().enumerate() {
            for w in block.windows(2) {
                pat_eq.push(sub(&unit(n, w[0]), &unit(n, w[1])));
            }
            if bi + 1 < p.blocks().len() {
                let next = p.blocks()[bi + 1][0];
                pat_strict.push(sub(&unit(n, next), &unit(n, *block.last().unwrap())));
            }
        }
        match self {
            Region::Stratum(f, m) => {
                let (a0, b0) = &f.pieces()[m.signature.pieces[0]];
                let mut eqs: Vec<Halfspace> = Vec::new();
                let mut stricts: Vec<Halfspace> = Vec::new();
                for (i, (a, b)) in f.pieces().iter().enumerate() {
                    let row = (sub(a, a0), b0 - b);
                    if m.signature.pieces.contains(&i) {
                        eqs.push(row);
                    } else {
                        stricts.push(row);
                    }
                }
                for (j, (c, d)) in f.constraints().iter().enumerate() {
                    if m.signature.constraints.contains(&j) {
                        eqs.push((c.clone(), d.clone()));
                    } else {
                        stricts.push((c.clone(), d.clone()));
                    }
                }
                eqs.extend(pat_eq.into_iter().map(|r| (r, Rational::zero())));
                stricts.extend(pat_strict.into_iter().map(|r| (r, Rational::zero())));
                strictly_feasible(n, &eqs, &[], &stricts)
            }
            Region::RelOpen(poly) => {
                // x = Σ μ_i p_i + Σ ν_j r_j with all weights positive.
                let gens: Vec<&QVec> = poly.points().iter().chain(poly.rays()).collect();
                let np = poly.points().len();
                let nv = gens.len();
                let lift = |a: &QVec| -> QVec { gens.iter().map(|g| dot(a, g)).collect() };
                let mut eqs: Vec<Halfspace> =
                    vec![((0..nv).map(|j| if j < np { Rational::one() } else { Rational::zero() }).collect(), Rational::one())];
                eqs.extend(pat_eq.iter().map(|r| (lift(r), Rational::zero())));
                let mut stricts: Vec<Halfspace> = (0..nv)
                    .map(|j| {
                        let mut e = zeros(nv);
                        e[j] = -Rational::one();
                        (e, Rational::zero())
                    })
                    .collect();
                stricts.extend(pat_strict.iter().map(|r| (lift(r), Rational::zero())));
                Ok(strictly_feasible(nv, &eqs, &[], &stricts)?.map(|w| {
                    let mut x = zeros(n);
                    for (wj, g) in w.iter().zip(&gens) {
                        for (xi, gi) in x.iter_mut().zip(g.iter()) {
                            *xi += wj * gi;
                        }
                    }
                    x
                }))
            }
        }
    }
}

/// Contiguous partitions of `{0..n}` ordered by decreasing orbit dimension.
fn contiguous_patterns(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n.saturating_sub(1)) {
        let mut blocks = vec![vec![0]];
        for i in 1..n {
            if mask >> (i - 1) & 1 == 1 {
                blocks.push(vec![i]);
            } else {
                blocks.last_mut().unwrap().push(i);
            }
        }
        out.push(Partition::new(blocks).expect("valid"));
    }
    out.sort_by_key(|p| std::cmp::Reverse(orbit_dim(p)));
    out
}

/// `λ⁻¹(R^sym)` for a symmetric union of regions.
#[derive(Clone, Debug, Serialize)]
pub struct LiftedStratum {
    pub base_dim: usize,
    /// Partition `I*` of the maximal pattern meeting the orbit (1-based).
    pub pattern: Vec<Vec<usize>>,
    pub orbit_term: usize,
    pub dim_lifted: usize,
    /// Sorted point of the orbit with pattern `I*`.
    pub witness: Vec<String>,
    #[serde(skip)]
    pub witness_q: QVec,
}

/// `dim λ⁻¹(M) = dim M + Σ_{i<j} |I*_i||I*_j|` with `I*` the partition of
/// the largest sorted pattern meeting `M^sym`.
pub fn lift_dim(regions: &[Region]) -> Result<Option<LiftedStratum>> {
    let Some(first) = regions.first() else {
        return Ok(None);
    };
    let n = match first {
        Region::Stratum(f, _) => f.n,
        Region::RelOpen(p) => p.n,
    };
    for p in contiguous_patterns(n) {
        for r in regions {
            if let Some(x) = r.meet_pattern(&p)? {
                let orbit_term = orbit_dim(&p);
                return Ok(Some(LiftedStratum {
                    base_dim: r.dim(),
                    pattern: p.to_one_based(),
                    orbit_term,
                    dim_lifted: r.dim() + orbit_term,
                    witness: format_vec(&x),
                    witness_q: x,
                }));
            }
        }
    }
    Ok(None)
}

/// Numerical dimension of the tangent space of `λ⁻¹(M)` at
/// `X₀ = U₀ᵀ Diag(x) U₀`: rank of central difference quotients along
/// `t ↦ U₀ᵀ Diag(x + t d) U₀` for `d` in `directions` and along
/// `t ↦ (G_pq(t) U₀)ᵀ Diag(x) (G_pq(t) U₀)` for every plane rotation.
pub fn numeric_tangent_dim(x: &[f64], directions: &[Vec<f64>], seed: u64, rank_tol: f64) -> Result<usize> {
    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = random_orthogonal(n, &mut rng);
    let h = 1e-5;
    let vectorize = |m: &SymMatrix| -> Vec<f64> {
        let mut v = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                v.push(if i == j { m[(i, j)] } else { std::f64::consts::SQRT_2 * m[(i, j)] });
            }
        }
        v
    };
    let mut quotients: Vec<Vec<f64>> = Vec::new();
    for d in directions {
        let at = |t: f64| -> Result<SymMatrix> {
            let v: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + t * b).collect();
            conjugate_by(&u0, &diag_embed(&v))
        };
        let q = at(h)?.sub(&at(-h)?).scale(0.5 / h);
        quotients.push(vectorize(&q));
    }
    for p in 0..n {
        for q in p + 1..n {
            let at = |t: f64| conjugate_by(&givens(n, p, q, t).matmul(&u0), &diag_embed(x));
            let dq = at(h)?.sub(&at(-h)?).scale(0.5 / h);
            quotients.push(vectorize(&dq));
        }
    }
    let k = quotients.len();
    if k == 0 {
        return Ok(0);
    }
    let gram = Matrix::from_fn(k, k, |i, j| quotients[i].iter().zip(&quotients[j]).map(|(a, b)| a * b).sum());
    let ev = eig_sym(&SymMatrix::new(gram)?)?.lambda;
    let top = ev[0].max(0.0).sqrt().max(1.0);
    Ok(ev.iter().filter(|&&l| l.max(0.0).sqrt() > rank_tol * top).count())
}

/// Primal orbit `λ⁻¹(M^sym)` and its image `λ⁻¹(J_f(M^sym))`.
#[derive(Clone, Debug, Serialize)]
pub struct LiftedPairing {
    pub orbit: usize,
    pub members: Vec<usize>,
    pub primal: LiftedStratum,
    pub dual: LiftedStratum,
}

/// `A_F = {λ⁻¹(M^sym)}` paired with `{λ⁻¹(J_f(M^sym))}` and membership
/// predicates for both sides of `J_F ∘ λ⁻¹ = λ⁻¹ ∘ J_f`.
#[derive(Clone, Debug)]
pub struct LiftedStratification {
    pub f: SpectralFn,
    pub strat: Stratification,
    pub conj: ConjugateStratification,
    pub pairs: Vec<LiftedPairing>,
}

pub fn lift_stratification(f: &SpectralFn) -> Result<LiftedStratification> {
    let strat = f.stratification()?.clone();
    let conj = conjugate_stratification(&f.base, &strat)?;
    let mut pairs = Vec::with_capacity(strat.sym_orbits.len());
    for (orbit, members) in strat.sym_orbits.iter().enumerate() {
        let primal_regions: Vec<Region> = members.iter().map(|&m| Region::Stratum(&f.base, &strat.strata[m])).collect();
        let dual_regions: Vec<Region> = members.iter().map(|&m| Region::RelOpen(&conj.strata[m].set.closure)).collect();
        let primal = lift_dim(&primal_regions)?.expect("orbit meets the sorted cone");
        let dual = lift_dim(&dual_regions)?.expect("orbit image meets the sorted cone");
        pairs.push(LiftedPairing { orbit, members: members.clone(), primal, dual });
    }
    Ok(LiftedStratification { f: f.clone(), strat, conj, pairs })
}

impl LiftedStratification {
    /// `X ∈ λ⁻¹(M^sym)`.
    pub fn primal_member(&self, orbit: usize, x: &SymMatrix, tol: f64) -> Result<bool> {
        let lam = snap_vector(&eig_sym(x)?.lambda, tol)?;
        Ok(self.strat.locate(&self.f.base, &lam).is_some_and(|s| self.strat.orbit_of(s) == orbit))
    }

    /// `Y ∈ λ⁻¹(J_f(M^sym))`: `λ(Y) ∈ ri ∂f(M)` for some orbit member `M`.
    pub fn dual_image_member(&self, orbit: usize, y: &SymMatrix, tol: f64) -> Result<bool> {
        let lam = snap_vector(&eig_sym(y)?.lambda, tol)?;
        for &m in &self.pairs[orbit].members {
            if self.conj.strata[m].set.contains(&lam)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `Y ∈ J_F(λ⁻¹(M^sym))`: builds `X = Wᵀ Diag(x) W` from the eigenbasis
    /// `W` of `Y` and a point `x` of the primal stratum `J_{f*}(λ(Y))`, and
    /// checks `Y ∈ ri ∂F(X)` with the spectral certificate.
    pub fn jf_lift_member(&self, orbit: usize, y: &SymMatrix, tol: f64) -> Result<bool> {
        let e = eig_sym(y)?;
        let lam = snap_vector(&e.lambda, tol)?;
        let Some(m) = j_fstar(&self.f.base, &self.strat, &lam)? else {
            return Ok(false);
        };
        if self.strat.orbit_of(m) != orbit {
            return Ok(false);
        }
        let x = vec_to_f64(&self.strat.strata[m].representative);
        let xm = conjugate_by(&e.u, &diag_embed(&x))?;
        let cert = spectral_subdiff(&self.f, &xm, tol)?;
        cert.test(Which::Ri, y, tol)
    }

    /// `(x, Uᵀ Diag(x) U)` with `x` in a random member of the orbit and `U`
    /// Haar-random.
    pub fn sample_primal(&self, orbit: usize, rng: &mut impl Rng) -> (QVec, SymMatrix) {
        let members = &self.pairs[orbit].members;
        let m = &self.strat.strata[members[rng.random_range(0..members.len())]];
        let x = sample_in_stratum(&self.f.base, m, rng);
        let xm = random_conjugate(&vec_to_f64(&x), rng);
        (x, xm)
    }

    /// A random member of `λ⁻¹(J_f(M^sym))`.
    pub fn sample_dual_image(&self, orbit: usize, rng: &mut impl Rng) -> SymMatrix {
        let members = &self.pairs[orbit].members;
        let m = members[rng.random_range(0..members.len())];
        let y = sample_ri(&self.conj.strata[m].set.closure, rng);
        random_conjugate(&vec_to_f64(&y), rng)
    }

    /// A random member `V ∈ ri ∂F(X)` of `J_F(λ⁻¹(M^sym))`, with its `X`.
    pub fn sample_jf_of_lift(&self, orbit: usize, rng: &mut impl Rng) -> Result<(SymMatrix, SymMatrix)> {
        let members = &self.pairs[orbit].members;
        let m = &self.strat.strata[members[rng.random_range(0..members.len())]];
        let x = sample_in_stratum(&self.f.base, m, rng);
        let w = sample_ri(&self.f.base.subdiff(&x)?, rng);
        let u = random_orthogonal(x.len(), rng);
        Ok((conjugate_by(&u, &diag_embed(&vec_to_f64(&x)))?, conjugate_by(&u, &diag_embed(&vec_to_f64(&w)))?))
    }

    pub fn orbit_of_matrix(&self, x: &SymMatrix, tol: f64) -> Result<Option<usize>> {
        let lam = snap_vector(&eig_sym(x)?.lambda, tol)?;
        Ok(self.strat.locate(&self.f.base, &lam).map(|s| self.strat.orbit_of(s)))
    }
}

/// Converts an exact witness to floats, for callers building matrices.
pub fn witness_f64(s: &LiftedStratum) -> Vec<f64> {
    s.witness_q.iter().map(to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::polyfun::stratify;

    #[test]
    fn pattern_enumeration() {
        let p = contiguous_patterns(3);
        assert_eq!(p.len(), 4);
        assert_eq!(orbit_dim(&p[0]), 3);
        assert_eq!(orbit_dim(&p[3]), 0);
    }

    #[test]
    fn aab_fixture_lifts_to_dimension_four() {
        let f = corpus::f_max(3);
        let s = stratify(&f).unwrap();
        let m = s.strata.iter().find(|m| m.signature.pieces.len() == 2).unwrap();
        let members: Vec<Region> = s.sym_orbits[s.orbit_of(m.id)].iter().map(|&i| Region::Stratum(&f, &s.strata[i])).collect();
        let l = lift_dim(&members).unwrap().unwrap();
        assert_eq!((l.base_dim, l.orbit_term, l.dim_lifted), (2, 2, 4));
        assert_eq!(l.pattern, vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn constant_rank_dimensions() {
        let n = 3;
        let f = corpus::neg_orthant_indicator(n);
        let lifted = lift_stratification(&SpectralFn::eigen(f).unwrap()).unwrap();
        for pair in &lifted.pairs {
            let k = pair.primal.base_dim;
            assert_eq!(pair.primal.dim_lifted, k * (k + 1) / 2 + k * (n - k));
            let r = n - k;
            assert_eq!(pair.dual.base_dim, r);
            assert_eq!(pair.dual.dim_lifted, r * (r + 1) / 2 + r * (n - r));
        }
    }

    #[test]
    fn numeric_dimension_matches_formula() {
        // {(a, a, b) : a > b} at (1, 1, 0) with chart directions (1,1,0), (0,0,1).
        let d = numeric_tangent_dim(&[1.0, 1.0, 0.0], &[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 7, 1e-6).unwrap();
        assert_eq!(d, 4);
        // A point with distinct entries: the full orbit plus nothing else.
        assert_eq!(numeric_tangent_dim(&[3.0, 2.0, 1.0], &[], 7, 1e-6).unwrap(), 3);
    }
}
