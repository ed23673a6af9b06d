//! Spectral functions `F = f ∘ λ` (and `f ∘ σ`) built on a symmetric
//! polyhedral `f`: values, subdifferential certificates, projections,
//! proximal maps and lifted stratifications.

mod project;
pub mod sample;
mod singular;
mod strata;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matdecomp::{eig_sym, grouped_lambda, EigenPair, Matrix, SymMatrix};
use crate::polyfun::rational::{best_approximation, from_f64_exact, to_f64, QVec};
use crate::polyfun::stratify::stratum_hull;
use crate::polyfun::qlinalg::AffineProjector;
use crate::polyfun::{stratify, GenPolyhedron, MaxAffineFn, Stratification, SymmetryMode};
use crate::symmetry::{fix_group, partition_of, Partition, DEFAULT_ENUMERATION_CAP};

pub use project::{prox_candidates, soft_threshold, spectral_distance, spectral_project, spectral_prox, vector_prox};
pub use singular::{sing_project, sing_subdiff, sing_value, SingularCert};
pub use strata::{
    lift_dim, lift_stratification, numeric_tangent_dim, witness_f64, LiftedPairing, LiftedStratification, LiftedStratum, Region,
};

/// Largest denominator used when snapping eigenvalues to rationals.
pub const SNAP_DENOMINATOR: u64 = 1_000_000;

/// Groups `v` at `tol` (each block replaced by its mean), then replaces each
/// value by the best rational with denominator at most `10⁶` when that is
/// within `tol`, and by its exact dyadic value otherwise.
pub fn snap_vector(v: &[f64], tol: f64) -> Result<QVec> {
    let grouped = grouped_lambda(v, tol);
    grouped
        .iter()
        .map(|&g| {
            let r = best_approximation(g, SNAP_DENOMINATOR)?;
            if (to_f64(&r) - g).abs() <= tol {
                Ok(r)
            } else {
                from_f64_exact(g)
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralKind {
    Eigenvalue,
    Singular,
}

/// Which subdifferential test to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Member,
    Ri,
    Rb,
    Aff,
}

pub(crate) fn vec_test(set: &GenPolyhedron, which: Which, d: &[crate::polyfun::Rational]) -> Result<bool> {
    match which {
        Which::Member => set.contains(d),
        Which::Ri => set.ri_contains(d),
        Which::Rb => set.rb_contains(d),
        Which::Aff => Ok(set.aff_contains(d)),
    }
}

/// `F = f ∘ λ` or `F = f ∘ σ`.
#[derive(Debug)]
pub struct SpectralFn {
    pub base: MaxAffineFn,
    pub kind: SpectralKind,
    strat: OnceLock<Stratification>,
    prox_pieces: OnceLock<Vec<(AffineProjector, QVec)>>,
}

impl Clone for SpectralFn {
    fn clone(&self) -> Self {
        SpectralFn { base: self.base.clone(), kind: self.kind, strat: self.strat.clone(), prox_pieces: self.prox_pieces.clone() }
    }
}

impl SpectralFn {
    /// Eigenvalue lifts need a permutation-invariant base, singular-value
    /// lifts a signed-permutation-invariant one.
    pub fn new(base: MaxAffineFn, kind: SpectralKind) -> Result<Self> {
        let ok = match kind {
            SpectralKind::Eigenvalue => base.symmetry_mode() != SymmetryMode::Plain,
            SpectralKind::Singular => base.symmetry_mode() == SymmetryMode::Signed,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "{kind:?} lift needs a {} base function",
                if kind == SpectralKind::Singular { "signed" } else { "permutation or signed" }
            )));
        }
        Ok(SpectralFn { base, kind, strat: OnceLock::new(), prox_pieces: OnceLock::new() })
    }

    /// Vector-level use only (prox and strata of a possibly unsymmetric `f`).
    pub fn vector_only(base: MaxAffineFn) -> Self {
        SpectralFn { base, kind: SpectralKind::Eigenvalue, strat: OnceLock::new(), prox_pieces: OnceLock::new() }
    }

    pub fn eigen(base: MaxAffineFn) -> Result<Self> {
        SpectralFn::new(base, SpectralKind::Eigenvalue)
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    /// Cached stratification of the base function.
    pub fn stratification(&self) -> Result<&Stratification> {
        if let Some(s) = self.strat.get() {
            return Ok(s);
        }
        let s = stratify(&self.base)?;
        Ok(self.strat.get_or_init(|| s))
    }

    /// Per-stratum `(P_{aff M}, a_{i₀})` used by the exact vector prox.
    pub(crate) fn prox_pieces(&self) -> Result<&[(AffineProjector, QVec)]> {
        if let Some(p) = self.prox_pieces.get() {
            return Ok(p);
        }
        let strat = self.stratification()?;
        let pieces = strat
            .strata
            .iter()
            .map(|m| {
                let hull = stratum_hull(&self.base, &m.signature);
                (AffineProjector::new(hull), self.base.pieces()[m.signature.pieces[0]].0.clone())
            })
            .collect();
        Ok(self.prox_pieces.get_or_init(|| pieces))
    }

    /// `f(v)` with domain membership decided on the snapped vector.
    pub fn value_of_vector(&self, v: &[f64], tol: f64) -> Result<f64> {
        let snapped = snap_vector(v, tol)?;
        if !self.base.in_domain(&snapped) {
            return Ok(f64::INFINITY);
        }
        Ok(self.base.value_f64(v, f64::INFINITY))
    }
}

/// `F(X) = f(λ(X))`.
pub fn spectral_value(f: &SpectralFn, x: &SymMatrix, tol: f64) -> Result<f64> {
    let e = eig_sym(x)?;
    f.value_of_vector(&e.lambda, tol)
}

/// `∂F(X) = {Uᵀ Diag(v) U : v ∈ ∂f(λ(X)), U ∈ Oⁿ_X}`.
#[derive(Clone, Debug)]
pub struct SpectralSubdiffCert {
    pub x: SymMatrix,
    pub eig: EigenPair,
    pub lambda_q: QVec,
    pub partition: Partition,
    pub vec_subdiff: GenPolyhedron,
    pub grouping_tol: f64,
}

pub fn spectral_subdiff(f: &SpectralFn, x: &SymMatrix, grouping_tol: f64) -> Result<SpectralSubdiffCert> {
    let eig = eig_sym(x)?;
    let lambda_q = snap_vector(&eig.lambda, grouping_tol)?;
    let vec_subdiff = f.base.subdiff(&lambda_q)?;
    let partition = partition_of(&eig.lambda, grouping_tol);
    Ok(SpectralSubdiffCert { x: x.clone(), eig, lambda_q, partition, vec_subdiff, grouping_tol })
}

/// Tests `σd ∈ S` (or ri/rb/aff) over the distinct images of `d` under the
/// stabilizer. `S` is invariant under the stabilizer, so past the
/// enumeration cap testing `d` alone is exact.
pub(crate) fn stabilizer_test(
    set: &GenPolyhedron,
    which: Which,
    d: &QVec,
    reference: &[f64],
    grouping_tol: f64,
    absolute: bool,
) -> Result<bool> {
    let images: Vec<QVec> = match fix_group(reference, grouping_tol, absolute).elements(DEFAULT_ENUMERATION_CAP) {
        Ok(group) => group.iter().map(|s| s.apply(d)).collect::<BTreeSet<_>>().into_iter().collect(),
        Err(e) if e.is_budget() => vec![d.clone()],
        Err(e) => return Err(e),
    };
    for v in &images {
        if vec_test(set, which, v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

impl SpectralSubdiffCert {
    /// `V` rotated into the eigenbasis: `W = U V Uᵀ`.
    fn in_eigenbasis(&self, v: &SymMatrix) -> Matrix {
        let u = self.eig.u.as_matrix();
        u.matmul(v.as_matrix()).matmul(&u.transpose())
    }

    /// Simultaneous diagonalization of `V` with `X`: the commutator must
    /// vanish, `W = U V Uᵀ` must be block diagonal, and each block is
    /// diagonalized separately. Returns `None` when `V` does not commute.
    pub fn diagonal_of(&self, v: &SymMatrix, tol: f64) -> Result<Option<Vec<f64>>> {
        let n = self.x.n();
        if v.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.n() });
        }
        let scale = 1.0 + v.frobenius_norm();
        if self.x.commutator_norm(v) > tol * (1.0 + self.x.frobenius_norm()) * scale {
            return Ok(None);
        }
        let w = self.in_eigenbasis(v);
        let blocks = self.partition.blocks();
        let mut d = vec![0.0; n];
        for (bi, block) in blocks.iter().enumerate() {
            for (bj, other) in blocks.iter().enumerate() {
                if bi != bj && block.iter().any(|&a| other.iter().any(|&b| w[(a, b)].abs() > tol * scale)) {
                    return Ok(None);
                }
            }
            let sub = SymMatrix::new(Matrix::from_fn(block.len(), block.len(), |a, b| w[(block[a], block[b])]))?;
            let vals = eig_sym(&sub)?.lambda;
            for (&i, val) in block.iter().zip(vals) {
                d[i] = val;
            }
        }
        Ok(Some(d))
    }

    pub fn test(&self, which: Which, v: &SymMatrix, tol: f64) -> Result<bool> {
        let Some(d) = self.diagonal_of(v, tol)? else {
            return Ok(false);
        };
        let dq = snap_vector(&d, tol)?;
        stabilizer_test(&self.vec_subdiff, which, &dq, &self.eig.lambda, self.grouping_tol, false)
    }
}

pub fn spectral_subdiff_membership(cert: &SpectralSubdiffCert, v: &SymMatrix, tol: f64) -> Result<bool> {
    cert.test(Which::Member, v, tol)
}

pub fn spectral_ri_aff_rb(cert: &SpectralSubdiffCert, which: Which, v: &SymMatrix, tol: f64) -> Result<bool> {
    cert.test(which, v, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::matdecomp::diag_embed;
    use crate::polyfun::rational::{q, qfrac};

    #[test]
    fn snapping() {
        let s = snap_vector(&[1.0 / 3.0 + 1e-13, 0.5, 0.5 + 1e-12, 1e-17], 1e-9).unwrap();
        assert_eq!(s, vec![qfrac(1, 3), qfrac(1, 2), qfrac(1, 2), q(0)]);
        let s = snap_vector(&[0.1234567891234], 1e-15).unwrap();
        assert_eq!(s[0], from_f64_exact(0.1234567891234).unwrap());
    }

    #[test]
    fn kind_requires_matching_symmetry() {
        assert!(SpectralFn::new(corpus::f_max(2), SpectralKind::Singular).is_err());
        assert!(SpectralFn::new(corpus::l1(2), SpectralKind::Singular).is_ok());
        assert!(SpectralFn::eigen(corpus::f_max(2)).is_ok());
    }

    #[test]
    fn lambda_max_at_identity() {
        let f = SpectralFn::eigen(corpus::f_max(2)).unwrap();
        let x = SymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cert = spectral_subdiff(&f, &x, 1e-9).unwrap();
        let half = diag_embed(&[0.5, 0.5]);
        assert!(spectral_subdiff_membership(&cert, &half, 1e-9).unwrap());
        assert!(spectral_ri_aff_rb(&cert, Which::Ri, &half, 1e-9).unwrap());
        assert!(!spectral_subdiff_membership(&cert, &diag_embed(&[2.0, -1.0]), 1e-9).unwrap());
        assert!(spectral_ri_aff_rb(&cert, Which::Aff, &diag_embed(&[2.0, -1.0]), 1e-9).unwrap());
        assert!(!spectral_ri_aff_rb(&cert, Which::Aff, &diag_embed(&[1.0, 1.0]), 1e-9).unwrap());
        assert!(spectral_ri_aff_rb(&cert, Which::Rb, &diag_embed(&[1.0, 0.0]), 1e-9).unwrap());
        // Any trace-one PSD matrix, including non-diagonal ones.
        let v = SymMatrix::from_rows(&[vec![0.5, 0.3], vec![0.3, 0.5]]).unwrap();
        assert!(spectral_subdiff_membership(&cert, &v, 1e-9).unwrap());
    }

    #[test]
    fn non_commuting_is_rejected() {
        let f = SpectralFn::eigen(corpus::l1(2)).unwrap();
        let x = diag_embed(&[2.0, -3.0]);
        let cert = spectral_subdiff(&f, &x, 1e-9).unwrap();
        assert!(spectral_subdiff_membership(&cert, &diag_embed(&[1.0, -1.0]), 1e-9).unwrap());
        let v = SymMatrix::from_rows(&[vec![1.0, 0.1], vec![0.1, -1.0]]).unwrap();
        assert!(!spectral_subdiff_membership(&cert, &v, 1e-9).unwrap());
    }

    #[test]
    fn values() {
        let x = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = SpectralFn::eigen(corpus::l1(2)).unwrap();
        assert!((spectral_value(&f, &x, 1e-9).unwrap() - 2.0).abs() < 1e-12);
        let g = SpectralFn::eigen(corpus::f_max(3)).unwrap();
        assert!((spectral_value(&g, &diag_embed(&[1.0, 1.0, 1.0]), 1e-9).unwrap() - 1.0).abs() < 1e-12);
        let h = SpectralFn::eigen(corpus::neg_orthant_indicator(2)).unwrap();
        assert_eq!(spectral_value(&h, &diag_embed(&[1.0, -1.0]), 1e-9).unwrap(), f64::INFINITY);
        assert_eq!(spectral_value(&h, &diag_embed(&[-1e-15, -1.0]), 1e-9).unwrap(), 0.0);
    }
}
