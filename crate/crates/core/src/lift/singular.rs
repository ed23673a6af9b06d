//! Singular-value analogues: `F = f ∘ σ` for signed-permutation-invariant `f`.

use super::{snap_vector, stabilizer_test, SpectralFn, SpectralKind, Which};
use crate::error::{Error, Result};
use crate::matdecomp::{compose_rectangular, eig_sym, svd, Matrix, SvdTriple, SymMatrix};
use crate::polyfun::rational::QVec;
use crate::polyfun::{GenPolyhedron, PolyUnion};
use crate::symmetry::{partition_of, Partition};

fn require_singular(f: &SpectralFn) -> Result<()> {
    if f.kind != SpectralKind::Singular {
        return Err(Error::InvalidInput("expected a singular-value function".into()));
    }
    Ok(())
}

// Wide matrices are handled through their transpose.
fn tall(a: &Matrix) -> Matrix {
    if a.rows() < a.cols() {
        a.transpose()
    } else {
        a.clone()
    }
}

/// `F(A) = f(σ(A))`.
pub fn sing_value(f: &SpectralFn, a: &Matrix, tol: f64) -> Result<f64> {
    require_singular(f)?;
    let a = tall(a);
    if a.cols() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), found: a.cols() });
    }
    f.value_of_vector(&svd(&a)?.sigma, tol)
}

/// `∂F(A) = {Uᵀ Diag(g) V : g ∈ ∂f(σ(A)), A = Uᵀ Diag(σ(A)) V}`.
#[derive(Clone, Debug)]
pub struct SingularCert {
    pub a: Matrix,
    pub svd: SvdTriple,
    pub sigma_q: QVec,
    pub partition: Partition,
    pub vec_subdiff: GenPolyhedron,
    pub grouping_tol: f64,
    transposed: bool,
}

pub fn sing_subdiff(f: &SpectralFn, a: &Matrix, grouping_tol: f64) -> Result<SingularCert> {
    require_singular(f)?;
    let transposed = a.rows() < a.cols();
    let a = tall(a);
    if a.cols() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), found: a.cols() });
    }
    let svd = svd(&a)?;
    let sigma_q = snap_vector(&svd.sigma, grouping_tol)?;
    let vec_subdiff = f.base.subdiff(&sigma_q)?;
    let partition = partition_of(&svd.sigma, grouping_tol);
    Ok(SingularCert { a, svd, sigma_q, partition, vec_subdiff, grouping_tol, transposed })
}

impl SingularCert {
    /// Recovers `g` with `G = Uᵀ Diag(g) V` for some admissible pair, or
    /// `None`. In `W = U G Vᵀ` each positive block must be symmetric and
    /// everything off the blocks zero; the zero block, together with the
    /// extra rows of a tall matrix, contributes its singular values.
    pub fn diagonal_of(&self, g: &Matrix, tol: f64) -> Result<Option<Vec<f64>>> {
        let g = if self.transposed { g.transpose() } else { g.clone() };
        let (n, m) = (self.a.rows(), self.a.cols());
        if g.rows() != n || g.cols() != m {
            return Err(Error::DimensionMismatch { expected: n * m, found: g.rows() * g.cols() });
        }
        let w = self.svd.u.as_matrix().matmul(&g).matmul(&self.svd.v.as_matrix().transpose());
        let scale = 1.0 + g.frobenius_norm();
        let zero_block = self.partition.blocks().iter().position(|b| self.svd.sigma[b[0]] <= self.grouping_tol);
        let block_rows = |bi: usize| -> Vec<usize> {
            let mut r = self.partition.blocks()[bi].clone();
            if Some(bi) == zero_block {
                r.extend(m..n);
            }
            r
        };
        let mut d = vec![0.0; m];
        let nb = self.partition.blocks().len();
        let mut covered_rows = vec![false; n];
        for bi in 0..nb {
            let cols = &self.partition.blocks()[bi];
            let rows = block_rows(bi);
            for &r in &rows {
                covered_rows[r] = true;
            }
            for bj in 0..nb {
                if bi == bj {
                    continue;
                }
                if block_rows(bj).iter().any(|&r| cols.iter().any(|&c| w[(r, c)].abs() > tol * scale)) {
                    return Ok(None);
                }
            }
            let sub = Matrix::from_fn(rows.len(), cols.len(), |a, b| w[(rows[a], cols[b])]);
            let vals = if Some(bi) == zero_block {
                svd(&sub)?.sigma
            } else {
                if sub.sub(&sub.transpose()).max_abs() > tol * scale {
                    return Ok(None);
                }
                let sym = Matrix::from_fn(sub.rows(), sub.cols(), |a, b| 0.5 * (sub[(a, b)] + sub[(b, a)]));
                eig_sym(&SymMatrix::new(sym)?)?.lambda
            };
            for (&i, v) in cols.iter().zip(vals) {
                d[i] = v;
            }
        }
        // Extra rows with no zero block must vanish.
        for r in (0..n).filter(|&r| !covered_rows[r]) {
            if (0..m).any(|c| w[(r, c)].abs() > tol * scale) {
                return Ok(None);
            }
        }
        Ok(Some(d))
    }

    pub fn test(&self, which: Which, g: &Matrix, tol: f64) -> Result<bool> {
        let Some(d) = self.diagonal_of(g, tol)? else {
            return Ok(false);
        };
        let dq = snap_vector(&d, tol)?;
        stabilizer_test(&self.vec_subdiff, which, &dq, &self.svd.sigma, self.grouping_tol, true)
    }
}

/// `Uᵀ Diag(p) V` with `p` a nearest point of `Q` to `σ(A)`, taken in
/// absolute value and sorted.
pub fn sing_project(q: &PolyUnion, a: &Matrix, tol: f64) -> Result<Matrix> {
    let transposed = a.rows() < a.cols();
    let t = tall(a);
    let s = svd(&t)?;
    let p = q.project_f64(&s.sigma, tol)?;
    let mut p: Vec<f64> = p.iter().map(|v| v.abs()).collect();
    p.sort_by(|x, y| y.total_cmp(x));
    let out = compose_rectangular(&s.u, &p, &s.v);
    Ok(if transposed { out.transpose() } else { out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn diag(rows: usize, cols: usize, d: &[f64]) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| if i == j { d[i] } else { 0.0 })
    }

    fn nuclear() -> SpectralFn {
        SpectralFn::new(corpus::l1(2), SpectralKind::Singular).unwrap()
    }

    #[test]
    fn nuclear_norm_value() {
        assert!((sing_value(&nuclear(), &diag(2, 2, &[2.0, -3.0]), 1e-9).unwrap() - 5.0).abs() < 1e-12);
        let wide = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap();
        assert!((sing_value(&nuclear(), &wide, 1e-9).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_projection() {
        let q = corpus::at_most_one_nonzero(2);
        let p = sing_project(&q, &diag(2, 2, &[3.0, 1.0]), 1e-9).unwrap();
        assert!(p.sub(&diag(2, 2, &[3.0, 0.0])).max_abs() < 1e-12);
        let z = sing_project(&q, &Matrix::zeros(2, 2), 1e-9).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn signed_stabilizer_membership() {
        let cert = sing_subdiff(&nuclear(), &diag(2, 2, &[2.0, 0.0]), 1e-9).unwrap();
        assert!(cert.test(Which::Member, &diag(2, 2, &[1.0, 0.5]), 1e-9).unwrap());
        assert!(cert.test(Which::Member, &diag(2, 2, &[1.0, -0.5]), 1e-9).unwrap());
        assert!(!cert.test(Which::Member, &diag(2, 2, &[1.0, 2.0]), 1e-9).unwrap());
        assert!(!cert.test(Which::Member, &diag(2, 2, &[-1.0, 0.0]), 1e-9).unwrap());
    }

    #[test]
    fn tall_zero_block_includes_extra_rows() {
        let f = SpectralFn::new(corpus::l1(2), SpectralKind::Singular).unwrap();
        let cert = sing_subdiff(&f, &diag(3, 2, &[2.0, 0.0]), 1e-9).unwrap();
        // g on the zero block may live in the extra row.
        let mut g = diag(3, 2, &[1.0, 0.0]);
        g[(2, 1)] = 0.7;
        assert!(cert.test(Which::Member, &g, 1e-9).unwrap());
        g[(2, 1)] = 1.5;
        assert!(!cert.test(Which::Member, &g, 1e-9).unwrap());
    }
}
