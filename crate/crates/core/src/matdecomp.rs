//! Dense symmetric eigendecomposition, SVD, and orthogonal conjugation.
//!
//! Everything here uses the convention `X = Uᵀ Diag(λ) U`, so eigenvectors are
//! stored as the *rows* of `U`. For rectangular `A` (n × m, n ≥ m) the SVD is
//! `A = Uᵀ Diag(σ) V` with `Diag(σ)` the n × m matrix carrying `σ` on its
//! leading diagonal.

use std::ops::{Index, IndexMut};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmetry::partition_of;

const JACOBI_MAX_SWEEPS: usize = 30;
const SVD_MAX_SWEEPS: usize = 60;

/// Row-major dense real matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::InvalidInput("matrix has no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(Error::InvalidInput("matrix has no columns".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Frobenius inner product `tr(AᵀB)`.
    pub fn inner(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// `‖UᵀU − I‖_∞` (max-entry norm).
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose().matmul(self);
        let mut worst: f64 = 0.0;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// An n × n symmetric matrix. Construction symmetrizes via `(X + Xᵀ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let t = m.transpose();
        Ok(SymMatrix(m.add(&t).scale(0.5)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn inner(&self, other: &SymMatrix) -> f64 {
        self.0.inner(&other.0)
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix(self.0.sub(&other.0))
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(self.0.scale(s))
    }

    /// Commutator norm `‖XY − YX‖_F`.
    pub fn commutator_norm(&self, other: &SymMatrix) -> f64 {
        let xy = self.0.matmul(&other.0);
        let yx = other.0.matmul(&self.0);
        xy.sub(&yx).frobenius_norm()
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// An orthogonal matrix, `‖UᵀU − I‖_∞ ≤ 1e-10`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthMatrix(Matrix);

impl OrthMatrix {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = m.orthogonality_defect();
        if defect > Self::TOLERANCE {
            return Err(Error::InvalidInput(format!("matrix is not orthogonal (defect {defect:e})")));
        }
        Ok(OrthMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        OrthMatrix(Matrix::identity(n))
    }

    /// Matrix `A` with `(A x)_i = x_{image[i]}`. Then `A Diag(x) Aᵀ = Diag(σx)` and
    /// `A.Diag(x) = Aᵀ Diag(x) A = Diag(σ⁻¹x)`.
    pub fn permutation(image: &[usize]) -> Self {
        let n = image.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &j) in image.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        OrthMatrix(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn transpose(&self) -> OrthMatrix {
        OrthMatrix(self.0.transpose())
    }

    pub fn matmul(&self, other: &OrthMatrix) -> OrthMatrix {
        OrthMatrix(self.0.matmul(&other.0))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }
}

/// Ordered eigendecomposition `X = Uᵀ Diag(λ) U` with `λ` nonincreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub u: OrthMatrix,
    pub lambda: Vec<f64>,
}

impl EigenPair {
    pub fn reconstruct(&self) -> SymMatrix {
        conjugate_by(&self.u, &diag_embed(&self.lambda)).expect("dimensions agree by construction")
    }

    pub fn residual(&self, x: &SymMatrix) -> f64 {
        self.reconstruct().sub(x).frobenius_norm()
    }
}

/// `A = Uᵀ Diag(σ) V` with `U` n × n, `V` m × m and `σ` nonincreasing, nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdTriple {
    pub u: OrthMatrix,
    pub v: OrthMatrix,
    pub sigma: Vec<f64>,
}

impl SvdTriple {
    pub fn reconstruct(&self) -> Matrix {
        compose_rectangular(&self.u, &self.sigma, &self.v)
    }
}

/// `Uᵀ Diag(d) V` with the rectangular n × m diagonal embedding.
pub fn compose_rectangular(u: &OrthMatrix, d: &[f64], v: &OrthMatrix) -> Matrix {
    let n = u.n();
    let m = v.n();
    let mut out = Matrix::zeros(n, m);
    for (k, &dk) in d.iter().enumerate() {
        if dk == 0.0 {
            continue;
        }
        let uk = u.row(k);
        let vk = v.row(k);
        for a in 0..n {
            let s = uk[a] * dk;
            if s == 0.0 {
                continue;
            }
            for b in 0..m {
                out[(a, b)] += s * vk[b];
            }
        }
    }
    out
}

/// Diagonal matrix with the given diagonal.
pub fn diag_embed(v: &[f64]) -> SymMatrix {
    let mut m = Matrix::zeros(v.len(), v.len());
    for (i, &x) in v.iter().enumerate() {
        m[(i, i)] = x;
    }
    SymMatrix(m)
}

/// The action `U.X = UᵀXU`.
pub fn conjugate_by(u: &OrthMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    if u.n() != x.n() {
        return Err(Error::DimensionMismatch { expected: x.n(), found: u.n() });
    }
    let m = u.0.transpose().matmul(&x.0).matmul(&u.0);
    SymMatrix::new(m)
}

/// Cyclic Jacobi eigensolver with a threshold strategy.
///
/// Stops once the off-diagonal Frobenius mass is at most `1e-14·‖X‖_F`, or
/// after 30 sweeps. Sweep order is fixed, so the output is a deterministic
/// function of the input.
pub fn eig_sym(x: &SymMatrix) -> Result<EigenPair> {
    if !x.0.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = x.n();
    let mut a = x.0.clone();
    let mut v = Matrix::identity(n);
    let stop = 1e-14 * x.frobenius_norm();

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= stop {
            break;
        }
        // Rutishauser thresholds: skip tiny rotations during the first sweeps.
        let thresh = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let g = 100.0 * apq.abs();
                if sweep > 3 && a[(p, p)].abs() + g == a[(p, p)].abs() && a[(q, q)].abs() + g == a[(q, q)].abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable: ties keep their original index order.
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite"));
    let lambda = order.iter().map(|&i| diag[i]).collect();
    let u = Matrix::from_fn(n, n, |r, c| v[(c, order[r])]);
    Ok(EigenPair { u: OrthMatrix(u), lambda })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

// A ← JᵀAJ and V ← VJ for the plane rotation J in coordinates (p, q).
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// One-sided (Hestenes) Jacobi SVD of an n × m matrix with n ≥ m.
///
/// Wide matrices are rejected; callers transpose them first and swap the
/// roles of `U` and `V`.
pub fn svd(a: &Matrix) -> Result<SvdTriple> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (n, m) = (a.rows, a.cols);
    if n < m {
        return Err(Error::InvalidInput(format!("svd expects rows >= cols, got {n}x{m}")));
    }
    let mut b = a.clone();
    let mut w = Matrix::identity(m);
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    alpha += b[(k, p)] * b[(k, p)];
                    beta += b[(k, q)] * b[(k, q)];
                    gamma += b[(k, p)] * b[(k, q)];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let bp = b[(k, p)];
                    let bq = b[(k, q)];
                    b[(k, p)] = c * bp - s * bq;
                    b[(k, q)] = s * bp + c * bq;
                }
                for k in 0..m {
                    let wp = w[(k, p)];
                    let wq = w[(k, q)];
                    w[(k, p)] = c * wp - s * wq;
                    w[(k, q)] = s * wp + c * wq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..m).map(|j| (0..n).map(|k| b[(k, j)] * b[(k, j)]).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite"));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    if let Some(&neg) = sigma.iter().find(|s| **s < 0.0) {
        if neg < -1e-12 {
            return Err(Error::NegativeSingular(neg));
        }
    }
    let sigma: Vec<f64> = sigma.into_iter().map(|s| s.max(0.0)).collect();
    let v = Matrix::from_fn(m, m, |r, c| w[(c, order[r])]);

    let smax = sigma.first().copied().unwrap_or(0.0);
    let cutoff = 1e-13 * smax.max(f64::MIN_POSITIVE) * n as f64;
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (r, &j) in order.iter().enumerate() {
        if sigma[r] > cutoff {
            left.push((0..n).map(|k| b[(k, j)] / sigma[r]).collect());
        } else {
            left.push(vec![0.0; n]);
        }
    }
    let u = complete_orthonormal_rows(left, n);
    Ok(SvdTriple { u: OrthMatrix(u), v: OrthMatrix(v), sigma })
}

// Orthonormalizes the given rows (zero rows are placeholders to be filled) and
// completes them to an n × n orthogonal matrix with standard basis vectors.
fn complete_orthonormal_rows(mut rows: Vec<Vec<f64>>, n: usize) -> Matrix {
    rows.resize(n, vec![0.0; n]);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        match orthonormalize_against(row, &basis) {
            Some(q) => basis.push(q),
            None => {
                pending.push(i);
                basis.push(vec![0.0; n]);
            }
        }
    }
    let mut candidate = 0;
    for i in pending {
        let filled: Vec<Vec<f64>> = basis.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, r)| r.clone()).collect();
        loop {
            let mut e = vec![0.0; n];
            e[candidate % n] = 1.0;
            candidate += 1;
            if let Some(q) = orthonormalize_against(&e, &filled) {
                basis[i] = q;
                break;
            }
        }
    }
    Matrix::from_fn(n, n, |r, c| basis[r][c])
}

fn orthonormalize_against(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    // Two passes of modified Gram–Schmidt.
    for _ in 0..2 {
        for q in basis {
            let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= d * qi;
            }
        }
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 1e-8 * norm0 {
        return None;
    }
    Some(w.into_iter().map(|x| x / norm).collect())
}

/// Default eigenvalue grouping tolerance `1e-8·(1 + ‖X‖_F)`.
pub fn default_grouping_tol(x: &SymMatrix) -> f64 {
    1e-8 * (1.0 + x.frobenius_norm())
}

/// Replaces each block of (nearly) equal eigenvalues by its mean.
pub fn grouped_lambda(lambda: &[f64], grouping_tol: f64) -> Vec<f64> {
    let mut out = lambda.to_vec();
    for block in partition_of(lambda, grouping_tol).blocks() {
        let mean = block.iter().map(|&i| lambda[i]).sum::<f64>() / block.len() as f64;
        for &i in block {
            out[i] = mean;
        }
    }
    out
}

/// Draws `W·U` with `W` block-orthogonal for the eigenvalue blocks of `E`
/// (grouped at `grouping_tol`), so that `(WU)ᵀ Diag(λ) (WU)` reproduces `X`.
pub fn stabilizer_sample(e: &EigenPair, grouping_tol: f64, seed: u64) -> OrthMatrix {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = e.lambda.len();
    let mut w = Matrix::zeros(n, n);
    for block in partition_of(&e.lambda, grouping_tol).blocks() {
        let k = block.len();
        let q = random_orthogonal(k, &mut rng);
        for (a, &i) in block.iter().enumerate() {
            for (b, &j) in block.iter().enumerate() {
                w[(i, j)] = q.0[(a, b)];
            }
        }
    }
    OrthMatrix(w.matmul(&e.u.0))
}

/// Haar-distributed orthogonal matrix (Gaussian + Gram–Schmidt with sign fix).
/// For `n = 1` this is a random sign.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> OrthMatrix {
    loop {
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
        for r in &rows {
            match orthonormalize_against(r, &basis) {
                Some(q) => basis.push(q),
                None => break,
            }
        }
        if basis.len() == n {
            return OrthMatrix(Matrix::from_fn(n, n, |i, j| basis[i][j]));
        }
    }
}

/// Symmetric matrix with independent standard normal entries on and above the diagonal.
pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> SymMatrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g: f64 = rng.sample(StandardNormal);
            m[(i, j)] = g;
            m[(j, i)] = g;
        }
    }
    SymMatrix(m)
}

/// Rectangular matrix with standard normal entries.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Plane rotation by `angle` in coordinates `(p, q)`, i.e. `exp(angle·(E_pq − E_qp))`.
pub fn givens(n: usize, p: usize, q: usize, angle: f64) -> OrthMatrix {
    let mut m = Matrix::identity(n);
    let (s, c) = angle.sin_cos();
    m[(p, p)] = c;
    m[(q, q)] = c;
    m[(p, q)] = s;
    m[(q, p)] = -s;
    OrthMatrix(m)
}
