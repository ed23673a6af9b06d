//! Exact linear algebra over `Q`: reduced row echelon form, null spaces,
//! affine subspaces and orthogonal projectors.

use num_traits::{One, Zero};
use serde::Serialize;

use super::rational::{self, dot, format_vec, sub, zeros, QVec, Rational};

/// Reduced row echelon form of `rows`; returns the nonzero rows and their
/// pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : Ax = 0}`.
pub fn null_space(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(ncols);
            v[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -&row[f];
            }
            v
        })
        .collect()
}

/// Remainder of `v` after elimination against an RREF basis.
fn reduce(basis: &[QVec], pivots: &[usize], v: &[Rational]) -> QVec {
    let mut w = v.to_vec();
    for (row, &p) in basis.iter().zip(pivots) {
        if !w[p].is_zero() {
            let f = w[p].clone();
            for (x, b) in w.iter_mut().zip(row) {
                *x -= &f * b;
            }
        }
    }
    w
}

/// A linear subspace stored by an RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub n: usize,
    basis: Vec<QVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(vectors: &[QVec], n: usize) -> Self {
        let (basis, pivots) = rref(vectors, n);
        Subspace { n, basis, pivots }
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace::span(&(0..n).map(|i| rational::unit(n, i)).collect::<Vec<_>>(), n)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVec] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        rational::is_zero(&reduce(&self.basis, &self.pivots, v))
    }

    pub fn complement(&self) -> Subspace {
        Subspace::span(&null_space(&self.basis, self.n), self.n)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let all: Vec<QVec> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(&all, self.n)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Orthogonal projector `P = B(BᵀB)⁻¹Bᵀ` as a dense matrix.
    pub fn projector(&self) -> Vec<QVec> {
        let n = self.n;
        let k = self.dim();
        if k == 0 {
            return vec![zeros(n); n];
        }
        // Gram matrix inverse via Gauss-Jordan on [G | I].
        let mut aug: Vec<QVec> = (0..k)
            .map(|i| {
                let mut row: QVec = (0..k).map(|j| dot(&self.basis[i], &self.basis[j])).collect();
                row.extend((0..k).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let (red, _) = rref(&aug, 2 * k);
        aug = red;
        let ginv: Vec<QVec> = aug.iter().map(|r| r[k..].to_vec()).collect();
        let mut p = vec![zeros(n); n];
        for a in 0..k {
            for b in 0..k {
                if ginv[a][b].is_zero() {
                    continue;
                }
                for i in 0..n {
                    if self.basis[a][i].is_zero() {
                        continue;
                    }
                    let f = &self.basis[a][i] * &ginv[a][b];
                    for j in 0..n {
                        if !self.basis[b][j].is_zero() {
                            p[i][j] += &f * &self.basis[b][j];
                        }
                    }
                }
            }
        }
        p
    }
}

pub fn mat_vec(m: &[QVec], v: &[Rational]) -> QVec {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `base + S` for a linear subspace `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSpace {
    pub base: QVec,
    pub direction: Subspace,
}

impl AffineSpace {
    pub fn point(p: QVec) -> Self {
        let n = p.len();
        AffineSpace { base: p, direction: Subspace::zero(n) }
    }

    /// Affine hull of points plus directions.
    pub fn hull(points: &[QVec], directions: &[QVec], n: usize) -> Option<Self> {
        let base = points.first()?.clone();
        let mut dirs: Vec<QVec> = points[1..].iter().map(|p| sub(p, &base)).collect();
        dirs.extend(directions.iter().cloned());
        Some(AffineSpace { base, direction: Subspace::span(&dirs, n) })
    }

    /// Solution set of `Ax = b`; `None` when inconsistent.
    pub fn solutions(a: &[QVec], b: &[Rational], n: usize) -> Option<Self> {
        let aug: Vec<QVec> = a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
        let (r, pivots) = rref(&aug, n + 1);
        if pivots.contains(&n) {
            return None;
        }
        let mut base = zeros(n);
        for (row, &p) in r.iter().zip(&pivots) {
            base[p] = row[n].clone();
        }
        Some(AffineSpace { base, direction: Subspace::span(&null_space(a, n), n) })
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.direction.contains(&sub(x, &self.base))
    }

    pub fn same_as(&self, other: &AffineSpace) -> bool {
        self.direction == other.direction && self.contains(&other.base)
    }

    pub fn to_json(&self) -> AffineJson {
        AffineJson {
            base: format_vec(&self.base),
            basis: self.direction.basis().iter().map(|b| format_vec(b)).collect(),
        }
    }
}

/// Serialized affine hull.
#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct AffineJson {
    pub base: Vec<String>,
    pub basis: Vec<Vec<String>>,
}

/// Precomputed orthogonal projection onto an affine space.
#[derive(Clone, Debug)]
pub struct AffineProjector {
    pub space: AffineSpace,
    proj: Vec<QVec>,
}

impl AffineProjector {
    pub fn new(space: AffineSpace) -> Self {
        let proj = space.direction.projector();
        AffineProjector { space, proj }
    }

    pub fn project(&self, y: &[Rational]) -> QVec {
        let d = sub(y, &self.space.base);
        rational::add(&self.space.base, &mat_vec(&self.proj, &d))
    }
}
