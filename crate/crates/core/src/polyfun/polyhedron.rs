//! Polyhedra in generator form, exact relative-interior analysis of
//! inequality systems, and cone polarity.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{Lp, LpOutcome};
use super::qlinalg::{null_space, AffineJson, AffineSpace, Subspace};
use super::rational::{self, dot, format_vec, primitive_direction, q, scale, zeros, QVec, Rational};
use crate::error::{Error, Result};

/// One inequality `⟨a, x⟩ ≤ b`.
pub type Halfspace = (QVec, Rational);

/// A relative-interior point of `{x : Gx ≤ h, G_F x = h_F}` together with
/// every row that is tight on the whole set.
#[derive(Clone, Debug, PartialEq)]
pub struct RelInt {
    pub point: QVec,
    pub tight: Vec<usize>,
}

/// Finds the implicit equalities of an inequality system with rows `forced`
/// imposed as equalities. `None` when the system is infeasible.
pub fn relint_analysis(rows: &[Halfspace], n: usize, forced: &[usize]) -> Result<Option<RelInt>> {
    let mut tight: Vec<bool> = vec![false; rows.len()];
    for &k in forced {
        tight[k] = true;
    }
    let mut strict = vec![false; rows.len()];
    let mut points: Vec<QVec> = Vec::new();
    loop {
        let open: Vec<usize> = (0..rows.len()).filter(|&k| !tight[k] && !strict[k]).collect();
        let nv = n + open.len();
        let mut obj = zeros(nv);
        for o in obj.iter_mut().skip(n) {
            *o = Rational::one();
        }
        let mut lp = Lp::new(nv).maximize(obj);
        for j in n..nv {
            lp.set_nonneg(j);
            let mut e = zeros(nv);
            e[j] = Rational::one();
            lp.le(e, Rational::one());
        }
        for (k, (a, b)) in rows.iter().enumerate() {
            let mut row = a.clone();
            row.resize(nv, Rational::zero());
            if tight[k] {
                lp.eq(row, b.clone());
            } else if strict[k] {
                lp.le(row, b.clone());
            } else {
                let slot = n + open.iter().position(|&o| o == k).unwrap();
                row[slot] = Rational::one();
                lp.le(row, b.clone());
            }
        }
        let (sol, value) = match lp.solve()? {
            LpOutcome::Optimal { x, value } => (x, value),
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => unreachable!("slack variables are bounded"),
        };
        points.push(sol[..n].to_vec());
        if value.is_zero() {
            for k in open {
                tight[k] = true;
            }
            break;
        }
        for (slot, &k) in open.iter().enumerate() {
            if sol[n + slot].is_positive() {
                strict[k] = true;
            }
        }
        if open.iter().all(|&k| strict[k]) {
            break;
        }
    }
    let count = q(points.len() as i64);
    let mut point = zeros(n);
    for p in &points {
        point = rational::add(&point, p);
    }
    let point = scale(&point, &count.recip());
    let tight = (0..rows.len()).filter(|&k| tight[k]).collect();
    Ok(Some(RelInt { point, tight }))
}

/// A point satisfying `eqs` with equality, `les` weakly and `stricts`
/// strictly, if one exists.
pub fn strictly_feasible(nv: usize, eqs: &[Halfspace], les: &[Halfspace], stricts: &[Halfspace]) -> Result<Option<QVec>> {
    let mut obj = zeros(nv + 1);
    obj[nv] = Rational::one();
    let mut lp = Lp::new(nv + 1).maximize(obj);
    let widen = |a: &QVec, s: Rational| {
        let mut r = a.clone();
        r.push(s);
        r
    };
    for (a, b) in eqs {
        lp.eq(widen(a, Rational::zero()), b.clone());
    }
    for (a, b) in les {
        lp.le(widen(a, Rational::zero()), b.clone());
    }
    for (a, b) in stricts {
        lp.le(widen(a, Rational::one()), b.clone());
    }
    let mut cap = zeros(nv + 1);
    cap[nv] = Rational::one();
    lp.le(cap, Rational::one());
    Ok(match lp.solve()? {
        LpOutcome::Optimal { mut x, value } if value.is_positive() => {
            x.truncate(nv);
            Some(x)
        }
        _ => None,
    })
}

/// `conv(points) + cone(rays)` in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct GenPolyhedron {
    pub n: usize,
    points: Vec<QVec>,
    rays: Vec<QVec>,
    hull: AffineSpace,
}

/// Serialized generator form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GenPolyhedronJson {
    pub points: Vec<Vec<String>>,
    pub rays: Vec<Vec<String>>,
    pub affine_hull: AffineJson,
    pub dim: usize,
}

impl GenPolyhedron {
    /// Builds and canonicalizes; at least one point is required.
    pub fn new(n: usize, points: Vec<QVec>, rays: Vec<QVec>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        if points.iter().chain(&rays).any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: points[0].len() });
        }
        let mut pts: Vec<QVec> = Vec::new();
        for p in points {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let mut rs: Vec<QVec> = Vec::new();
        for r in rays {
            if rational::is_zero(&r) {
                continue;
            }
            let r = primitive_direction(&r);
            if !rs.contains(&r) {
                rs.push(r);
            }
        }
        // Drop rays inside the cone of the others, then dominated points.
        let mut i = 0;
        while i < rs.len() {
            let others: Vec<QVec> = rs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.clone()).collect();
            if in_cone(&others, &rs[i])? {
                rs.remove(i);
            } else {
                i += 1;
            }
        }
        let mut i = 0;
        while pts.len() > 1 && i < pts.len() {
            let others: Vec<QVec> = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
            if in_conv_cone(&others, &rs, &pts[i])? {
                pts.remove(i);
            } else {
                i += 1;
            }
        }
        pts.sort();
        rs.sort();
        let hull = AffineSpace::hull(&pts, &rs, n).expect("nonempty");
        Ok(GenPolyhedron { n, points: pts, rays: rs, hull })
    }

    pub fn point(p: QVec) -> Self {
        let n = p.len();
        GenPolyhedron::new(n, vec![p], Vec::new()).expect("single point")
    }

    pub fn cone(n: usize, rays: Vec<QVec>) -> Result<Self> {
        GenPolyhedron::new(n, vec![zeros(n)], rays)
    }

    pub fn points(&self) -> &[QVec] {
        &self.points
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn aff_hull(&self) -> &AffineSpace {
        &self.hull
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn is_cone(&self) -> bool {
        self.points.len() == 1 && rational::is_zero(&self.points[0])
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        in_conv_cone(&self.points, &self.rays, v)
    }

    /// `v ∈ ri P`: `v` admits a representation with all weights positive.
    pub fn ri_contains(&self, v: &[Rational]) -> Result<bool> {
        if !self.hull.contains(v) {
            return Ok(false);
        }
        let (np, nr) = (self.points.len(), self.rays.len());
        let nv = np + nr + 1;
        let s = nv - 1;
        let mut obj = zeros(nv);
        obj[s] = Rational::one();
        let mut lp = Lp::new(nv).maximize(obj);
        for j in 0..nv {
            lp.set_nonneg(j);
        }
        for i in 0..self.n {
            let mut row = zeros(nv);
            for (j, p) in self.points.iter().enumerate() {
                row[j] = p[i].clone();
            }
            for (j, r) in self.rays.iter().enumerate() {
                row[np + j] = r[i].clone();
            }
            lp.eq(row, v[i].clone());
        }
        let mut sum = zeros(nv);
        for x in sum.iter_mut().take(np) {
            *x = Rational::one();
        }
        lp.eq(sum, Rational::one());
        for j in 0..np + nr {
            let mut row = zeros(nv);
            row[j] = -Rational::one();
            row[s] = Rational::one();
            lp.le(row, Rational::zero());
        }
        let mut cap = zeros(nv);
        cap[s] = Rational::one();
        lp.le(cap, Rational::one());
        Ok(match lp.solve()? {
            LpOutcome::Optimal { value, .. } => value.is_positive(),
            _ => false,
        })
    }

    pub fn rb_contains(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.contains(v)? && !self.ri_contains(v)?)
    }

    pub fn aff_contains(&self, v: &[Rational]) -> bool {
        self.hull.contains(v)
    }

    /// Average of the points plus the sum of the rays.
    pub fn ri_point(&self) -> QVec {
        let mut p = zeros(self.n);
        for x in &self.points {
            p = rational::add(&p, x);
        }
        p = scale(&p, &q(self.points.len() as i64).recip());
        for r in &self.rays {
            p = rational::add(&p, r);
        }
        p
    }

    /// Recession directions are contained in ours.
    fn recession_contains(&self, rays: &[QVec]) -> Result<bool> {
        for r in rays {
            if !in_cone(&self.rays, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_subset_of(&self, other: &GenPolyhedron) -> Result<bool> {
        for p in &self.points {
            if !other.contains(p)? {
                return Ok(false);
            }
        }
        other.recession_contains(&self.rays)
    }

    pub fn set_eq(&self, other: &GenPolyhedron) -> Result<bool> {
        Ok(self.n == other.n && self.is_subset_of(other)? && other.is_subset_of(self)?)
    }

    /// Image under a linear map `x ↦ f(x)` that preserves dimension.
    pub fn map(&self, f: impl Fn(&[Rational]) -> QVec) -> Result<GenPolyhedron> {
        GenPolyhedron::new(self.n, self.points.iter().map(|p| f(p)).collect(), self.rays.iter().map(|r| f(r)).collect())
    }

    /// Polar cone `{v : ⟨v, w⟩ ≤ 0 ∀ w ∈ K}`.
    pub fn polar(&self) -> Result<GenPolyhedron> {
        if !self.is_cone() {
            return Err(Error::NotACone);
        }
        cone_from_halfspaces(&self.rays, self.n)
    }

    pub fn to_json(&self) -> GenPolyhedronJson {
        GenPolyhedronJson {
            points: self.points.iter().map(|p| format_vec(p)).collect(),
            rays: self.rays.iter().map(|r| format_vec(r)).collect(),
            affine_hull: self.hull.to_json(),
            dim: self.dim(),
        }
    }
}

/// `v ∈ cone(rays)`.
pub fn in_cone(rays: &[QVec], v: &[Rational]) -> Result<bool> {
    if rational::is_zero(v) {
        return Ok(true);
    }
    if rays.is_empty() {
        return Ok(false);
    }
    in_combination(&[], rays, v)
}

/// `v ∈ conv(points) + cone(rays)`.
pub fn in_conv_cone(points: &[QVec], rays: &[QVec], v: &[Rational]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    in_combination(points, rays, v)
}

fn in_combination(points: &[QVec], rays: &[QVec], v: &[Rational]) -> Result<bool> {
    let n = v.len();
    let (np, nr) = (points.len(), rays.len());
    let nv = np + nr;
    let mut lp = Lp::new(nv);
    for j in 0..nv {
        lp.set_nonneg(j);
    }
    for i in 0..n {
        let row: QVec = points.iter().chain(rays).map(|g| g[i].clone()).collect();
        lp.eq(row, v[i].clone());
    }
    if np > 0 {
        let sum: QVec = (0..nv).map(|j| if j < np { Rational::one() } else { Rational::zero() }).collect();
        lp.eq(sum, Rational::one());
    }
    lp.is_feasible()
}

/// Generator form of the cone `{v : ⟨a_k, v⟩ ≤ 0}`.
pub fn cone_from_halfspaces(normals: &[QVec], n: usize) -> Result<GenPolyhedron> {
    let lineality = null_space(normals, n);
    let lin_space = Subspace::span(&lineality, n);
    let d = n - lin_space.dim();
    let mut rays: Vec<QVec> = Vec::new();
    for b in &lineality {
        rays.push(b.clone());
        rays.push(rational::neg(b));
    }
    if d > 0 {
        // Extreme rays of the pointed part lie on d−1 independent facets
        // inside the complement of the lineality space.
        let rows: Vec<&QVec> = normals.iter().filter(|a| !rational::is_zero(a)).collect();
        for subset in (0..rows.len()).combinations(d - 1) {
            let mut sys: Vec<QVec> = subset.iter().map(|&k| rows[k].clone()).collect();
            sys.extend(lineality.iter().cloned());
            let ns = null_space(&sys, n);
            if ns.len() != 1 {
                continue;
            }
            let w = &ns[0];
            for cand in [w.clone(), rational::neg(w)] {
                if rows.iter().all(|a| !dot(a, &cand).is_positive()) {
                    rays.push(cand);
                }
            }
        }
    }
    GenPolyhedron::cone(n, rays)
}

/// Intersection test `P ∩ H ≠ ∅` for a generator polyhedron and halfspaces.
pub fn meets_halfspaces(p: &GenPolyhedron, rows: &[Halfspace]) -> Result<bool> {
    let (np, nr) = (p.points.len(), p.rays.len());
    let nv = np + nr;
    let mut lp = Lp::new(nv);
    for j in 0..nv {
        lp.set_nonneg(j);
    }
    let sum: QVec = (0..nv).map(|j| if j < np { Rational::one() } else { Rational::zero() }).collect();
    lp.eq(sum, Rational::one());
    for (a, b) in rows {
        let row: QVec = p.points.iter().chain(&p.rays).map(|g| dot(a, g)).collect();
        lp.le(row, b.clone());
    }
    lp.is_feasible()
}

#[cfg(test)]
mod tests {
    use super::super::rational::{qfrac, qvec};
    use super::*;

    #[test]
    fn segment_ri_rb() {
        let p = GenPolyhedron::new(2, vec![qvec(&[1, 0]), qvec(&[0, 1])], vec![]).unwrap();
        assert!(p.ri_contains(&[qfrac(1, 2), qfrac(1, 2)]).unwrap());
        assert!(p.rb_contains(&qvec(&[1, 0])).unwrap());
        assert!(!p.contains(&qvec(&[1, 1])).unwrap());
        assert!(p.aff_contains(&qvec(&[2, -1])));
        assert_eq!(p.dim(), 1);
    }

    #[test]
    fn single_point_has_empty_boundary() {
        let p = GenPolyhedron::point(qvec(&[3, 4]));
        assert!(p.ri_contains(&qvec(&[3, 4])).unwrap());
        assert!(!p.rb_contains(&qvec(&[3, 4])).unwrap());
    }

    #[test]
    fn box_canonicalization_and_ri_point() {
        let mut pts = Vec::new();
        for a in [-1, 1] {
            for b in [-1, 1] {
                pts.push(qvec(&[a, b]));
            }
        }
        pts.push(qvec(&[0, 0]));
        pts.push(qvec(&[1, 0]));
        let p = GenPolyhedron::new(2, pts, vec![]).unwrap();
        assert_eq!(p.points().len(), 4);
        assert_eq!(p.ri_point(), qvec(&[0, 0]));
        assert!(!p.ri_contains(&qvec(&[1, 0])).unwrap());
        assert!(p.ri_contains(&[qfrac(1, 2), qfrac(-1, 3)]).unwrap());
    }

    #[test]
    fn double_polar() {
        let k = GenPolyhedron::cone(2, vec![qvec(&[1, 0]), qvec(&[1, 1])]).unwrap();
        let kp = k.polar().unwrap();
        assert!(kp.set_eq(&GenPolyhedron::cone(2, vec![qvec(&[0, -1]), qvec(&[-1, 1])]).unwrap()).unwrap());
        assert!(kp.polar().unwrap().set_eq(&k).unwrap());
    }

    #[test]
    fn polar_with_lineality() {
        // Polar of a line is its orthogonal complement.
        let line = GenPolyhedron::cone(3, vec![qvec(&[1, 1, 0]), qvec(&[-1, -1, 0])]).unwrap();
        let p = line.polar().unwrap();
        assert_eq!(p.dim(), 2);
        assert!(p.contains(&qvec(&[1, -1, 5])).unwrap());
        assert!(!p.contains(&qvec(&[1, 0, 0])).unwrap());
        // Polar of the orthant is the opposite orthant.
        let orth = GenPolyhedron::cone(2, vec![qvec(&[1, 0]), qvec(&[0, 1])]).unwrap();
        let neg = GenPolyhedron::cone(2, vec![qvec(&[-1, 0]), qvec(&[0, -1])]).unwrap();
        assert!(orth.polar().unwrap().set_eq(&neg).unwrap());
        // Polar of {0} is everything.
        let zero = GenPolyhedron::cone(2, vec![]).unwrap();
        assert_eq!(zero.polar().unwrap().dim(), 2);
    }

    #[test]
    fn relint_detects_implicit_equalities() {
        // x ≤ 0, −x ≤ 0, y ≤ 1, −y ≤ 1: x = 0 is implicit.
        let rows = vec![
            (qvec(&[1, 0]), q(0)),
            (qvec(&[-1, 0]), q(0)),
            (qvec(&[0, 1]), q(1)),
            (qvec(&[0, -1]), q(1)),
        ];
        let r = relint_analysis(&rows, 2, &[]).unwrap().unwrap();
        assert_eq!(r.tight, vec![0, 1]);
        assert_eq!(r.point[0], q(0));
        assert!(r.point[1].abs() < q(1));
        let r = relint_analysis(&rows, 2, &[2]).unwrap().unwrap();
        assert_eq!(r.tight, vec![0, 1, 2]);
        let infeasible = vec![(qvec(&[1]), q(-1)), (qvec(&[-1]), q(-1))];
        assert!(relint_analysis(&infeasible, 1, &[]).unwrap().is_none());
    }
}
