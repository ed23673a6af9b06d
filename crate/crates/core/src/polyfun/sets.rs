//! Closed polyhedral sets `{x : Gx ≤ h}` with their face lattice, exact
//! metric projection, tangent/normal cones, and finite unions of such sets.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::polyhedron::{cone_from_halfspaces, relint_analysis, GenPolyhedron, Halfspace};
use super::qlinalg::{AffineProjector, AffineSpace};
use super::rational::{dot, from_f64_exact, norm2, sub, to_f64, vec_from_f64_exact, vec_to_f64, QVec, Rational};
use crate::error::{Error, Result};
use crate::symmetry::{group_elements, PermutationElement, SymMode, DEFAULT_ENUMERATION_CAP};

/// Upper bound on enumerated faces.
pub const MAX_FACES: usize = 50_000;

/// Which group a set or function is closed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryMode {
    #[default]
    Plain,
    Permutation,
    Signed,
}

impl SymmetryMode {
    pub fn group(self, n: usize) -> Result<Vec<PermutationElement>> {
        match self {
            SymmetryMode::Plain => Ok(vec![PermutationElement::identity(n)]),
            SymmetryMode::Permutation => group_elements(n, &SymMode::Full, DEFAULT_ENUMERATION_CAP),
            SymmetryMode::Signed => group_elements(n, &SymMode::FullSigned, DEFAULT_ENUMERATION_CAP),
        }
    }
}

/// Coefficients `a'` with `⟨a', x⟩ = ⟨a, σx⟩`.
pub fn act_on_row(sigma: &PermutationElement, a: &[Rational]) -> QVec {
    let mut out = vec![Rational::zero(); a.len()];
    for (i, ai) in a.iter().enumerate() {
        let j = sigma.image()[i];
        out[j] = match sigma.signs() {
            Some(s) if s[i] < 0 => -ai,
            _ => ai.clone(),
        };
    }
    out
}

/// Nonempty face of a [`PolySet`], indexed by its set of tight rows.
#[derive(Clone, Debug)]
pub struct Face {
    pub tight: Vec<usize>,
    pub point: QVec,
    pub projector: AffineProjector,
}

impl Face {
    pub fn dim(&self) -> usize {
        self.projector.space.dim()
    }

    pub fn affine_hull(&self) -> &AffineSpace {
        &self.projector.space
    }
}

/// Enumerates every nonempty face of `{x : rows}` by depth-first descent
/// from the whole set, adding one tight row at a time.
pub fn enumerate_faces(rows: &[Halfspace], n: usize) -> Result<Vec<(Vec<usize>, QVec)>> {
    let Some(root) = relint_analysis(rows, n, &[])? else {
        return Err(Error::EmptyPolyhedron);
    };
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut tried: HashMap<Vec<usize>, Option<Vec<usize>>> = HashMap::new();
    let mut out = Vec::new();
    let mut stack = vec![root];
    seen.insert(stack[0].tight.clone());
    while let Some(face) = stack.pop() {
        for k in 0..rows.len() {
            if face.tight.contains(&k) {
                continue;
            }
            let mut forced = face.tight.clone();
            forced.push(k);
            forced.sort_unstable();
            if tried.contains_key(&forced) {
                continue;
            }
            let child = relint_analysis(rows, n, &forced)?;
            tried.insert(forced, child.as_ref().map(|c| c.tight.clone()));
            if let Some(c) = child {
                if seen.insert(c.tight.clone()) {
                    if seen.len() > MAX_FACES {
                        return Err(Error::StrataBudget(MAX_FACES));
                    }
                    stack.push(c);
                }
            }
        }
        out.push((face.tight, face.point));
    }
    out.sort();
    Ok(out)
}

/// Closed convex polyhedron in inequality form with its faces.
#[derive(Clone, Debug)]
pub struct PolySet {
    pub n: usize,
    rows: Vec<Halfspace>,
    faces: Vec<Face>,
}

impl PolySet {
    pub fn new(n: usize, rows: Vec<Halfspace>) -> Result<Self> {
        if let Some((a, _)) = rows.iter().find(|(a, _)| a.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: a.len() });
        }
        let faces = enumerate_faces(&rows, n)?
            .into_iter()
            .map(|(tight, point)| {
                let a: Vec<QVec> = tight.iter().map(|&k| rows[k].0.clone()).collect();
                let b: Vec<Rational> = tight.iter().map(|&k| rows[k].1.clone()).collect();
                let space = AffineSpace::solutions(&a, &b, n).expect("face equations are consistent");
                Face { tight, point, projector: AffineProjector::new(space) }
            })
            .collect();
        Ok(PolySet { n, rows, faces })
    }

    pub fn rows(&self) -> &[Halfspace] {
        &self.rows
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn dim(&self) -> usize {
        self.faces.iter().map(Face::dim).max().unwrap_or(0)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|(a, b)| dot(a, x) <= *b)
    }

    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|(a, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(ai, xi)| to_f64(ai) * xi).sum();
            lhs <= to_f64(b) + tol
        })
    }

    pub fn tight_at(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.rows.len()).filter(|&k| dot(&self.rows[k].0, x) == self.rows[k].1).collect()
    }

    /// Image `σ⁻¹Q = {x : σx ∈ Q}`.
    pub fn pullback(&self, sigma: &PermutationElement) -> Result<PolySet> {
        let rows = self.rows.iter().map(|(a, b)| (act_on_row(sigma, a), b.clone())).collect();
        PolySet::new(self.n, rows)
    }

    /// Normal cone `N_Q(x) = cone{a_k : k tight}`.
    pub fn normal_cone(&self, x: &[Rational]) -> Result<GenPolyhedron> {
        if !self.contains(x) {
            return Err(Error::NotInDomain);
        }
        let rays = self.tight_at(x).into_iter().map(|k| self.rows[k].0.clone()).collect();
        GenPolyhedron::cone(self.n, rays)
    }

    /// Tangent cone `T_Q(x) = {d : ⟨a_k, d⟩ ≤ 0, k tight}`; checked against
    /// `N_Q(x)°`.
    pub fn tangent_cone(&self, x: &[Rational]) -> Result<GenPolyhedron> {
        if !self.contains(x) {
            return Err(Error::NotInDomain);
        }
        let normals: Vec<QVec> = self.tight_at(x).into_iter().map(|k| self.rows[k].0.clone()).collect();
        let t = cone_from_halfspaces(&normals, self.n)?;
        debug_assert!(t.set_eq(&self.normal_cone(x)?.polar()?)?);
        Ok(t)
    }

    /// Exact nearest point and squared distance: the closest feasible
    /// projection onto the affine hull of some face.
    pub fn nearest(&self, y: &[Rational]) -> (QVec, Rational) {
        if self.contains(y) {
            return (y.to_vec(), Rational::zero());
        }
        let mut best: Option<(QVec, Rational)> = None;
        for face in &self.faces {
            let p = face.projector.project(y);
            if !self.contains(&p) {
                continue;
            }
            let d2 = norm2(&sub(&p, y));
            if best.as_ref().is_none_or(|(_, b)| d2 < *b) {
                best = Some((p, d2));
            }
        }
        best.expect("some face projection is feasible")
    }

    pub fn project_f64(&self, y: &[f64]) -> Result<Vec<f64>> {
        Ok(vec_to_f64(&self.nearest(&vec_from_f64_exact(y)?).0))
    }

    pub fn distance_f64(&self, y: &[f64]) -> Result<f64> {
        let (p, _) = self.nearest(&vec_from_f64_exact(y)?);
        Ok(vec_to_f64(&p).iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
    }

    /// Face containing `x` in its relative interior.
    pub fn face_of(&self, x: &[Rational]) -> Option<&Face> {
        let t = self.tight_at(x);
        self.faces.iter().find(|f| f.tight == t)
    }
}

/// Finite union of closed convex polyhedra.
#[derive(Clone, Debug)]
pub struct PolyUnion {
    pub n: usize,
    members: Vec<PolySet>,
}

/// Candidate nearest point of one member.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub member: usize,
    pub point: QVec,
    pub dist2: Rational,
}

impl PolyUnion {
    pub fn new(n: usize, members: Vec<PolySet>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        if let Some(m) = members.iter().find(|m| m.n != n) {
            return Err(Error::DimensionMismatch { expected: n, found: m.n });
        }
        Ok(PolyUnion { n, members })
    }

    pub fn single(set: PolySet) -> Self {
        PolyUnion { n: set.n, members: vec![set] }
    }

    /// `⋃_σ σQ` over the group of `mode`, with duplicate members removed.
    pub fn symmetrized(base: &PolySet, mode: SymmetryMode) -> Result<Self> {
        let mut keys: BTreeSet<Vec<(QVec, Rational)>> = BTreeSet::new();
        let mut members = Vec::new();
        for sigma in mode.group(base.n)? {
            let mut rows: Vec<Halfspace> =
                base.rows.iter().map(|(a, b)| (act_on_row(&sigma, a), b.clone())).collect();
            rows.sort();
            rows.dedup();
            if keys.insert(rows.clone()) {
                members.push(PolySet::new(base.n, rows)?);
            }
        }
        Ok(PolyUnion { n: base.n, members })
    }

    pub fn members(&self) -> &[PolySet] {
        &self.members
    }

    pub fn is_convex_single(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.members.iter().any(|m| m.contains(x))
    }

    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        self.members.iter().any(|m| m.contains_f64(x, tol))
    }

    /// Nearest point of every member, sorted by distance.
    pub fn candidates(&self, y: &[Rational]) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = self
            .members
            .iter()
            .enumerate()
            .map(|(member, m)| {
                let (point, dist2) = m.nearest(y);
                Candidate { member, point, dist2 }
            })
            .collect();
        out.sort_by(|a, b| a.dist2.cmp(&b.dist2).then(a.member.cmp(&b.member)));
        out
    }

    pub fn distance(&self, y: &[Rational]) -> Rational {
        self.candidates(y).swap_remove(0).dist2
    }

    pub fn distance_f64(&self, y: &[f64]) -> Result<f64> {
        let c = self.candidates(&vec_from_f64_exact(y)?);
        Ok(dist_f64(&c[0].point, y))
    }

    /// The unique nearest point. Distinct candidates whose distances are
    /// within `tol` of the minimum make the projection ambiguous.
    pub fn project_unique(&self, y: &[Rational], tol: f64) -> Result<QVec> {
        let c = self.candidates(y);
        let yf = vec_to_f64(y);
        let best = dist_f64(&c[0].point, &yf);
        let mut distinct: Vec<&QVec> = vec![&c[0].point];
        for cand in &c[1..] {
            if dist_f64(&cand.point, &yf) - best > tol {
                break;
            }
            let far = distinct.iter().all(|p| {
                vec_to_f64(p).iter().zip(vec_to_f64(&cand.point)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) > tol
            });
            if far {
                distinct.push(&cand.point);
            }
        }
        if distinct.len() > 1 {
            return Err(Error::AmbiguousProjection { count: distinct.len() });
        }
        Ok(c[0].point.clone())
    }

    pub fn project_f64(&self, y: &[f64], tol: f64) -> Result<Vec<f64>> {
        Ok(vec_to_f64(&self.project_unique(&vec_from_f64_exact(y)?, tol)?))
    }
}

fn dist_f64(p: &[Rational], y: &[f64]) -> f64 {
    p.iter().zip(y).map(|(a, b)| (to_f64(a) - b).powi(2)).sum::<f64>().sqrt()
}

/// Exact `|x|` for use with absolute stabilizers.
pub fn abs_vec(x: &[Rational]) -> QVec {
    x.iter().map(|v| v.abs()).collect()
}

/// Exact rational from a float, for callers that hold floats.
pub fn exact(x: f64) -> Result<Rational> {
    from_f64_exact(x)
}
