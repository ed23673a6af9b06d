//! The stratification `A_f` of `dom f`: projections of the non-vertical
//! faces of `epi f`, with closure order and symmetrization orbits.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::function::{MaxAffineFn, Signature};
use super::polyhedron::GenPolyhedron;
use super::qlinalg::{AffineJson, AffineSpace};
use super::rational::{format_vec, sub, QVec, Rational};
use super::sets::enumerate_faces;
use crate::error::Result;

/// `{x ∈ dom f : active pieces = I, tight constraints = J}`, nonempty and
/// relatively open.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub id: usize,
    pub signature: Signature,
    pub dim: usize,
    pub affine_hull: AffineSpace,
    pub representative: QVec,
}

impl Stratum {
    pub fn active_pieces(&self) -> &[usize] {
        &self.signature.pieces
    }

    pub fn active_constraints(&self) -> &[usize] {
        &self.signature.constraints
    }

    pub fn contains(&self, f: &MaxAffineFn, x: &[Rational]) -> bool {
        f.signature(x).is_ok_and(|s| s == self.signature)
    }

    /// `x ∈ cl M`: the pieces of `I` attain the max and `J` is tight.
    pub fn closure_contains(&self, f: &MaxAffineFn, x: &[Rational]) -> bool {
        match f.signature(x) {
            Ok(s) => {
                self.signature.pieces.iter().all(|i| s.pieces.contains(i))
                    && self.signature.constraints.iter().all(|j| s.constraints.contains(j))
            }
            Err(_) => false,
        }
    }

    /// Constant value of `∂f` on the stratum.
    pub fn subdiff(&self, f: &MaxAffineFn) -> Result<GenPolyhedron> {
        f.subdiff_of(&self.signature)
    }
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub n: usize,
    pub strata: Vec<Stratum>,
    /// Pairs `(i, j)`, `i ≠ j`, with `M_i ⊂ cl M_j`.
    pub closure_order: Vec<(usize, usize)>,
    /// Strata grouped into `M^sym` classes.
    pub sym_orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    index: HashMap<Signature, usize>,
}

impl Stratification {
    pub fn locate(&self, f: &MaxAffineFn, x: &[Rational]) -> Option<usize> {
        f.signature(x).ok().and_then(|s| self.index.get(&s).copied())
    }

    pub fn by_signature(&self, s: &Signature) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn orbit_of(&self, stratum: usize) -> usize {
        self.orbit_of[stratum]
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }
}

/// Enumerates `A_f`, verifies the frontier condition and groups strata into
/// orbits under the symmetry group of `f`.
pub fn stratify(f: &MaxAffineFn) -> Result<Stratification> {
    let n = f.n;
    let rows = f.epigraph_rows();
    let mut strata: Vec<Stratum> = enumerate_faces(&rows, n + 1)?
        .into_iter()
        .filter_map(|(tight, point)| {
            let signature = f.split_tight(&tight);
            if signature.pieces.is_empty() {
                return None;
            }
            Some((signature, point[..n].to_vec()))
        })
        .map(|(signature, representative)| {
            let affine_hull = stratum_hull(f, &signature);
            Stratum { id: 0, dim: affine_hull.dim(), signature, affine_hull, representative }
        })
        .collect();
    strata.sort_by(|a, b| a.signature.cmp(&b.signature));
    let mut index = HashMap::new();
    for (id, s) in strata.iter_mut().enumerate() {
        s.id = id;
        index.insert(s.signature.clone(), id);
        debug_assert!(s.contains(f, &s.representative));
    }

    // Frontier condition: whenever a representative of M_i lies in cl M_j,
    // the whole of M_i does, which for faces means I_j ⊆ I_i and J_j ⊆ J_i.
    let mut closure_order = Vec::new();
    for i in 0..strata.len() {
        for j in 0..strata.len() {
            if i == j || !strata[j].closure_contains(f, &strata[i].representative) {
                continue;
            }
            let si = &strata[i].signature;
            let sj = &strata[j].signature;
            let contained = sj.pieces.iter().all(|p| si.pieces.contains(p))
                && sj.constraints.iter().all(|c| si.constraints.contains(c))
                && strata[i].dim < strata[j].dim;
            assert!(contained, "frontier condition violated between strata {i} and {j}");
            closure_order.push((i, j));
        }
    }

    // Orbits: σ·rep lands in the stratum σM.
    let group = f.symmetry_mode().group(n)?;
    let mut orbit_of = vec![usize::MAX; strata.len()];
    let mut sym_orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..strata.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let oid = sym_orbits.len();
        let mut members = Vec::new();
        for sigma in &group {
            let image = sigma.apply(&strata[i].representative);
            let j = *index.get(&f.signature(&image)?).expect("symmetric image is a stratum");
            if orbit_of[j] == usize::MAX {
                orbit_of[j] = oid;
                members.push(j);
            }
        }
        members.sort_unstable();
        sym_orbits.push(members);
    }
    Ok(Stratification { n, strata, closure_order, sym_orbits, orbit_of, index })
}

/// `{x : ⟨a_i,x⟩+b_i equal for i ∈ I, ⟨c_j,x⟩ = d_j for j ∈ J}`.
pub fn stratum_hull(f: &MaxAffineFn, sig: &Signature) -> AffineSpace {
    let (a0, b0) = &f.pieces()[sig.pieces[0]];
    let mut a: Vec<QVec> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    for &i in &sig.pieces[1..] {
        let (ai, bi) = &f.pieces()[i];
        a.push(sub(ai, a0));
        b.push(b0 - bi);
    }
    for &j in &sig.constraints {
        let (c, d) = &f.constraints()[j];
        a.push(c.clone());
        b.push(d.clone());
    }
    AffineSpace::solutions(&a, &b, f.n).expect("nonempty stratum")
}

/// Serialized stratum.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StratumJson {
    pub id: usize,
    pub active_pieces: Vec<usize>,
    pub active_constraints: Vec<usize>,
    pub dim: usize,
    pub representative: Vec<String>,
    pub affine_hull: AffineJson,
    pub orbit: usize,
}

impl Stratification {
    pub fn strata_json(&self) -> Vec<StratumJson> {
        self.strata
            .iter()
            .map(|s| StratumJson {
                id: s.id,
                active_pieces: s.signature.pieces.clone(),
                active_constraints: s.signature.constraints.clone(),
                dim: s.dim,
                representative: format_vec(&s.representative),
                affine_hull: s.affine_hull.to_json(),
                orbit: self.orbit_of[s.id],
            })
            .collect()
    }
}

