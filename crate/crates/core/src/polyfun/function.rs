//! Convex polyhedral functions `f(x) = max_i ⟨a_i, x⟩ + b_i` on
//! `dom f = {x : ⟨c_j, x⟩ ≤ d_j}`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use super::polyhedron::{GenPolyhedron, Halfspace};
use super::rational::{dot, to_f64, vec_from_f64_exact, zeros, QVec, Rational};
use super::sets::{act_on_row, PolySet, SymmetryMode};
use crate::error::{Error, Result};

/// A rational value or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtValue {
    Finite(Rational),
    PosInf,
}

impl ExtValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtValue::Finite(v) => to_f64(v),
            ExtValue::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(v) => Some(v),
            ExtValue::PosInf => None,
        }
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(v) => write!(f, "{}", super::rational::format_rational(v)),
            ExtValue::PosInf => write!(f, "+inf"),
        }
    }
}

/// Active piece and constraint indices at a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub pieces: Vec<usize>,
    pub constraints: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MaxAffineFn {
    pub n: usize,
    pieces: Vec<(QVec, Rational)>,
    constraints: Vec<Halfspace>,
    mode: SymmetryMode,
    pieces_f64: Vec<(Vec<f64>, f64)>,
    constraints_f64: Vec<(Vec<f64>, f64)>,
}

fn closure(items: &[(QVec, Rational)], mode: SymmetryMode, n: usize) -> Result<Vec<(QVec, Rational)>> {
    let group = mode.group(n)?;
    let mut set: BTreeSet<(QVec, Rational)> = BTreeSet::new();
    for (a, b) in items {
        for sigma in &group {
            set.insert((act_on_row(sigma, a), b.clone()));
        }
    }
    Ok(set.into_iter().collect())
}

impl MaxAffineFn {
    /// Closes pieces and constraints under the symmetry group, removes
    /// duplicates and checks that the domain is nonempty.
    pub fn new(n: usize, pieces: Vec<(QVec, Rational)>, constraints: Vec<Halfspace>, mode: SymmetryMode) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("at least one affine piece is required".into()));
        }
        for (a, _) in pieces.iter().chain(&constraints) {
            if a.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: a.len() });
            }
        }
        let pieces = closure(&pieces, mode, n)?;
        let constraints = closure(&constraints, mode, n)?;
        let mut lp = super::lp::Lp::new(n);
        for (c, d) in &constraints {
            lp.le(c.clone(), d.clone());
        }
        if !lp.is_feasible()? {
            return Err(Error::EmptyPolyhedron);
        }
        let conv = |v: &[(QVec, Rational)]| v.iter().map(|(a, b)| (a.iter().map(to_f64).collect(), to_f64(b))).collect();
        let pieces_f64 = conv(&pieces);
        let constraints_f64 = conv(&constraints);
        Ok(MaxAffineFn { n, pieces, constraints, mode, pieces_f64, constraints_f64 })
    }

    pub fn pieces(&self) -> &[(QVec, Rational)] {
        &self.pieces
    }

    pub fn constraints(&self) -> &[Halfspace] {
        &self.constraints
    }

    pub fn symmetry_mode(&self) -> SymmetryMode {
        self.mode
    }

    pub fn in_domain(&self, x: &[Rational]) -> bool {
        self.constraints.iter().all(|(c, d)| dot(c, x) <= *d)
    }

    fn max_piece(&self, x: &[Rational]) -> Rational {
        self.pieces.iter().map(|(a, b)| dot(a, x) + b).max().expect("nonempty")
    }

    pub fn value(&self, x: &[Rational]) -> ExtValue {
        if self.in_domain(x) {
            ExtValue::Finite(self.max_piece(x))
        } else {
            ExtValue::PosInf
        }
    }

    /// Floating-point evaluation; `tol` relaxes the domain constraints.
    pub fn value_f64(&self, x: &[f64], tol: f64) -> f64 {
        let ev = |a: &[f64], b: f64| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + b;
        if self.constraints_f64.iter().any(|(c, d)| ev(c, -d) > tol) {
            return f64::INFINITY;
        }
        self.pieces_f64.iter().map(|(a, b)| ev(a, *b)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn value_of_f64_exact(&self, x: &[f64]) -> Result<ExtValue> {
        Ok(self.value(&vec_from_f64_exact(x)?))
    }

    pub fn signature(&self, x: &[Rational]) -> Result<Signature> {
        if !self.in_domain(x) {
            return Err(Error::NotInDomain);
        }
        let vals: Vec<Rational> = self.pieces.iter().map(|(a, b)| dot(a, x) + b).collect();
        let m = vals.iter().max().expect("nonempty").clone();
        Ok(Signature {
            pieces: (0..vals.len()).filter(|&i| vals[i] == m).collect(),
            constraints: (0..self.constraints.len()).filter(|&j| dot(&self.constraints[j].0, x) == self.constraints[j].1).collect(),
        })
    }

    /// `∂f(x) = conv{a_i : i active} + cone{c_j : j active}`.
    pub fn subdiff(&self, x: &[Rational]) -> Result<GenPolyhedron> {
        let sig = self.signature(x)?;
        self.subdiff_of(&sig)
    }

    pub fn subdiff_of(&self, sig: &Signature) -> Result<GenPolyhedron> {
        GenPolyhedron::new(
            self.n,
            sig.pieces.iter().map(|&i| self.pieces[i].0.clone()).collect(),
            sig.constraints.iter().map(|&j| self.constraints[j].0.clone()).collect(),
        )
    }

    /// Closed domain as a polyhedral set.
    pub fn domain(&self) -> Result<PolySet> {
        PolySet::new(self.n, self.constraints.clone())
    }

    /// Rows of `epi f ⊂ R^{n+1}` in `(x, t)`: pieces first, then constraints.
    pub fn epigraph_rows(&self) -> Vec<Halfspace> {
        let mut rows = Vec::with_capacity(self.pieces.len() + self.constraints.len());
        for (a, b) in &self.pieces {
            let mut r = a.clone();
            r.push(-Rational::from_integer(1.into()));
            rows.push((r, -b));
        }
        for (c, d) in &self.constraints {
            let mut r = c.clone();
            r.push(Rational::zero());
            rows.push((r, d.clone()));
        }
        rows
    }

    /// Splits a tight-row set of the epigraph into a signature.
    pub fn split_tight(&self, tight: &[usize]) -> Signature {
        let p = self.pieces.len();
        Signature {
            pieces: tight.iter().copied().filter(|&k| k < p).collect(),
            constraints: tight.iter().copied().filter(|&k| k >= p).map(|k| k - p).collect(),
        }
    }

    pub fn zero_point(&self) -> QVec {
        zeros(self.n)
    }
}
