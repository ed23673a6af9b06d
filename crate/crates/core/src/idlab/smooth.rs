//! Partial smoothness of polyhedral functions and local uniqueness of
//! partly smooth manifolds.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{diameter, ProbeReport};
use crate::error::{Error, Result};
use crate::lift::{prox_candidates, SpectralFn};
use crate::polyfun::polyhedron::Halfspace;
use crate::polyfun::qlinalg::{null_space, Subspace};
use crate::polyfun::rational::{add, dot, from_f64_exact, qfrac, scale, sub, vec_to_f64, QVec, Rational};
use crate::polyfun::{ExtValue, MaxAffineFn, Stratum};
use crate::symmetry::sample_ball;

/// A relatively open polyhedral piece `{x : Ax = b, Cx < d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPiece {
    pub n: usize,
    pub eqs: Vec<Halfspace>,
    pub stricts: Vec<Halfspace>,
}

impl ManifoldPiece {
    pub fn new(n: usize, eqs: Vec<Halfspace>, stricts: Vec<Halfspace>) -> Result<Self> {
        if let Some((a, _)) = eqs.iter().chain(&stricts).find(|(a, _)| a.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: a.len() });
        }
        Ok(ManifoldPiece { n, eqs, stricts })
    }

    /// The stratum as equalities on the active pieces and constraints and
    /// strict inequalities on the others.
    pub fn from_stratum(f: &MaxAffineFn, m: &Stratum) -> Self {
        let (a0, b0) = &f.pieces()[m.signature.pieces[0]];
        let mut eqs = Vec::new();
        let mut stricts = Vec::new();
        for (i, (a, b)) in f.pieces().iter().enumerate() {
            let row = (sub(a, a0), b0 - b);
            if m.signature.pieces.contains(&i) {
                if i != m.signature.pieces[0] {
                    eqs.push(row);
                }
            } else {
                stricts.push(row);
            }
        }
        for (j, row) in f.constraints().iter().enumerate() {
            if m.signature.constraints.contains(&j) {
                eqs.push(row.clone());
            } else {
                stricts.push(row.clone());
            }
        }
        ManifoldPiece { n: f.n, eqs, stricts }
    }

    /// The line through `p` with direction `d`.
    pub fn line(p: &[Rational], d: &[Rational]) -> Self {
        let n = p.len();
        let eqs = null_space(&[d.to_vec()], n).into_iter().map(|c| (c.clone(), dot(&c, p))).collect();
        ManifoldPiece { n, eqs, stricts: Vec::new() }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.eqs.iter().all(|(a, b)| dot(a, x) == *b) && self.stricts.iter().all(|(a, b)| dot(a, x) < *b)
    }

    /// Tangent space: the null space of the equality normals.
    pub fn tangent(&self) -> Subspace {
        let normals: Vec<QVec> = self.eqs.iter().map(|(a, _)| a.clone()).collect();
        Subspace::span(&null_space(&normals, self.n), self.n)
    }

    /// Random point of the piece within `radius` of `x` (which must lie in
    /// it), with halving until the strict rows hold.
    fn sample_near(&self, x: &[Rational], radius: &Rational, rng: &mut impl Rng) -> QVec {
        let t = self.tangent();
        let mut r = radius.clone();
        for _ in 0..40 {
            let mut z = x.to_vec();
            for b in t.basis() {
                let len = vec_to_f64(b).iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
                let c = qfrac(rng.random_range(-1000..=1000), 1000 * (len.ceil() as i64) * t.dim().max(1) as i64) * &r;
                z = add(&z, &scale(b, &c));
            }
            if self.contains(&z) {
                return z;
            }
            r /= Rational::from_integer(2.into());
        }
        x.to_vec()
    }
}

/// The four conditions, each as a probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSmoothnessReport {
    pub smoothness: ProbeReport,
    pub regularity: ProbeReport,
    pub sharpness: ProbeReport,
    pub continuity: ProbeReport,
    pub pass: bool,
}

/// Checks partial smoothness of the polyhedral `f` relative to `m` at `x̄`:
/// (i) `f` restricted to `m` is affine near `x̄`, (ii) prox-regularity by a
/// prox multistart around `x̄ + v̄` for `v̄ ∈ ri ∂f(x̄)`, (iii)
/// `par aff ∂f(x̄) = (T_M)^⊥` exactly, (iv) `∂f` constant on `m` near `x̄`.
pub fn partial_smoothness_check(
    f: &MaxAffineFn,
    m: &ManifoldPiece,
    x_bar: &[Rational],
    seed: u64,
) -> Result<PartialSmoothnessReport> {
    let xf = vec_to_f64(x_bar);
    let ExtValue::Finite(fx) = f.value(x_bar) else {
        return Err(Error::NotInDomain);
    };
    if !m.contains(x_bar) {
        let fail = |name: &str| ProbeReport::flag(name, &xf, false, seed);
        return Ok(PartialSmoothnessReport {
            smoothness: fail("smoothness"),
            regularity: fail("regularity"),
            sharpness: fail("sharpness"),
            continuity: fail("continuity"),
            pass: false,
        });
    }
    let tangent = m.tangent();
    let active: Vec<&QVec> =
        f.pieces().iter().filter(|(a, b)| dot(a, x_bar) + b == fx).map(|(a, _)| a).collect();
    let affine = active.iter().all(|a| tangent.basis().iter().all(|t| dot(&sub(a, active[0]), t).is_zero()))
        && f.constraints()
            .iter()
            .filter(|(c, d)| dot(c, x_bar) == *d)
            .all(|(c, _)| tangent.basis().iter().all(|t| dot(c, t).is_zero()));
    let smoothness = ProbeReport::flag("smoothness", &xf, affine, seed);

    let sub_x = f.subdiff(x_bar)?;
    let v_bar = vec_to_f64(&sub_x.ri_point());
    let regularity = prox_multistart(f, &xf, &v_bar, seed)?;

    let sharp = sub_x.aff_hull().direction == tangent.complement();
    let sharpness = ProbeReport::flag("sharpness", &xf, sharp, seed);

    let mut continuity = ProbeReport::new("continuity", 0.5, seed);
    for b in tangent.basis() {
        for sign in [1i64, -1] {
            for k in [4, 8, 16] {
                let x = add(x_bar, &scale(b, &qfrac(sign, 1 << k)));
                if !m.contains(&x) || !f.in_domain(&x) {
                    continue;
                }
                let same = f.subdiff(&x)?.set_eq(&sub_x)?;
                continuity.record(&vec_to_f64(&x), if same { 0.0 } else { 1.0 });
            }
        }
    }
    if continuity.trials == 0 {
        continuity.record(&xf, 0.0);
    }

    let pass = smoothness.pass && regularity.pass && sharpness.pass && continuity.pass;
    Ok(PartialSmoothnessReport { smoothness, regularity, sharpness, continuity, pass })
}

// Diameter of the near-optimal prox candidates at points `y` near `x̄ + v̄`.
fn prox_multistart(f: &MaxAffineFn, x_bar: &[f64], v_bar: &[f64], seed: u64) -> Result<ProbeReport> {
    let sf = SpectralFn::vector_only(f.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport::new("regularity", 1e-7, seed);
    let center: Vec<f64> = x_bar.iter().zip(v_bar).map(|(a, b)| a + b).collect();
    let one = Rational::from_integer(1.into());
    for k in 0..20 {
        let y = if k == 0 { center.clone() } else { sample_ball(&center, 0.1, &mut rng) };
        let yq: QVec = y.iter().map(|&v| from_f64_exact(v)).collect::<Result<_>>()?;
        let cands = prox_candidates(&sf, &one, &yq)?;
        let best = cands.iter().map(|c| &c.1).min().cloned().expect("prox candidates exist");
        let near: Vec<Vec<f64>> =
            cands.iter().filter(|c| crate::polyfun::rational::to_f64(&(&c.1 - &best)) <= 1e-9).map(|c| vec_to_f64(&c.0)).collect();
        report.record(&y, diameter(&near));
    }
    Ok(report)
}

/// Verdict of [`local_uniqueness_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Uniqueness {
    Agree { samples: usize },
    Disagree { witness: Vec<f64> },
    /// A partial-smoothness precondition failed.
    Vacuous { reason: String },
}

/// Two partly smooth manifolds through `x̄` must coincide near `x̄`.
/// Points are drawn from both pieces and from the ball, and membership in
/// one piece is compared with membership in the other.
pub fn local_uniqueness_check(
    f: &MaxAffineFn,
    m1: &ManifoldPiece,
    m2: &ManifoldPiece,
    x_bar: &[Rational],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<Uniqueness> {
    for (name, m) in [("first", m1), ("second", m2)] {
        if !partial_smoothness_check(f, m, x_bar, seed)?.pass {
            return Ok(Uniqueness::Vacuous { reason: format!("{name} piece is not partly smooth at the point") });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = from_f64_exact(radius)?;
    let xf = vec_to_f64(x_bar);
    for k in 0..samples {
        let z = match k % 3 {
            0 => m1.sample_near(x_bar, &r, &mut rng),
            1 => m2.sample_near(x_bar, &r, &mut rng),
            _ => sample_ball(&xf, radius, &mut rng).iter().map(|&v| from_f64_exact(v)).collect::<Result<_>>()?,
        };
        if m1.contains(&z) != m2.contains(&z) {
            return Ok(Uniqueness::Disagree { witness: vec_to_f64(&z) });
        }
    }
    Ok(Uniqueness::Agree { samples })
}
