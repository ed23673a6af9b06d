//! Numerical probes: metric-projection calculus, prox-regularity,
//! identifiability, partial smoothness, proximal identification runs and
//! numerical conjugates.

mod identify;
mod numconj;
mod projection;
mod prox_run;
mod smooth;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyfun::rational::{vec_from_f64_exact, vec_to_f64};
use crate::polyfun::sets::act_on_row;
use crate::polyfun::{PolySet, PolyUnion};
use crate::symmetry::{sample_ball, PermutationElement};

pub use identify::{
    identifiability_test, lifted_identifiability_test, Generator, IdentifiabilityReport, LiftedInstance,
};
pub use numconj::{numeric_conjugate, quartic_conjugate, FunctionOracle, Grid};
pub use projection::{
    moreau_defects_by_step, moreau_gradient_check, projection_derivative_check, prox_regularity_probe,
    sample_directions, DirectionKind, ProxRegularityReport, TestDirection,
};
pub use prox_run::{
    proximal_identification_run, soft_threshold_limit, IdentificationTrace, Pattern, Termination, TraceEntry,
};
pub use smooth::{
    local_uniqueness_check, partial_smoothness_check, ManifoldPiece, PartialSmoothnessReport, Uniqueness,
};

/// Largest measured value over all trials, with its input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    pub input: Vec<f64>,
    pub measured: f64,
    pub threshold: f64,
}

/// Outcome of a probe: passes iff every trial measured at most the threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub name: String,
    pub pass: bool,
    pub worst_case: WorstCase,
    pub trials: usize,
    pub seed: u64,
}

impl ProbeReport {
    pub fn new(name: impl Into<String>, threshold: f64, seed: u64) -> Self {
        ProbeReport {
            name: name.into(),
            pass: true,
            worst_case: WorstCase { input: Vec::new(), measured: 0.0, threshold },
            trials: 0,
            seed,
        }
    }

    pub fn record(&mut self, input: &[f64], measured: f64) {
        self.trials += 1;
        let bad = !(measured <= self.worst_case.threshold);
        if bad {
            self.pass = false;
        }
        if self.trials == 1 || measured > self.worst_case.measured || measured.is_nan() {
            self.worst_case.input = input.to_vec();
            self.worst_case.measured = measured;
        }
    }

    /// A single pass/fail observation, recorded as `0` or `1` against `½`.
    pub fn flag(name: impl Into<String>, input: &[f64], ok: bool, seed: u64) -> Self {
        let mut r = ProbeReport::new(name, 0.5, seed);
        r.record(input, if ok { 0.0 } else { 1.0 });
        r
    }
}

/// A closed set with a computable metric projection.
pub trait ProjectableSet {
    fn dim(&self) -> usize;

    /// The nearest point; errors when it is not unique within `tol`.
    fn project(&self, y: &[f64], tol: f64) -> Result<Vec<f64>>;

    fn distance(&self, y: &[f64]) -> Result<f64>;

    /// Local minimizers of `‖· − y‖` over the set, from `starts` starting
    /// points where the set needs an iterative search.
    fn local_minimizers(&self, y: &[f64], starts: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>>;

    /// Invariance under coordinate permutations.
    fn is_symmetric(&self) -> bool;
}

impl ProjectableSet for PolyUnion {
    fn dim(&self) -> usize {
        self.n
    }

    fn project(&self, y: &[f64], tol: f64) -> Result<Vec<f64>> {
        self.project_f64(y, tol)
    }

    fn distance(&self, y: &[f64]) -> Result<f64> {
        self.distance_f64(y)
    }

    fn local_minimizers(&self, y: &[f64], _starts: usize, _rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
        Ok(self.candidates(&vec_from_f64_exact(y)?).iter().map(|c| vec_to_f64(&c.point)).collect())
    }

    fn is_symmetric(&self) -> bool {
        let canon = |s: &PolySet| {
            let mut rows = s.rows().to_vec();
            rows.sort();
            rows.dedup();
            rows
        };
        let keys: Vec<_> = self.members().iter().map(canon).collect();
        // Adjacent transpositions generate the symmetric group.
        (0..self.n.saturating_sub(1)).all(|i| {
            let mut image: Vec<usize> = (0..self.n).collect();
            image.swap(i, i + 1);
            let sigma = PermutationElement::new(image, None).expect("valid permutation");
            keys.iter().all(|rows| {
                let mut moved: Vec<_> = rows.iter().map(|(a, b)| (act_on_row(&sigma, a), b.clone())).collect();
                moved.sort();
                keys.contains(&moved)
            })
        })
    }
}

impl ProjectableSet for PolySet {
    fn dim(&self) -> usize {
        self.n
    }

    fn project(&self, y: &[f64], _tol: f64) -> Result<Vec<f64>> {
        self.project_f64(y)
    }

    fn distance(&self, y: &[f64]) -> Result<f64> {
        self.distance_f64(y)
    }

    fn local_minimizers(&self, y: &[f64], _starts: usize, _rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
        Ok(vec![self.project_f64(y)?])
    }

    fn is_symmetric(&self) -> bool {
        PolyUnion::single(self.clone()).is_symmetric()
    }
}

/// The sphere `{x : ‖x − c‖ = r}`, a nonconvex set whose projection is
/// multivalued at the center.
#[derive(Clone, Debug, PartialEq)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || center.is_empty() {
            return Err(Error::InvalidInput("sphere needs a positive radius and dimension".into()));
        }
        Ok(Sphere { center, radius })
    }

    fn offset(&self, y: &[f64]) -> (Vec<f64>, f64) {
        let d: Vec<f64> = y.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        (d, norm)
    }

    fn retract(&self, d: &[f64]) -> Vec<f64> {
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.center.iter().zip(d).map(|(c, v)| c + self.radius * v / norm).collect()
    }
}

impl ProjectableSet for Sphere {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn project(&self, y: &[f64], tol: f64) -> Result<Vec<f64>> {
        let (d, norm) = self.offset(y);
        if norm <= tol {
            return Err(Error::AmbiguousProjection { count: 2 });
        }
        Ok(self.retract(&d))
    }

    fn distance(&self, y: &[f64]) -> Result<f64> {
        Ok((self.offset(y).1 - self.radius).abs())
    }

    /// Projected gradient descent on `½‖x − y‖²` restricted to the sphere
    /// from random starting points.
    fn local_minimizers(&self, y: &[f64], starts: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
        let (dy, _) = self.offset(y);
        let mut out = Vec::with_capacity(starts);
        for _ in 0..starts.max(1) {
            let mut z = sample_ball(&vec![0.0; self.dim()], 1.0, rng);
            if z.iter().all(|v| *v == 0.0) {
                z[0] = 1.0;
            }
            let mut x = self.retract(&z);
            for _ in 0..200 {
                let step: Vec<f64> =
                    x.iter().zip(&self.center).zip(&dy).map(|((xi, ci), di)| xi - ci + 0.5 * (di - (xi - ci))).collect();
                if step.iter().all(|v| v.abs() < 1e-300) {
                    break;
                }
                x = self.retract(&step);
            }
            out.push(x);
        }
        Ok(out)
    }

    fn is_symmetric(&self) -> bool {
        self.center.windows(2).all(|w| w[0] == w[1])
    }
}

/// Diameter of a finite point set.
pub(crate) fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
        }
    }
    d
}

pub(crate) fn unit_random(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let z = sample_ball(&vec![0.0; n], 1.0, rng);
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        return e;
    }
    z.iter().map(|v| v / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use rand::SeedableRng;

    #[test]
    fn symmetry_detection() {
        assert!(corpus::unit_box(3).is_symmetric());
        assert!(corpus::sym_halfspace(3).is_symmetric());
        assert!(!corpus::axis_line().is_symmetric());
        assert!(corpus::two_points().is_symmetric());
    }

    #[test]
    fn sphere_minimizers() {
        let s = Sphere::new(vec![0.0, 0.0], 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = s.local_minimizers(&[2.0, 0.0], 5, &mut rng).unwrap();
        assert!(diameter(&m) < 1e-9);
        assert!((m[0][0] - 1.0).abs() < 1e-9);
        let c = s.local_minimizers(&[0.0, 0.0], 5, &mut rng).unwrap();
        assert!(diameter(&c) > 0.5);
        assert!(s.project(&[0.0, 0.0], 1e-12).is_err());
    }

    #[test]
    fn report_tracks_worst() {
        let mut r = ProbeReport::new("x", 1.0, 0);
        r.record(&[1.0], 0.5);
        r.record(&[2.0], 0.7);
        assert!(r.pass);
        r.record(&[3.0], 2.0);
        assert!(!r.pass);
        assert_eq!(r.worst_case.input, vec![3.0]);
        assert_eq!(r.trials, 3);
    }
}
