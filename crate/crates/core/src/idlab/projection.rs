//! Metric-projection calculus and prox-regularity probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{diameter, ProbeReport, ProjectableSet};
use crate::error::Result;
use crate::lift::sample::{random_conjugate, sample_ri};
use crate::matdecomp::{conjugate_by, diag_embed, eig_sym, stabilizer_sample, SymMatrix};
use crate::polyfun::rational::{vec_to_f64, Rational};
use crate::polyfun::PolySet;
use crate::symmetry::sample_ball;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `h(x) = ½‖x‖² − ½d²_Q(x)`.
fn moreau_h(q: &dyn ProjectableSet, x: &[f64]) -> Result<f64> {
    let d = q.distance(x)?;
    Ok(0.5 * x.iter().map(|v| v * v).sum::<f64>() - 0.5 * d * d)
}

fn moreau_defect(q: &dyn ProjectableSet, x: &[f64], step: f64) -> Result<f64> {
    let p = q.project(x, 1e-12)?;
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[i] += step;
        minus[i] -= step;
        let g = (moreau_h(q, &plus)? - moreau_h(q, &minus)?) / (2.0 * step);
        worst = worst.max((g - p[i]).abs());
    }
    Ok(worst)
}

/// Central differences of `h` against `P_Q(x)` at every point, componentwise,
/// passing at `1e-5`.
pub fn moreau_gradient_check(q: &dyn ProjectableSet, points: &[Vec<f64>], step: f64, seed: u64) -> Result<ProbeReport> {
    let mut report = ProbeReport::new("moreau_gradient", 1e-5, seed);
    for x in points {
        report.record(x, moreau_defect(q, x, step)?);
    }
    Ok(report)
}

/// Gradient defect of `h` at `x` for each step.
pub fn moreau_defects_by_step(q: &dyn ProjectableSet, x: &[f64], steps: &[f64]) -> Result<Vec<f64>> {
    steps.iter().map(|&s| moreau_defect(q, x, s)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionKind {
    Normal,
    Tangent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestDirection {
    pub kind: DirectionKind,
    pub v: Vec<f64>,
}

/// Unit directions drawn from the relative interiors of the normal and
/// tangent cones of `q` at `x`.
pub fn sample_directions(q: &PolySet, x: &[Rational], count: usize, rng: &mut impl Rng) -> Result<Vec<TestDirection>> {
    let mut out = Vec::new();
    for (kind, cone) in [(DirectionKind::Normal, q.normal_cone(x)?), (DirectionKind::Tangent, q.tangent_cone(x)?)] {
        if cone.dim() == 0 {
            continue;
        }
        for _ in 0..count {
            let v = vec_to_f64(&sample_ri(&cone, rng));
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 0.0 {
                out.push(TestDirection { kind, v: v.iter().map(|a| a / norm).collect() });
            }
        }
    }
    Ok(out)
}

pub const DERIVATIVE_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// One-sided quotients `(P_Q(x̄ + s d) − P_Q(x̄))/s` at the steps
/// `1e-2, 1e-3, 1e-4`: along normals they must vanish, along tangents
/// reproduce `d`. Each direction records its defect at `1e-4`, or `+∞` if
/// the defects increase across steps; the threshold is `1e-4`.
pub fn projection_derivative_check(q: &dyn ProjectableSet, x_bar: &[f64], directions: &[TestDirection]) -> Result<ProbeReport> {
    let mut report = ProbeReport::new("projection_derivative", 1e-4, 0);
    let p0 = q.project(x_bar, 1e-12)?;
    for d in directions {
        let mut defects = Vec::with_capacity(DERIVATIVE_STEPS.len());
        for s in DERIVATIVE_STEPS {
            let y: Vec<f64> = x_bar.iter().zip(&d.v).map(|(a, b)| a + s * b).collect();
            let p = q.project(&y, 1e-12)?;
            let quotient: Vec<f64> = p.iter().zip(&p0).map(|(a, b)| (a - b) / s).collect();
            let expected: Vec<f64> = match d.kind {
                DirectionKind::Normal => vec![0.0; d.v.len()],
                DirectionKind::Tangent => d.v.clone(),
            };
            defects.push(dist(&quotient, &expected));
        }
        // Cancellation in P(x̄ + s d) − P(x̄) leaves noise of order ε‖x̄‖/s.
        let scale = 1.0 + x_bar.iter().chain(&d.v).fold(0.0f64, |m, v| m.max(v.abs()));
        let monotone = DERIVATIVE_STEPS
            .windows(2)
            .zip(defects.windows(2))
            .all(|(s, w)| w[1] <= w[0] + 64.0 * f64::EPSILON * scale / s[1]);
        report.record(&d.v, if monotone { *defects.last().unwrap() } else { f64::INFINITY });
    }
    Ok(report)
}

/// Vector-level verdict and, for permutation-invariant sets, the verdict
/// for `λ⁻¹(Q)` at conjugated points, which must agree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProxRegularityReport {
    pub vector: ProbeReport,
    pub matrix: Option<ProbeReport>,
    pub agree: bool,
    pub pass: bool,
}

const MIN_GAP: f64 = 1e-9;
const DIAMETER_TOL: f64 = 1e-7;
const STARTS: usize = 8;

// Local minimizers whose distance is within `MIN_GAP` of `d_Q(y)`.
fn near_minimizers(q: &dyn ProjectableSet, y: &[f64], extra: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let d = q.distance(y)?;
    let mut all = q.local_minimizers(y, STARTS, rng)?;
    all.extend(extra.iter().cloned());
    Ok(all.into_iter().filter(|m| (dist(m, y) - d).abs() <= MIN_GAP).collect())
}

fn pick(q: &dyn ProjectableSet, y: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let all = q.local_minimizers(y, STARTS, rng)?;
    Ok(all.into_iter().min_by(|a, b| dist(a, y).total_cmp(&dist(b, y))).expect("nonempty set"))
}

/// Samples `B(x̄, radius)` and measures the diameter of the near-minimizer
/// set of `d_Q(y)` (threshold `1e-7`). Whenever the chosen nearest points
/// of `x̄` and `y` are farther apart than `x̄` and `y`, the segment is
/// bisected to locate a discontinuity of the projection, which is then
/// probed as an extra trial.
pub fn prox_regularity_probe(
    q: &dyn ProjectableSet,
    x_bar: &[f64],
    radius: f64,
    trials: usize,
    seed: u64,
) -> Result<ProxRegularityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut search = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut vector = ProbeReport::new("prox_regularity", DIAMETER_TOL, seed);
    let mut probes: Vec<Vec<f64>> = vec![x_bar.to_vec()];
    let p_bar = pick(q, x_bar, &mut search)?;
    for _ in 0..trials {
        let y = sample_ball(x_bar, radius, &mut rng);
        let p_y = pick(q, &y, &mut search)?;
        if dist(&p_bar, &p_y) > dist(x_bar, &y) + 1e-12 {
            let (mut a, mut b) = (x_bar.to_vec(), y.clone());
            let (mut pa, mut pb) = (p_bar.clone(), p_y.clone());
            for _ in 0..80 {
                let m: Vec<f64> = a.iter().zip(&b).map(|(u, v)| 0.5 * (u + v)).collect();
                let pm = pick(q, &m, &mut search)?;
                if dist(&pm, &pa) <= dist(&pm, &pb) {
                    a = m;
                    pa = pm;
                } else {
                    b = m;
                    pb = pm;
                }
            }
            let mins = near_minimizers(q, &a, &[pa, pb], &mut search)?;
            vector.record(&a, diameter(&mins));
            probes.push(a);
        }
        probes.push(y);
    }
    for y in &probes {
        let mins = near_minimizers(q, y, &[], &mut search)?;
        vector.record(y, diameter(&mins));
    }

    let matrix = if q.is_symmetric() {
        let mut mrng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let mut report = ProbeReport::new("prox_regularity_lifted", DIAMETER_TOL, seed);
        for (k, y) in probes.iter().enumerate() {
            let ymat = random_conjugate(y, &mut mrng);
            report.record(y, lifted_diameter(q, &ymat, seed.wrapping_add(k as u64), &mut search)?);
        }
        Some(report)
    } else {
        None
    };
    let agree = matrix.as_ref().is_none_or(|m| m.pass == vector.pass);
    let pass = vector.pass && agree;
    Ok(ProxRegularityReport { vector, matrix, agree, pass })
}

// Diameter of the nearest points of `λ⁻¹(Q)` to `Y` found by combining the
// vector-level minimizers for `λ(Y)` with samples of the stabilizer of `Y`.
fn lifted_diameter(q: &dyn ProjectableSet, y: &SymMatrix, seed: u64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let e = eig_sym(y)?;
    let mins = near_minimizers(q, &e.lambda, &[], rng)?;
    let mut mats: Vec<Vec<f64>> = Vec::new();
    for s in 0..4u64 {
        let u = if s == 0 { e.u.clone() } else { stabilizer_sample(&e, 1e-9 * (1.0 + y.frobenius_norm()), seed ^ s) };
        for p in &mins {
            let x = conjugate_by(&u, &diag_embed(p))?;
            mats.push(x.as_matrix().to_rows().concat());
        }
    }
    Ok(diameter(&mats))
}
