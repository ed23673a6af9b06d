//! Identifiability of strata, tested along generated sequences
//! `(x_i, v_i) → (x̄, v̄)` with `v_i ∈ ∂f(x_i)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{unit_random, ProbeReport};
use crate::error::{Error, Result};
use crate::lift::sample::{sample_in_stratum, sample_ri};
use crate::lift::{snap_vector, spectral_prox, vector_prox, SpectralFn};
use crate::matdecomp::{conjugate_by, diag_embed, eig_sym, givens, random_orthogonal, OrthMatrix, SymMatrix};
use crate::polyfun::rational::{add, qfrac, scale, sub, vec_to_f64, QVec, Rational};

/// Sequence families used to probe identifiability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `x_i = prox_f(x̄ + v̄ + ε_i z)`, `v_i = x̄ + v̄ + ε_i z − x_i`.
    ProxPath,
    /// `x_i` on segments from `x̄` into random strata `M'` with `x̄ ∈ cl M'`
    /// and `v̄ ∈ ∂f(M')`, `v_i` moving inside `∂f(M')` towards `v̄`.
    StratumHopping,
    /// `x_i` on a segment from `x̄` into a stratum `M' ≠ M` with
    /// `v̄ ∈ ∂f(M')` and `v_i = v̄`; falls back to `M` itself when no such
    /// stratum exists.
    Adversarial,
}

/// Sequence length: `ε_i = 2^{-i}` for `i = 1..=SEQUENCE_LEN`.
pub const SEQUENCE_LEN: usize = 24;
/// Iterates required after the tail index.
pub const MIN_TAIL: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentifiabilityReport {
    pub probe: ProbeReport,
    pub generator: Generator,
    pub lifted: bool,
    /// Per sequence: first index from which every iterate lies in `M`.
    pub tails: Vec<Option<usize>>,
}

fn eps(i: usize) -> Rational {
    qfrac(1, 1i64 << i)
}

fn tail_of(member: &[bool]) -> Option<usize> {
    let k = member.iter().rposition(|m| !m).map_or(0, |p| p + 1);
    (member.len() - k >= MIN_TAIL).then_some(k)
}

fn check_point(f: &SpectralFn, m: usize, x_bar: &[Rational], v_bar: &[Rational]) -> Result<()> {
    let strat = f.stratification()?;
    if m >= strat.len() || !strat.strata[m].contains(&f.base, x_bar) {
        return Err(Error::InvalidInput("the point does not lie in the stratum".into()));
    }
    if !f.base.subdiff(x_bar)?.contains(v_bar)? {
        return Err(Error::NotASubgradient);
    }
    Ok(())
}

fn random_direction(n: usize, rng: &mut impl Rng) -> QVec {
    loop {
        let z: QVec = (0..n).map(|_| qfrac(rng.random_range(-64..=64), 64)).collect();
        if z.iter().any(|c| *c != Rational::from_integer(0.into())) {
            return z;
        }
    }
}

// Strata `M'` with `x̄ ∈ cl M'` and `v̄ ∈ ∂f(M')`.
fn admissible_strata(f: &SpectralFn, x_bar: &[Rational], v_bar: &[Rational]) -> Result<Vec<usize>> {
    let strat = f.stratification()?;
    let mut out = Vec::new();
    for s in &strat.strata {
        if s.closure_contains(&f.base, x_bar) && s.subdiff(&f.base)?.contains(v_bar)? {
            out.push(s.id);
        }
    }
    Ok(out)
}

/// Vector-level sequences `(x_i, v_i)` for one trial.
fn vector_sequence(
    f: &SpectralFn,
    m: usize,
    x_bar: &[Rational],
    v_bar: &[Rational],
    generator: Generator,
    trial: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(QVec, QVec)>> {
    let strat = f.stratification()?;
    let n = x_bar.len();
    let mut seq = Vec::with_capacity(SEQUENCE_LEN);
    match generator {
        Generator::ProxPath => {
            let one = Rational::from_integer(1.into());
            let z = random_direction(n, rng);
            let center = add(x_bar, v_bar);
            for i in 1..=SEQUENCE_LEN {
                let y = add(&center, &scale(&z, &eps(i)));
                let x = vector_prox(f, &one, &y)?;
                let v = sub(&y, &x);
                seq.push((x, v));
            }
        }
        Generator::StratumHopping | Generator::Adversarial => {
            let admissible = admissible_strata(f, x_bar, v_bar)?;
            let others: Vec<usize> = admissible.iter().copied().filter(|&s| s != m).collect();
            let fixed = match generator {
                Generator::Adversarial if !others.is_empty() => Some(others[trial % others.len()]),
                Generator::Adversarial => Some(m),
                _ => None,
            };
            for i in 1..=SEQUENCE_LEN {
                let target = fixed.unwrap_or_else(|| admissible[rng.random_range(0..admissible.len())]);
                let stratum = &strat.strata[target];
                let (z, v) = if fixed.is_some() && generator == Generator::Adversarial && target != m {
                    (stratum.representative.clone(), v_bar.to_vec())
                } else {
                    let w = sample_ri(&stratum.subdiff(&f.base)?, rng);
                    (sample_in_stratum(&f.base, stratum, rng), add(v_bar, &scale(&sub(&w, v_bar), &eps(i))))
                };
                let x = add(x_bar, &scale(&sub(&z, x_bar), &eps(i)));
                seq.push((x, v));
            }
        }
    }
    Ok(seq)
}

/// Runs `trials` sequences of the generator. A sequence passes when every
/// iterate from some index on lies in `M`, with at least ten iterates after
/// that index; the probe passes when every sequence does.
pub fn identifiability_test(
    f: &SpectralFn,
    m: usize,
    x_bar: &[Rational],
    v_bar: &[Rational],
    generator: Generator,
    trials: usize,
    seed: u64,
) -> Result<IdentifiabilityReport> {
    check_point(f, m, x_bar, v_bar)?;
    let strat = f.stratification()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = ProbeReport::new("identifiability", 0.5, seed);
    let mut tails = Vec::with_capacity(trials);
    for trial in 0..trials {
        let seq = vector_sequence(f, m, x_bar, v_bar, generator, trial, &mut rng)?;
        let mut member = Vec::with_capacity(seq.len());
        for (x, v) in &seq {
            debug_assert!(f.base.subdiff(x)?.contains(v)?, "generated pair is not a subgradient pair");
            member.push(strat.strata[m].contains(&f.base, x));
        }
        let tail = tail_of(&member);
        let worst = seq.iter().zip(&member).rev().find(|(_, ok)| !**ok).map_or(&seq[0].0, |(p, _)| &p.0);
        probe.record(&vec_to_f64(worst), if tail.is_some() { 0.0 } else { 1.0 });
        tails.push(tail);
    }
    Ok(IdentifiabilityReport { probe, generator, lifted: false, tails })
}

/// `X̄ = U₀ᵀ Diag(x̄) U₀` and `V̄ = U₀ᵀ Diag(v̄) U₀` for a seeded `U₀`.
#[derive(Clone, Debug)]
pub struct LiftedInstance {
    pub u0: OrthMatrix,
    pub x_bar: SymMatrix,
    pub v_bar: SymMatrix,
}

impl LiftedInstance {
    pub fn new(x: &[f64], v: &[f64], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u0 = random_orthogonal(x.len(), &mut rng);
        Ok(LiftedInstance { x_bar: conjugate_by(&u0, &diag_embed(x))?, v_bar: conjugate_by(&u0, &diag_embed(v))?, u0 })
    }
}

/// Grouping tolerance used to read strata off iterates; well below
/// `ε_{SEQUENCE_LEN}`.
const LIFTED_GROUPING_TOL: f64 = 1e-11;

/// The same experiment for `F = f ∘ λ` at `X̄ = U₀ᵀ Diag(x̄) U₀`, with
/// membership in `λ⁻¹(M^sym)` read off the snapped eigenvalues. Prox paths
/// use the spectral prox with a random symmetric perturbation; the other
/// generators conjugate the vector sequences by `G(ε_i θ) U₀` for a random
/// plane rotation `G`.
pub fn lifted_identifiability_test(
    f: &SpectralFn,
    m: usize,
    x_bar: &[Rational],
    v_bar: &[Rational],
    generator: Generator,
    trials: usize,
    seed: u64,
) -> Result<IdentifiabilityReport> {
    check_point(f, m, x_bar, v_bar)?;
    let strat = f.stratification()?;
    let orbit = strat.orbit_of(m);
    let n = x_bar.len();
    let inst = LiftedInstance::new(&vec_to_f64(x_bar), &vec_to_f64(v_bar), seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
    let mut probe = ProbeReport::new("lifted_identifiability", 0.5, seed);
    let mut tails = Vec::with_capacity(trials);
    let in_orbit = |x: &SymMatrix| -> Result<bool> {
        let lam = snap_vector(&eig_sym(x)?.lambda, LIFTED_GROUPING_TOL)?;
        Ok(strat.locate(&f.base, &lam).is_some_and(|s| strat.orbit_of(s) == orbit))
    };
    for trial in 0..trials {
        let mut iterates: Vec<SymMatrix> = Vec::with_capacity(SEQUENCE_LEN);
        match generator {
            Generator::ProxPath => {
                let z = unit_random(n * n, &mut rng);
                let zs = SymMatrix::from_rows(
                    &(0..n).map(|a| (0..n).map(|b| 0.5 * (z[a * n + b] + z[b * n + a])).collect()).collect::<Vec<_>>(),
                )?;
                let center = inst.x_bar.add(&inst.v_bar);
                for i in 1..=SEQUENCE_LEN {
                    let y = center.add(&zs.scale(0.5f64.powi(i as i32)));
                    iterates.push(spectral_prox(f, 1.0, &y)?);
                }
            }
            _ => {
                let seq = vector_sequence(f, m, x_bar, v_bar, generator, trial, &mut rng)?;
                let (p, q) = if n > 1 {
                    let p = rng.random_range(0..n - 1);
                    (p, rng.random_range(p + 1..n))
                } else {
                    (0, 0)
                };
                let theta: f64 = rng.random_range(-1.0..1.0);
                for (i, (x, _)) in seq.iter().enumerate() {
                    let u = if n > 1 {
                        givens(n, p, q, theta * 0.5f64.powi(i as i32 + 1)).matmul(&inst.u0)
                    } else {
                        inst.u0.clone()
                    };
                    iterates.push(conjugate_by(&u, &diag_embed(&vec_to_f64(x)))?);
                }
            }
        }
        let member: Vec<bool> = iterates.iter().map(&in_orbit).collect::<Result<_>>()?;
        let tail = tail_of(&member);
        probe.record(&[trial as f64], if tail.is_some() { 0.0 } else { 1.0 });
        tails.push(tail);
    }
    Ok(IdentifiabilityReport { probe, generator, lifted: true, tails })
}
