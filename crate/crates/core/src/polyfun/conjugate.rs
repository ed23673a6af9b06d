//! Fenchel conjugation of polyhedral functions by exact LP, the duality map
//! `J_f` and the conjugate stratification `A_{f*}`.

use num_traits::{One, Zero};
use serde::Serialize;

use super::function::{ExtValue, MaxAffineFn};
use super::lp::{Lp, LpOutcome};
use super::polyhedron::{relint_analysis, GenPolyhedron, GenPolyhedronJson};
use super::rational::{dot, format_rational, format_vec, zeros, QVec, Rational};
use super::stratify::{Stratification, Stratum};
use crate::error::{Error, Result};

/// `f*(y) = sup_x ⟨x, y⟩ − f(x)` and a maximizer when finite.
pub fn conjugate_value(f: &MaxAffineFn, y: &[Rational]) -> Result<(ExtValue, Option<QVec>)> {
    let n = f.n;
    let mut obj = y.to_vec();
    obj.push(-Rational::one());
    let mut lp = Lp::new(n + 1).maximize(obj);
    for (a, b) in f.epigraph_rows() {
        lp.le(a, b);
    }
    Ok(match lp.solve()? {
        LpOutcome::Optimal { x, value } => (ExtValue::Finite(value), Some(x[..n].to_vec())),
        LpOutcome::Unbounded => (ExtValue::PosInf, None),
        LpOutcome::Infeasible => unreachable!("epigraph of a proper function is nonempty"),
    })
}

/// A relatively open polyhedron stored as its closure.
#[derive(Clone, Debug)]
pub struct RelOpen {
    pub closure: GenPolyhedron,
}

impl RelOpen {
    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        self.closure.ri_contains(v)
    }

    pub fn dim(&self) -> usize {
        self.closure.dim()
    }
}

/// `J_f(M) = ri ∂f(x)` for any `x ∈ M`.
pub fn dual_map(f: &MaxAffineFn, m: &Stratum) -> Result<RelOpen> {
    Ok(RelOpen { closure: m.subdiff(f)? })
}

/// Stratum of `dom f` equal to `J_{f*}(D) = ri ∂f*(y)` for `y` in a dual
/// stratum `D`: the relative interior of the argmax face of
/// `⟨y, x⟩ − t` over `epi f`.
pub fn j_fstar(f: &MaxAffineFn, strat: &Stratification, y: &[Rational]) -> Result<Option<usize>> {
    let (value, _) = conjugate_value(f, y)?;
    let ExtValue::Finite(fy) = value else {
        return Ok(None);
    };
    let mut rows = f.epigraph_rows();
    let extra = rows.len();
    let mut a: QVec = y.iter().map(|v| -v).collect();
    a.push(Rational::one());
    rows.push((a, -fy));
    let Some(ri) = relint_analysis(&rows, f.n + 1, &[extra])? else {
        return Ok(None);
    };
    let tight: Vec<usize> = ri.tight.into_iter().filter(|&k| k != extra).collect();
    Ok(strat.by_signature(&f.split_tight(&tight)))
}

#[derive(Clone, Debug)]
pub struct DualStratum {
    pub id: usize,
    pub set: RelOpen,
    pub representative: QVec,
    /// Primal stratum `M` with `J_f(M)` equal to this stratum.
    pub primal: usize,
}

/// `A_{f*} = {J_f(M) : M ∈ A_f}` with the inverse table from `J_{f*}`.
#[derive(Clone, Debug)]
pub struct ConjugateStratification {
    pub strata: Vec<DualStratum>,
    /// `inverse[k]` is the primal stratum returned by `J_{f*}` on dual stratum `k`.
    pub inverse: Vec<usize>,
}

impl ConjugateStratification {
    /// `J_{f*} ∘ J_f = id` on every stratum.
    pub fn is_bijection(&self) -> bool {
        self.strata.iter().all(|d| self.inverse[d.id] == d.primal)
    }

    pub fn locate(&self, y: &[Rational]) -> Result<Option<usize>> {
        for d in &self.strata {
            if d.set.contains(y)? {
                return Ok(Some(d.id));
            }
        }
        Ok(None)
    }
}

pub fn conjugate_stratification(f: &MaxAffineFn, strat: &Stratification) -> Result<ConjugateStratification> {
    let mut strata = Vec::with_capacity(strat.len());
    let mut inverse = Vec::with_capacity(strat.len());
    for m in &strat.strata {
        let set = dual_map(f, m)?;
        let representative = set.closure.ri_point();
        debug_assert!(set.contains(&representative)?);
        let back = j_fstar(f, strat, &representative)?
            .ok_or_else(|| Error::Inconclusive(format!("J_f* is undefined on the image of stratum {}", m.id)))?;
        inverse.push(back);
        strata.push(DualStratum { id: m.id, set, representative, primal: m.id });
    }
    Ok(ConjugateStratification { strata, inverse })
}

/// Outcome of [`fenchel_young_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FenchelYoung {
    pub inner: String,
    pub f_x: String,
    pub fstar_y: String,
    pub inequality_holds: bool,
    pub equality: bool,
    pub y_in_subdiff: bool,
    /// Inequality holds and equality coincides with `y ∈ ∂f(x)`.
    pub consistent: bool,
}

pub fn fenchel_young_check(f: &MaxAffineFn, x: &[Rational], y: &[Rational]) -> Result<FenchelYoung> {
    let inner = dot(x, y);
    let fx = f.value(x);
    let (fy, _) = conjugate_value(f, y)?;
    let (inequality_holds, equality) = match (&fx, &fy) {
        (ExtValue::Finite(a), ExtValue::Finite(b)) => (inner <= a + b, inner == a + b),
        _ => (true, false),
    };
    let y_in_subdiff = match f.subdiff(x) {
        Ok(s) => s.contains(y)?,
        Err(Error::NotInDomain) => false,
        Err(e) => return Err(e),
    };
    Ok(FenchelYoung {
        inner: format_rational(&inner),
        f_x: fx.to_string(),
        fstar_y: fy.to_string(),
        inequality_holds,
        equality,
        y_in_subdiff,
        consistent: inequality_holds && equality == y_in_subdiff,
    })
}

/// `f**(x)` through the dual description
/// `f*(y) = min{Σμ_j d_j − Σλ_i b_i : Σλ_i a_i + Σμ_j c_j = y, Σλ = 1, λ, μ ≥ 0}`,
/// so that `f**(x) = max_{y,λ,μ} ⟨x, y⟩ + Σλ_i b_i − Σμ_j d_j`.
pub fn biconjugate_value(f: &MaxAffineFn, x: &[Rational]) -> Result<ExtValue> {
    let n = f.n;
    let (p, c) = (f.pieces().len(), f.constraints().len());
    let nv = n + p + c;
    let mut obj = zeros(nv);
    obj[..n].clone_from_slice(x);
    for (i, (_, b)) in f.pieces().iter().enumerate() {
        obj[n + i] = b.clone();
    }
    for (j, (_, d)) in f.constraints().iter().enumerate() {
        obj[n + p + j] = -d;
    }
    let mut lp = Lp::new(nv).maximize(obj);
    for j in n..nv {
        lp.set_nonneg(j);
    }
    for k in 0..n {
        let mut row = zeros(nv);
        row[k] = -Rational::one();
        for (i, (a, _)) in f.pieces().iter().enumerate() {
            row[n + i] = a[k].clone();
        }
        for (j, (cj, _)) in f.constraints().iter().enumerate() {
            row[n + p + j] = cj[k].clone();
        }
        lp.eq(row, Rational::zero());
    }
    let mut sum = zeros(nv);
    for v in sum.iter_mut().skip(n).take(p) {
        *v = Rational::one();
    }
    lp.eq(sum, Rational::one());
    Ok(match lp.solve()? {
        LpOutcome::Optimal { value, .. } => ExtValue::Finite(value),
        LpOutcome::Unbounded => ExtValue::PosInf,
        LpOutcome::Infeasible => unreachable!("λ = e_1, μ = 0 is feasible"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BiconjugateReport {
    pub x: Vec<String>,
    pub f_x: String,
    pub fstarstar_x: String,
    pub equal: bool,
}

pub fn biconjugate_check(f: &MaxAffineFn, x: &[Rational]) -> Result<BiconjugateReport> {
    if !f.in_domain(x) {
        return Err(Error::NotInDomain);
    }
    let fx = f.value(x);
    let fxx = biconjugate_value(f, x)?;
    Ok(BiconjugateReport { x: format_vec(x), f_x: fx.to_string(), fstarstar_x: fxx.to_string(), equal: fx == fxx })
}

/// Serialized dual pairing entry.
#[derive(Clone, Debug, Serialize)]
pub struct PairingJson {
    pub primal: usize,
    pub primal_dim: usize,
    pub dual: usize,
    pub dual_dim: usize,
    pub dual_set: GenPolyhedronJson,
    pub dual_representative: Vec<String>,
    pub inverse_ok: bool,
}

impl ConjugateStratification {
    pub fn pairing_json(&self, strat: &Stratification) -> Vec<PairingJson> {
        self.strata
            .iter()
            .map(|d| PairingJson {
                primal: d.primal,
                primal_dim: strat.strata[d.primal].dim,
                dual: d.id,
                dual_dim: d.set.dim(),
                dual_set: d.set.closure.to_json(),
                dual_representative: format_vec(&d.representative),
                inverse_ok: self.inverse[d.id] == d.primal,
            })
            .collect()
    }
}
