//! Proximal point runs on spectral functions and the eigenvalue patterns
//! they identify.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::{snap_vector, spectral_prox, spectral_value, SpectralFn};
use crate::matdecomp::{eig_sym, SymMatrix};
use crate::symmetry::partition_of;

/// Fixed-point threshold on `‖X_{k+1} − X_k‖_F`.
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Iterates required after the identification index when the run does not
/// end at an exact fixed point.
pub const MIN_POST_TAIL: usize = 10;

/// Symmetric stratum class of the snapped eigenvalues plus their
/// equality pattern (1-based blocks).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    pub orbit: Option<usize>,
    pub partition: Vec<Vec<usize>>,
}

impl Pattern {
    pub fn of_vector(f: &SpectralFn, lambda: &[f64], grouping_tol: f64) -> Result<Self> {
        let snapped = snap_vector(lambda, grouping_tol)?;
        let strat = f.stratification()?;
        Ok(Pattern {
            orbit: strat.locate(&f.base, &snapped).map(|s| strat.orbit_of(s)),
            partition: partition_of(lambda, grouping_tol).to_one_based(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub k: usize,
    pub matrix: Vec<Vec<f64>>,
    pub lambda: Vec<f64>,
    pub pattern: Pattern,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FixedPoint,
    MaxIter,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentificationTrace {
    pub t: f64,
    pub grouping_tol: f64,
    pub max_iter: usize,
    pub iterates: Vec<TraceEntry>,
    /// First `k` from which every recorded pattern equals the final one.
    /// Certified by an exact fixed point or by ten later iterates.
    pub identified_at: Option<usize>,
    pub termination: Termination,
}

impl IdentificationTrace {
    pub fn limit_pattern(&self) -> &Pattern {
        &self.iterates.last().expect("trace is never empty").pattern
    }
}

/// `X_{k+1} = prox_{tF}(X_k)` until `‖X_{k+1} − X_k‖_F ≤ 1e-12` or
/// `max_iter` steps.
pub fn proximal_identification_run(
    f: &SpectralFn,
    x0: &SymMatrix,
    t: f64,
    max_iter: usize,
    grouping_tol: f64,
) -> Result<IdentificationTrace> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("prox parameter must be positive".into()));
    }
    if x0.n() != f.base.n {
        return Err(Error::DimensionMismatch { expected: f.base.n, found: x0.n() });
    }
    let entry = |k: usize, x: &SymMatrix| -> Result<TraceEntry> {
        let lambda = eig_sym(x)?.lambda;
        Ok(TraceEntry {
            k,
            matrix: x.as_matrix().to_rows(),
            pattern: Pattern::of_vector(f, &lambda, grouping_tol)?,
            value: spectral_value(f, x, grouping_tol)?,
            lambda,
        })
    };
    let mut iterates = vec![entry(0, x0)?];
    let mut x = x0.clone();
    let mut termination = Termination::MaxIter;
    for k in 1..=max_iter {
        let next = spectral_prox(f, t, &x)?;
        let step = next.sub(&x).frobenius_norm();
        iterates.push(entry(k, &next)?);
        x = next;
        if step <= FIXED_POINT_TOL {
            termination = Termination::FixedPoint;
            break;
        }
    }
    let last = &iterates.last().expect("nonempty").pattern;
    let tail = iterates.iter().rposition(|e| &e.pattern != last).map_or(0, |p| p + 1);
    let certified = termination == Termination::FixedPoint || iterates.len() - 1 - tail >= MIN_POST_TAIL;
    Ok(IdentificationTrace {
        t,
        grouping_tol,
        max_iter,
        identified_at: certified.then_some(tail),
        iterates,
        termination,
    })
}

/// Limit of the scalar iteration `y ← sign(y)·max(|y| − t, 0)`.
pub fn soft_threshold_limit(y: &[f64], t: f64) -> Vec<f64> {
    let mut cur = y.to_vec();
    loop {
        let next = crate::lift::soft_threshold(&cur, t);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::matdecomp::diag_embed;

    fn abs_sum() -> SpectralFn {
        SpectralFn::eigen(corpus::l1(3)).unwrap()
    }

    #[test]
    fn converges_to_zero_pattern() {
        let f = abs_sum();
        let tr = proximal_identification_run(&f, &diag_embed(&[1.2, 0.3, -0.2]), 0.5, 50, 1e-9).unwrap();
        assert_eq!(tr.termination, Termination::FixedPoint);
        assert_eq!(tr.identified_at, Some(3));
        // The intermediate iterate has one positive and two zero eigenvalues.
        assert_eq!(tr.iterates[1].pattern.partition, vec![vec![1], vec![2, 3]]);
        let limit = soft_threshold_limit(&[1.2, 0.3, -0.2], 0.5);
        assert_eq!(tr.limit_pattern(), &Pattern::of_vector(&f, &limit, 1e-9).unwrap());
    }

    #[test]
    fn fixed_point_start() {
        let f = abs_sum();
        let tr = proximal_identification_run(&f, &diag_embed(&[0.0, 0.0, 0.0]), 0.5, 5, 1e-9).unwrap();
        assert_eq!(tr.identified_at, Some(0));
        assert_eq!(tr.iterates.len(), 2);
    }

    #[test]
    fn truncated_run() {
        let f = abs_sum();
        let tr = proximal_identification_run(&f, &diag_embed(&[3.0, 1.0, -2.0]), 0.5, 1, 1e-9).unwrap();
        assert_eq!(tr.iterates.len(), 2);
        assert_eq!(tr.identified_at, None);
    }
}
