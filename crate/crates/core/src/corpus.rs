//! Built-in symmetric polyhedral functions and sets.

use crate::error::{Error, Result};
use crate::polyfun::rational::{neg, q, unit, zeros, QVec};
use crate::polyfun::{MaxAffineFn, PolySet, PolyUnion, SymmetryMode};

/// `‖x‖₁`: signed closure of the all-ones piece.
pub fn l1(n: usize) -> MaxAffineFn {
    MaxAffineFn::new(n, vec![(vec![q(1); n], q(0))], vec![], SymmetryMode::Signed).expect("valid")
}

/// `max_i x_i`, whose spectral lift is `λ₁`.
pub fn f_max(n: usize) -> MaxAffineFn {
    MaxAffineFn::new(n, vec![(unit(n, 0), q(0))], vec![], SymmetryMode::Permutation).expect("valid")
}

/// `‖x‖∞`: signed closure of `e₁`.
pub fn linf(n: usize) -> MaxAffineFn {
    MaxAffineFn::new(n, vec![(unit(n, 0), q(0))], vec![], SymmetryMode::Signed).expect("valid")
}

/// Indicator of the nonpositive orthant `Rⁿ₋`.
pub fn neg_orthant_indicator(n: usize) -> MaxAffineFn {
    MaxAffineFn::new(n, vec![(zeros(n), q(0))], vec![(unit(n, 0), q(0))], SymmetryMode::Permutation).expect("valid")
}

/// Functions available by name: `l1`, `fmax`, `linf`, `neg_orthant`.
pub fn function_by_name(name: &str, n: usize) -> Result<MaxAffineFn> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    Ok(match name {
        "l1" => l1(n),
        "fmax" => f_max(n),
        "linf" => linf(n),
        "neg_orthant" => neg_orthant_indicator(n),
        _ => return Err(Error::InvalidInput(format!("unknown function {name:?}"))),
    })
}

pub const FUNCTION_NAMES: [&str; 4] = ["l1", "fmax", "linf", "neg_orthant"];

/// `Rⁿ₋`.
pub fn neg_orthant(n: usize) -> PolySet {
    PolySet::new(n, (0..n).map(|i| (unit(n, i), q(0))).collect()).expect("nonempty")
}

/// `[−1, 1]ⁿ`.
pub fn unit_box(n: usize) -> PolySet {
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        rows.push((unit(n, i), q(1)));
        rows.push((neg(&unit(n, i)), q(1)));
    }
    PolySet::new(n, rows).expect("nonempty")
}

/// Normal of the base half-space of [`sym_halfspace`]: `(1, 2, 0, …)`.
pub fn halfspace_normal(n: usize) -> QVec {
    let mut a = zeros(n);
    a[0] = q(1);
    if n > 1 {
        a[1] = q(2);
    }
    a
}

/// `⋃_σ σ{x : ⟨a, x⟩ ≤ 1}` with `a = (1, 2, 0, …)`.
pub fn sym_halfspace(n: usize) -> PolyUnion {
    let h = PolySet::new(n, vec![(halfspace_normal(n), q(1))]).expect("nonempty");
    PolyUnion::symmetrized(&h, SymmetryMode::Permutation).expect("small group")
}

/// The line `{x₂ = 0}` in `R²`.
pub fn axis_line() -> PolySet {
    PolySet::new(2, vec![(unit(2, 1), q(0)), (neg(&unit(2, 1)), q(0))]).expect("nonempty")
}

/// `{−1, 1} ⊂ R`.
pub fn two_points() -> PolyUnion {
    let pt = |v: i64| PolySet::new(1, vec![(vec![q(1)], q(v)), (vec![q(-1)], q(-v))]).expect("nonempty");
    PolyUnion::new(1, vec![pt(-1), pt(1)]).expect("nonempty")
}

/// Vectors with at most one nonzero entry (`rank ≤ 1` in the singular-value lift).
pub fn at_most_one_nonzero(n: usize) -> PolyUnion {
    let mut rows = Vec::new();
    for j in 1..n {
        rows.push((unit(n, j), q(0)));
        rows.push((neg(&unit(n, j)), q(0)));
    }
    let base = PolySet::new(n, rows).expect("nonempty");
    PolyUnion::symmetrized(&base, SymmetryMode::Permutation).expect("small group")
}

/// Sets available by name: `neg_orthant`, `box`, `sym_halfspace`,
/// `axis_line`, `two_points`, `rank1`.
pub fn set_by_name(name: &str, n: usize) -> Result<PolyUnion> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    Ok(match name {
        "neg_orthant" => PolyUnion::single(neg_orthant(n)),
        "box" => PolyUnion::single(unit_box(n)),
        "sym_halfspace" => sym_halfspace(n),
        "axis_line" if n == 2 => PolyUnion::single(axis_line()),
        "two_points" if n == 1 => two_points(),
        "rank1" => at_most_one_nonzero(n),
        _ => return Err(Error::InvalidInput(format!("unknown set {name:?} in dimension {n}"))),
    })
}
