//! Dense rational two-phase simplex with Bland's rule.

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use super::rational::{dot, zeros, QVec, Rational};
use crate::error::{Error, Result};

pub const PIVOT_BUDGET_ENV: &str = "SPECTRAL_LP_PIVOT_BUDGET";
const DEFAULT_PIVOT_BUDGET: usize = 200_000;

/// Pivot budget per LP solve, read once from `SPECTRAL_LP_PIVOT_BUDGET`.
pub fn pivot_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var(PIVOT_BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_PIVOT_BUDGET)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: QVec,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// `maximize cᵀx` subject to linear rows; variables are free unless marked
/// nonnegative.
#[derive(Clone, Debug)]
pub struct Lp {
    pub n: usize,
    pub objective: QVec,
    pub rows: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: QVec, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(QVec, Rational)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

impl Lp {
    /// Feasibility problem over `n` free variables.
    pub fn new(n: usize) -> Self {
        Lp { n, objective: zeros(n), rows: Vec::new(), nonneg: vec![false; n] }
    }

    pub fn maximize(mut self, c: QVec) -> Self {
        assert_eq!(c.len(), self.n);
        self.objective = c;
        self
    }

    pub fn row(&mut self, coeffs: QVec, cmp: Cmp, rhs: Rational) {
        assert_eq!(coeffs.len(), self.n);
        self.rows.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn le(&mut self, coeffs: QVec, rhs: Rational) {
        self.row(coeffs, Cmp::Le, rhs);
    }

    pub fn ge(&mut self, coeffs: QVec, rhs: Rational) {
        self.row(coeffs, Cmp::Ge, rhs);
    }

    pub fn eq(&mut self, coeffs: QVec, rhs: Rational) {
        self.row(coeffs, Cmp::Eq, rhs);
    }

    pub fn set_nonneg(&mut self, j: usize) {
        self.nonneg[j] = true;
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        Tableau::build(self).run(self)
    }

    pub fn is_feasible(&self) -> Result<bool> {
        let feas = Lp { objective: zeros(self.n), ..self.clone() };
        Ok(!matches!(feas.solve()?, LpOutcome::Infeasible))
    }
}

struct Tableau {
    // m constraint rows plus the objective row last; last column is the rhs.
    t: Vec<QVec>,
    basis: Vec<usize>,
    // Column ranges: structural [0, ns), slack [ns, na), artificial [na, nc).
    ns: usize,
    na: usize,
    nc: usize,
    // Structural column(s) for each original variable: (plus, minus).
    var_cols: Vec<(usize, Option<usize>)>,
    pivots: usize,
    budget: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let mut var_cols = Vec::with_capacity(lp.n);
        let mut ns = 0;
        for j in 0..lp.n {
            if lp.nonneg[j] {
                var_cols.push((ns, None));
                ns += 1;
            } else {
                var_cols.push((ns, Some(ns + 1)));
                ns += 2;
            }
        }
        let m = lp.rows.len();
        // Normalize every row to rhs ≥ 0.
        let mut rows: Vec<(QVec, Cmp, Rational)> = Vec::with_capacity(m);
        for r in &lp.rows {
            let mut coeffs = zeros(ns);
            for (j, a) in r.coeffs.iter().enumerate() {
                let (p, q) = var_cols[j];
                coeffs[p] = a.clone();
                if let Some(q) = q {
                    coeffs[q] = -a;
                }
            }
            if r.rhs.is_negative() {
                let cmp = match r.cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                rows.push((coeffs.iter().map(|x| -x).collect(), cmp, -&r.rhs));
            } else {
                rows.push((coeffs, r.cmp, r.rhs.clone()));
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let na = ns + n_slack;
        let nc = na + n_art;
        let mut t = Vec::with_capacity(m + 1);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (ns, na);
        for (coeffs, cmp, rhs) in rows {
            let mut row = coeffs;
            row.resize(nc + 1, Rational::zero());
            match cmp {
                Cmp::Le => {
                    row[s] = Rational::one();
                    basis.push(s);
                    s += 1;
                }
                Cmp::Ge => {
                    row[s] = -Rational::one();
                    s += 1;
                    row[a] = Rational::one();
                    basis.push(a);
                    a += 1;
                }
                Cmp::Eq => {
                    row[a] = Rational::one();
                    basis.push(a);
                    a += 1;
                }
            }
            row[nc] = rhs;
            t.push(row);
        }
        t.push(zeros(nc + 1));
        Tableau { t, basis, ns, na, nc, var_cols, pivots: 0, budget: pivot_budget() }
    }

    fn m(&self) -> usize {
        self.t.len() - 1
    }

    // Loads reduced costs of `cost` (maximization) into the objective row.
    fn load_objective(&mut self, cost: &[Rational]) {
        let m = self.m();
        let mut obj: QVec = cost.iter().cloned().chain(std::iter::once(Rational::zero())).collect();
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, x) in obj.iter_mut().zip(&self.t[i]) {
                if !x.is_zero() {
                    *o -= cb * x;
                }
            }
        }
        self.t[m] = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.budget {
            return Err(Error::PivotBudget(self.budget));
        }
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    // Bland's rule on columns `< limit`. Returns false when unbounded.
    fn optimize(&mut self, limit: usize) -> Result<bool> {
        let m = self.m();
        loop {
            let Some(c) = (0..limit).find(|&j| self.t[m][j].is_positive()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..m {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.nc] / &self.t[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }

    fn run(mut self, lp: &Lp) -> Result<LpOutcome> {
        if self.nc > self.na {
            let cost: QVec = (0..self.nc).map(|j| if j >= self.na { -Rational::one() } else { Rational::zero() }).collect();
            self.load_objective(&cost);
            self.optimize(self.nc)?;
            let m = self.m();
            if !self.t[m][self.nc].is_zero() {
                return Ok(LpOutcome::Infeasible);
            }
            // Drive zero-level artificials out of the basis or drop their rows.
            let mut i = 0;
            while i < self.m() {
                if self.basis[i] >= self.na {
                    match (0..self.na).find(|&j| !self.t[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j)?,
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = zeros(self.nc);
        for (j, c) in lp.objective.iter().enumerate() {
            let (p, q) = self.var_cols[j];
            cost[p] = c.clone();
            if let Some(q) = q {
                cost[q] = -c;
            }
        }
        self.load_objective(&cost);
        if !self.optimize(self.na)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut col_val = zeros(self.ns);
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.ns {
                col_val[b] = self.t[i][self.nc].clone();
            }
        }
        let x: QVec = self
            .var_cols
            .iter()
            .map(|&(p, q)| match q {
                Some(q) => &col_val[p] - &col_val[q],
                None => col_val[p].clone(),
            })
            .collect();
        let value = dot(&lp.objective, &x);
        Ok(LpOutcome::Optimal { x, value })
    }
}
