//! Numerical conjugates `f*(y) = sup_x ⟨x, y⟩ − f(x)` by grid scan and
//! golden-section refinement.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyfun::MaxAffineFn;

/// A real function on `Rⁿ` given by evaluation only.
#[derive(Clone)]
pub struct FunctionOracle {
    pub n: usize,
    pub separable: bool,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for FunctionOracle {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("FunctionOracle").field("n", &self.n).field("separable", &self.separable).finish()
    }
}

impl FunctionOracle {
    pub fn new(n: usize, separable: bool, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FunctionOracle { n, separable, f: Arc::new(f) }
    }

    /// `¼ Σ x_i⁴`, smooth with a conjugate that is not `C²` at the origin.
    pub fn quartic(n: usize) -> Self {
        FunctionOracle::new(n, true, |x| 0.25 * x.iter().map(|v| v.powi(4)).sum::<f64>())
    }

    pub fn polyhedral(f: MaxAffineFn) -> Self {
        FunctionOracle::new(f.n, false, move |x| f.value_f64(x, 0.0))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// `¾ Σ |y_i|^{4/3}`.
pub fn quartic_conjugate(y: &[f64]) -> f64 {
    0.75 * y.iter().map(|v| v.abs().powf(4.0 / 3.0)).sum::<f64>()
}

/// The box `[lo, hi]ⁿ` sampled with `points` values per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { lo: -4.0, hi: 4.0, points: 81 }
    }
}

const GOLDEN_STEPS: usize = 80;

/// Maximizes `⟨x, y⟩ − f(x)` over the grid, then refines one coordinate
/// at a time by golden-section search on the neighbouring cells
/// (`refine_iters` sweeps; one sweep for separable `f`). Errors when the
/// maximizer sits on the boundary of the box.
pub fn numeric_conjugate(f: &FunctionOracle, y: &[f64], grid: Grid, refine_iters: usize) -> Result<f64> {
    let n = f.n;
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    if grid.points < 3 || !(grid.hi > grid.lo) {
        return Err(Error::InvalidInput("grid needs at least three points on a nonempty interval".into()));
    }
    let objective = |x: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - f.eval(x);
    let h = (grid.hi - grid.lo) / (grid.points - 1) as f64;
    let total = grid.points.checked_pow(n as u32).ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let mut x = vec![0.0; n];
    for idx in 0..total {
        let mut r = idx;
        for xi in x.iter_mut() {
            *xi = grid.lo + (r % grid.points) as f64 * h;
            r /= grid.points;
        }
        let v = objective(&x);
        if v > best.0 {
            best = (v, x.clone());
        }
    }
    let on_boundary = |x: &[f64], slack: f64| x.iter().any(|&v| v <= grid.lo + slack || v >= grid.hi - slack);
    if on_boundary(&best.1, 0.5 * h) {
        return Err(Error::Inconclusive("maximizer on the grid boundary".into()));
    }
    let sweeps = if f.separable { 1 } else { refine_iters.max(1) };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..sweeps.min(refine_iters.max(1)) {
        for j in 0..n {
            let mut x = best.1.clone();
            let mut g = |s: f64| {
                x[j] = s;
                objective(&x)
            };
            let (mut a, mut b) = ((best.1[j] - h).max(grid.lo), (best.1[j] + h).min(grid.hi));
            let mut c = b - phi * (b - a);
            let mut d = a + phi * (b - a);
            let (mut gc, mut gd) = (g(c), g(d));
            for _ in 0..GOLDEN_STEPS {
                if gc > gd {
                    b = d;
                    d = c;
                    gd = gc;
                    c = b - phi * (b - a);
                    gc = g(c);
                } else {
                    a = c;
                    c = d;
                    gc = gd;
                    d = a + phi * (b - a);
                    gd = g(d);
                }
            }
            let s = 0.5 * (a + b);
            let v = g(s);
            if v > best.0 {
                best.0 = v;
                best.1[j] = s;
            }
        }
    }
    if on_boundary(&best.1, 1e-9) {
        return Err(Error::Inconclusive("maximizer on the grid boundary".into()));
    }
    Ok(best.0)
}
