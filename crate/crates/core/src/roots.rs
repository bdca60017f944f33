//! Scalar root finding for strictly increasing functions.
//!
//! Every nonlinear equation in this crate reduces to a monotone scalar
//! residual with a known sign change, so one safeguarded Newton–bisection
//! routine covers all of them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once `|f(x)| ≤ f_tol`.
    pub f_tol: f64,
    /// Stop once the bracket is narrower than `x_tol · max(1, |x|)`.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { f_tol: 0.0, x_tol: 1e-15, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Root of an increasing function `f` on `[lo, hi]` with `f(lo) ≤ 0 ≤ f(hi)`.
///
/// `f` returns the value and its derivative. Newton steps are taken when they
/// stay inside the current bracket; otherwise the bracket is bisected.
pub fn newton_bisect<F>(f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::NoConvergence { iterations: 0, residual: flo.abs().min(fhi.abs()) });
    }
    if flo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    let mut x = 0.5 * (lo + hi);
    let mut best = Root { x, residual: f64::INFINITY, iterations: 0 };
    let mut width_before = hi - lo;
    for it in 1..=opts.max_iter {
        let (fx, dfx) = f(x);
        if fx.abs() < best.residual {
            best = Root { x, residual: fx.abs(), iterations: it };
        }
        if fx == 0.0 || fx.abs() <= opts.f_tol {
            return Ok(Root { x, residual: fx.abs(), iterations: it });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= opts.x_tol * 1.0_f64.max(x.abs()) {
            return Ok(best);
        }
        let newton = x - fx / dfx;
        // force a bisection every other step unless Newton halves the bracket
        let slow = it % 2 == 0 && hi - lo > 0.5 * width_before;
        if it % 2 == 0 {
            width_before = hi - lo;
        }
        x = if !slow && dfx > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if x <= lo || x >= hi {
            // bracket has collapsed to adjacent floats
            return Ok(best);
        }
    }
    if best.residual <= opts.f_tol {
        Ok(best)
    } else {
        Err(Error::NoConvergence { iterations: opts.max_iter, residual: best.residual })
    }
}

/// Plain bisection on an increasing function, run until the bracket collapses.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, max_iter: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(newton_bisect(|x| (x - 5.0, 1.0), 0.0, 1.0, RootOptions::default()).is_err());
    }

    #[test]
    fn survives_flat_derivative() {
        // cube root: derivative vanishes at the root
        let r = newton_bisect(|x| (x * x * x, 3.0 * x * x), -1.0, 2.0, RootOptions::default()).unwrap();
        assert!(r.x.abs() < 1e-5);
        let b = bisect(|x| x.powi(3) - 0.125, 0.0, 1.0, 200);
        assert!((b - 0.5).abs() < 1e-15);
    }
}
