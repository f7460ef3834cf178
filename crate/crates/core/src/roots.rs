//! Bracketed scalar root finding.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` differ in
/// sign. Each iteration tries a secant step from the bracket ends and falls
/// back to bisection when the step leaves the bracket or stalls.
/// Stops when `|f(x)| <= f_tol` or the bracket is narrower than `x_tol`.
pub fn bracketed_root(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
    f_tol: f64,
) -> Result<Root> {
    if !(lo < hi) {
        return Err(Error::domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(Root {
            x: lo,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fhi == 0.0 {
        return Ok(Root {
            x: hi,
            residual: 0.0,
            iterations: 0,
        });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::domain(format!(
            "no sign change on [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}"
        )));
    }
    let mut last_width = hi - lo;
    for iterations in 1..=200 {
        let secant = hi - fhi * (hi - lo) / (fhi - flo);
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        // Bisect whenever the secant leaves the interior or the bracket
        // stopped shrinking fast enough.
        let inside = secant > lo && secant < hi;
        let x = if inside && (iterations == 1 || width < 0.75 * last_width) {
            secant
        } else {
            mid
        };
        last_width = width;
        let fx = f(x)?;
        if fx.abs() <= f_tol || width <= x_tol {
            return Ok(Root {
                x,
                residual: fx,
                iterations,
            });
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    Err(Error::domain("root finder did not converge in 200 iterations"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = bracketed_root(|x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-15, 1e-14).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
        assert!(r.iterations < 60);
    }

    #[test]
    fn flat_ended_function() {
        // tanh saturates, which stalls plain secant iterations
        let r = bracketed_root(|x| Ok((20.0 * (x - 0.3)).tanh()), -5.0, 5.0, 1e-14, 1e-14).unwrap();
        assert!((r.x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_errors() {
        assert_eq!(bracketed_root(Ok, 0.0, 1.0, 1e-12, 0.0).unwrap().x, 0.0);
        assert!(bracketed_root(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 0.0).is_err());
        assert!(bracketed_root(Ok, 1.0, 0.0, 1e-12, 0.0).is_err());
        assert!(bracketed_root(|_| Err(Error::domain("boom")), 0.0, 1.0, 1e-12, 0.0).is_err());
    }
}
