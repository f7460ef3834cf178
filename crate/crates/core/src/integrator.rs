//! Adaptive Bulirsch–Stoer integration of `dy/dt = f(t, y)` on complex
//! vectors.
//!
//! Each step runs the modified midpoint rule with 2, 4, 6, … substeps and
//! extrapolates the results to zero substep size in `h²`. The difference
//! between the two highest extrapolants is the local error estimate, in the
//! max-norm.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulirschStoer {
    /// Accepted local error per step (absolute, max-norm).
    pub tolerance: f64,
    pub max_step: f64,
    /// Steps shorter than this abort the integration.
    pub min_step: f64,
    /// Number of midpoint sequences tried before the step is shrunk.
    pub max_stages: usize,
}

impl Default for BulirschStoer {
    fn default() -> Self {
        BulirschStoer {
            tolerance: 1e-12,
            max_step: f64::INFINITY,
            min_step: 1e-18,
            max_stages: 9,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest accepted local error estimate.
    pub max_error: f64,
}

impl IntegrationStats {
    pub fn merge(&mut self, other: &IntegrationStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
        self.max_error = self.max_error.max(other.max_error);
    }
}

impl BulirschStoer {
    pub fn with_tolerance(tolerance: f64, max_step: f64) -> Self {
        BulirschStoer {
            tolerance,
            max_step,
            ..Default::default()
        }
    }

    /// Integrates from `t0` to `t1` in place. `f(t, y, dydt)` writes the
    /// derivative into `dydt`.
    pub fn integrate<F>(&self, mut f: F, t0: f64, t1: f64, y: &mut [Complex64]) -> Result<IntegrationStats>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        if !(self.tolerance > 0.0) || !(self.max_step > 0.0) || self.max_stages < 2 {
            return Err(Error::domain("invalid integrator settings"));
        }
        if !(t1 >= t0) {
            return Err(Error::domain("integration interval must run forward"));
        }
        let n = y.len();
        let kmax = self.max_stages;
        let mut stats = IntegrationStats::default();
        let mut table: Vec<Vec<Vec<Complex64>>> = (0..kmax).map(|k| vec![vec![ZERO; n]; k + 1]).collect();
        let mut dy0 = vec![ZERO; n];
        let mut work = MidpointWork::new(n);

        let mut t = t0;
        let mut h = self.max_step.min(t1 - t0);
        while t < t1 {
            let last = t + h >= t1 - 1e-15 * t1.abs().max(1.0);
            if last {
                h = t1 - t;
            }
            f(t, y, &mut dy0);
            stats.evaluations += 1;
            let mut accepted = None;
            let mut err_last = f64::INFINITY;
            for k in 0..kmax {
                let steps = 2 * (k + 1);
                stats.evaluations += work.midpoint(&mut f, t, h, steps, y, &dy0, &mut table[k][0]);
                // Richardson extrapolation in h²: T[k][j] from T[k][j-1] and T[k-1][j-1].
                let mut err = 0.0;
                for j in 1..=k {
                    let ratio = (steps as f64 / (2 * (k - j + 1)) as f64).powi(2);
                    let (above, row) = table.split_at_mut(k);
                    let prev = &above[k - 1][j - 1];
                    let (done, rest) = row[0].split_at_mut(j);
                    let src = &done[j - 1];
                    let dst = &mut rest[0];
                    let mut diff_max = 0.0f64;
                    for ((d, &c), &p) in dst.iter_mut().zip(src.iter()).zip(prev.iter()) {
                        let delta = (c - p) / (ratio - 1.0);
                        *d = c + delta;
                        diff_max = diff_max.max(delta.norm());
                    }
                    err = diff_max;
                }
                if k == 0 {
                    continue;
                }
                err_last = err;
                if err <= self.tolerance {
                    accepted = Some((k, err));
                    break;
                }
            }
            match accepted {
                Some((k, err)) => {
                    y.copy_from_slice(&table[k][k]);
                    t = if last { t1 } else { t + h };
                    stats.accepted += 1;
                    stats.max_error = stats.max_error.max(err);
                    let exponent = 1.0 / (2 * k + 1) as f64;
                    let factor = if err == 0.0 {
                        2.0
                    } else {
                        (0.94 * (self.tolerance / err).powf(exponent)).clamp(0.2, 2.0)
                    };
                    // Converging only at the deepest stages means the step is
                    // too long to be efficient.
                    let factor = if k + 2 >= kmax { factor.min(0.7) } else { factor };
                    h = (h * factor).min(self.max_step);
                }
                None => {
                    stats.rejected += 1;
                    let shrink = if err_last.is_finite() && err_last > 0.0 {
                        (0.9 * (self.tolerance / err_last).powf(1.0 / (2 * kmax - 1) as f64)).clamp(0.1, 0.5)
                    } else {
                        0.25
                    };
                    h *= shrink;
                }
            }
            if h < self.min_step {
                return Err(Error::Propagation(format!(
                    "step size underflow at t = {t:.6e} s (h = {h:.3e} s)"
                )));
            }
        }
        Ok(stats)
    }
}

struct MidpointWork {
    prev: Vec<Complex64>,
    cur: Vec<Complex64>,
    deriv: Vec<Complex64>,
}

impl MidpointWork {
    fn new(n: usize) -> Self {
        MidpointWork {
            prev: vec![ZERO; n],
            cur: vec![ZERO; n],
            deriv: vec![ZERO; n],
        }
    }

    /// Modified midpoint over `[t, t + big_h]` with `steps` substeps. Returns
    /// the number of derivative evaluations.
    #[allow(clippy::too_many_arguments)]
    fn midpoint<F>(
        &mut self,
        f: &mut F,
        t: f64,
        big_h: f64,
        steps: usize,
        y: &[Complex64],
        dy0: &[Complex64],
        out: &mut [Complex64],
    ) -> usize
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let h = big_h / steps as f64;
        self.prev.copy_from_slice(y);
        for ((c, &y0), &d) in self.cur.iter_mut().zip(y).zip(dy0) {
            *c = y0 + d * h;
        }
        for m in 1..steps {
            f(t + m as f64 * h, &self.cur, &mut self.deriv);
            for ((p, c), &d) in self.prev.iter_mut().zip(self.cur.iter_mut()).zip(&self.deriv) {
                let next = *p + d * (2.0 * h);
                *p = *c;
                *c = next;
            }
        }
        f(t + big_h, &self.cur, &mut self.deriv);
        for (((o, &p), &c), &d) in out.iter_mut().zip(&self.prev).zip(&self.cur).zip(&self.deriv) {
            *o = (p + c + d * h) * 0.5;
        }
        steps
    }
}
