//! Limits set by a finite pulse length: every evolve segment must be able to
//! hold a pulse, so `N_BP · n_r · T_P < T`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityBounds {
    /// `M` must be strictly below this.
    pub max_modes: usize,
    /// `η` must be strictly below this.
    pub max_eta: usize,
    /// `n_r` must be strictly below this, when `N_BP` was given.
    pub max_reps: Option<usize>,
}

/// Strict upper bounds for a decoupling time `T` and pulse length `T_P`:
/// `M < 2^L`, `η < 2^{L−1}` with `L = ⌊log₂(T/(T_P n_r))⌋`, and
/// `n_r < T/(N_BP T_P)`.
pub fn feasibility_bounds(
    total_time: f64,
    pulse_duration: f64,
    repetitions: usize,
    n_bp: Option<usize>,
) -> Result<FeasibilityBounds> {
    if !(total_time > 0.0) || !(pulse_duration > 0.0) || repetitions < 1 {
        return Err(Error::domain("times must be positive and repetitions at least 1"));
    }
    if pulse_duration >= total_time {
        return Ok(FeasibilityBounds {
            max_modes: 0,
            max_eta: 0,
            max_reps: n_bp.map(|_| 0),
        });
    }
    let ratio = total_time / (pulse_duration * repetitions as f64);
    let (max_modes, max_eta) = if ratio < 1.0 {
        (0, 0)
    } else {
        let l = ratio.log2().floor() as u32;
        (1usize << l, if l >= 1 { 1usize << (l - 1) } else { 0 })
    };
    let max_reps = n_bp.map(|n| {
        let limit = total_time / (n as f64 * pulse_duration);
        limit.ceil() as usize
    });
    Ok(FeasibilityBounds {
        max_modes,
        max_eta,
        max_reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{coupling_rate, fifty_fifty_time};
    use crate::constants::CA40_MASS;
    use std::f64::consts::PI;

    fn long_chain_time() -> f64 {
        let kappa = coupling_rate(43.8e-6, CA40_MASS, 2.0 * PI * 2.2e6).unwrap();
        fifty_fifty_time(kappa)
    }

    #[test]
    fn reference_bounds() {
        let t = long_chain_time();
        let tp = 4e-6;
        assert!((t / tp - 131.3).abs() < 0.1);
        let one = feasibility_bounds(t, tp, 1, Some(4)).unwrap();
        assert_eq!((one.max_modes, one.max_eta, one.max_reps), (128, 64, Some(33)));
        let five = feasibility_bounds(t, tp, 5, None).unwrap();
        assert_eq!((five.max_modes, five.max_eta), (16, 8));
    }

    #[test]
    fn pulse_as_long_as_cycle() {
        let b = feasibility_bounds(1.0, 1.0, 1, Some(2)).unwrap();
        assert_eq!((b.max_modes, b.max_eta, b.max_reps), (0, 0, Some(0)));
        assert!(feasibility_bounds(1.0, 0.0, 1, None).is_err());
    }
}
