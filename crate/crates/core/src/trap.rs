//! Linear Paul trap: Mathieu parameters, secular frequencies and the
//! electrode amplitudes that produce a prescribed radial frequency.
//!
//! The modulated ion mode is the radial `x` direction, where
//! `a_x = 4eU₀/(mΩ_r²r₀²)` and `q_x = 2eV₀/(mΩ_r²r₀²)`; `y` has the opposite
//! signs.

use crate::constants::{CA40_MASS, ELEMENTARY_CHARGE};
use crate::error::{Error, Result};
use crate::pulse::ShapedPulse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// `Ω_r`, rad/s.
    pub rf_frequency: f64,
    /// `r₀`, m.
    pub electrode_distance: f64,
    /// `ω_z`, rad/s.
    pub axial_frequency: f64,
    /// `U₀`, V.
    pub dc_amplitude: f64,
    /// `V₀`, V.
    pub rf_amplitude: f64,
    pub charge: f64,
    pub mass: f64,
}

impl TrapParams {
    /// Trap with `U₀ = 0` whose RF amplitude gives the radial frequency
    /// `radial_frequency` for a ⁴⁰Ca⁺ ion.
    pub fn for_radial_frequency(
        rf_frequency: f64,
        electrode_distance: f64,
        axial_frequency: f64,
        radial_frequency: f64,
    ) -> Result<Self> {
        let mut trap = TrapParams {
            rf_frequency,
            electrode_distance,
            axial_frequency,
            dc_amplitude: 0.0,
            rf_amplitude: 0.0,
            charge: ELEMENTARY_CHARGE,
            mass: CA40_MASS,
        };
        trap.rf_amplitude = rf_amplitude_for(&trap, &[radial_frequency])?.values[0];
        stability_params(&trap)?;
        Ok(trap)
    }

    /// `m Ω_r² r₀² / e`, the voltage scale of the Mathieu parameters.
    fn voltage_scale(&self) -> f64 {
        self.mass * self.rf_frequency.powi(2) * self.electrode_distance.powi(2) / self.charge
    }

    fn validate(&self) -> Result<()> {
        let positive = [self.rf_frequency, self.electrode_distance, self.charge, self.mass];
        if positive.iter().any(|v| !(*v > 0.0)) || self.axial_frequency < 0.0 {
            return Err(Error::domain("trap parameters must be positive"));
        }
        Ok(())
    }
}

/// Degree of confidence in the pseudopotential approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StabilityClass {
    Fine,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    pub a_x: f64,
    pub a_y: f64,
    pub q_x: f64,
    pub q_y: f64,
    /// `ω_{0α} = sqrt(a_α + q_α²/2) Ω_r/2`.
    pub omega_0x: f64,
    pub omega_0y: f64,
    /// Radial secular frequencies `sqrt(ω_{0α}² − ω_z²/2)`.
    pub omega_x: f64,
    pub omega_y: f64,
    pub class: StabilityClass,
}

/// Classifies `(a, q)`: fine below `|a| < 0.05, |q| < 0.5`, marginal up to
/// `0.1 / 0.9`, an error beyond.
pub fn classify(a: f64, q: f64) -> Result<StabilityClass> {
    let (a, q) = (a.abs(), q.abs());
    if a < 0.05 && q < 0.5 {
        Ok(StabilityClass::Fine)
    } else if a <= 0.1 && q <= 0.9 {
        Ok(StabilityClass::Marginal)
    } else {
        Err(Error::Stability(format!("|a| = {a:.4}, |q| = {q:.4}")))
    }
}

pub fn stability_params(trap: &TrapParams) -> Result<StabilityParams> {
    trap.validate()?;
    let scale = trap.voltage_scale();
    let a_x = 4.0 * trap.dc_amplitude / scale;
    let q_x = 2.0 * trap.rf_amplitude / scale;
    let (a_y, q_y) = (-a_x, -q_x);
    let class = classify(a_x, q_x)?;
    let half_rf = trap.rf_frequency / 2.0;
    let axial_sq = trap.axial_frequency.powi(2) / 2.0;
    let secular = |a: f64, q: f64, axis: &str| -> Result<(f64, f64)> {
        let w0sq = (a + q * q / 2.0) * half_rf * half_rf;
        if w0sq < axial_sq {
            return Err(Error::Stability(format!("radial {axis} mode is not confined")));
        }
        Ok((w0sq.sqrt(), (w0sq - axial_sq).sqrt()))
    };
    let (omega_0x, omega_x) = secular(a_x, q_x, "x")?;
    let (omega_0y, omega_y) = secular(a_y, q_y, "y")?;
    Ok(StabilityParams {
        a_x,
        a_y,
        q_x,
        q_y,
        omega_0x,
        omega_0y,
        omega_x,
        omega_y,
        class,
    })
}

/// Electrode amplitude samples and the worst stability class met.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub values: Vec<f64>,
    pub class: StabilityClass,
}

/// DC amplitudes `U₀` realising each radial frequency at the trap's fixed
/// `V₀`: `(m r₀²/e)(ω² + ω_z²/2 − q²Ω_r²/8)`.
pub fn dc_amplitude_for(trap: &TrapParams, omegas: &[f64]) -> Result<Waveform> {
    trap.validate()?;
    let scale = trap.voltage_scale();
    let q = 2.0 * trap.rf_amplitude / scale;
    let pref = trap.mass * trap.electrode_distance.powi(2) / trap.charge;
    let mut class = StabilityClass::Fine;
    let mut values = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let u0 = pref * (w * w + trap.axial_frequency.powi(2) / 2.0 - q * q * trap.rf_frequency.powi(2) / 8.0);
        class = class.max(classify(4.0 * u0 / scale, q)?);
        values.push(u0);
    }
    Ok(Waveform { values, class })
}

/// RF amplitudes `V₀` realising each radial frequency at the trap's fixed
/// `U₀`: `(√2 m Ω_r r₀²/e) sqrt(ω² + ω_z²/2 − aΩ_r²/4)`.
pub fn rf_amplitude_for(trap: &TrapParams, omegas: &[f64]) -> Result<Waveform> {
    trap.validate()?;
    let scale = trap.voltage_scale();
    let a = 4.0 * trap.dc_amplitude / scale;
    let pref = std::f64::consts::SQRT_2 * trap.mass * trap.rf_frequency * trap.electrode_distance.powi(2) / trap.charge;
    let mut class = StabilityClass::Fine;
    let mut values = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let radicand = w * w + trap.axial_frequency.powi(2) / 2.0 - a * trap.rf_frequency.powi(2) / 4.0;
        if radicand < 0.0 {
            return Err(Error::InfeasiblePulse(format!(
                "no RF amplitude reaches ω = {w:.6e} rad/s at this DC offset"
            )));
        }
        let v0 = pref * radicand.sqrt();
        class = class.max(classify(a, 2.0 * v0 / scale)?);
        values.push(v0);
    }
    Ok(Waveform { values, class })
}

pub fn dc_waveform(pulse: &ShapedPulse, trap: &TrapParams) -> Result<Waveform> {
    let omegas: Vec<f64> = pulse.samples.iter().map(|s| s.omega).collect();
    dc_amplitude_for(trap, &omegas)
}

pub fn rf_waveform(pulse: &ShapedPulse, trap: &TrapParams) -> Result<Waveform> {
    let omegas: Vec<f64> = pulse.samples.iter().map(|s| s.omega).collect();
    rf_amplitude_for(trap, &omegas)
}

/// Radial `x` frequency produced by the trap with its DC amplitude replaced.
pub fn omega_from_dc(trap: &TrapParams, dc_amplitude: f64) -> Result<f64> {
    Ok(stability_params(&TrapParams { dc_amplitude, ..*trap })?.omega_x)
}

/// Radial `x` frequency produced by the trap with its RF amplitude replaced.
pub fn omega_from_rf(trap: &TrapParams, rf_amplitude: f64) -> Result<f64> {
    Ok(stability_params(&TrapParams { rf_amplitude, ..*trap })?.omega_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const W0: f64 = 2.0 * PI * 2.2e6;

    fn trap() -> TrapParams {
        TrapParams::for_radial_frequency(2.0 * PI * 30e6, 0.5e-3, 2.0 * PI * 0.5e6, W0).unwrap()
    }

    #[test]
    fn reference_trap() {
        let t = trap();
        let s = stability_params(&t).unwrap();
        assert!((s.omega_x - W0).abs() < 1e-6 * W0);
        assert!((s.q_x - 0.21).abs() < 0.01, "{}", s.q_x);
        assert!((t.rf_amplitude - 387.0).abs() < 5.0, "{}", t.rf_amplitude);
        assert_eq!(s.class, StabilityClass::Fine);
        assert_eq!(s.a_x, 0.0);
        // U₀ = 0 ⇒ ω_{0x} = q Ω_r / (2√2)
        assert!((s.omega_0x - s.q_x * t.rf_frequency / (2.0 * 2f64.sqrt())).abs() < 1e-6 * W0);
    }

    #[test]
    fn q_is_linear_in_rf() {
        let t = trap();
        let s1 = stability_params(&t).unwrap();
        let t2 = TrapParams {
            rf_amplitude: 2.0 * t.rf_amplitude,
            ..t
        };
        let s2 = stability_params(&t2).unwrap();
        assert!((s2.q_x - 2.0 * s1.q_x).abs() < 1e-15);
        assert_eq!(s2.q_y, -s2.q_x);
    }

    #[test]
    fn amplitude_round_trips() {
        let t = trap();
        for &w in &[W0, W0 + 2.0 * PI * 250e3, W0 - 2.0 * PI * 100e3] {
            let u0 = dc_amplitude_for(&t, &[w]).unwrap().values[0];
            assert!((omega_from_dc(&t, u0).unwrap() - w).abs() < 1e-10 * w);
            let v0 = rf_amplitude_for(&t, &[w]).unwrap().values[0];
            assert!((omega_from_rf(&t, v0).unwrap() - w).abs() < 1e-10 * w);
        }
        let dc = dc_amplitude_for(&t, &[W0]).unwrap().values[0];
        assert!(dc.abs() < 1e-9);
    }

    #[test]
    fn excursion_raises_both_amplitudes() {
        let t = trap();
        let w = [W0, W0 + 2.0 * PI * 250e3];
        let dc = dc_amplitude_for(&t, &w).unwrap().values;
        assert!(dc[1] - dc[0] > 0.0);
        let rf = rf_amplitude_for(&t, &w).unwrap().values;
        assert!(rf[1] > rf[0]);
    }

    #[test]
    fn stability_limits() {
        assert_eq!(classify(0.01, 0.3).unwrap(), StabilityClass::Fine);
        assert_eq!(classify(0.07, 0.3).unwrap(), StabilityClass::Marginal);
        assert_eq!(classify(0.0, 0.7).unwrap(), StabilityClass::Marginal);
        assert!(classify(0.2, 0.3).is_err());
        assert!(classify(0.0, 0.95).is_err());
        let weak = TrapParams {
            rf_amplitude: 10.0,
            ..trap()
        };
        assert!(stability_params(&weak).is_err());
    }
}
