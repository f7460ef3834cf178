//! Geometry of the ion chain and the Coulomb hopping rates between its
//! radial local modes.

use std::f64::consts::PI;

use crate::constants::{PhysicalConstants, CA40_MASS, CODATA};
use crate::error::{Error, Result};

/// Range of the Coulomb coupling kept in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Every pair couples.
    #[default]
    None,
    /// Only pairs with `|j - k| <= η` couple.
    Distance(usize),
}

impl Truncation {
    pub fn keeps(&self, j: usize, k: usize) -> bool {
        match *self {
            Truncation::None => true,
            Truncation::Distance(eta) => j.abs_diff(k) <= eta,
        }
    }

    pub fn distance(&self) -> Option<usize> {
        match *self {
            Truncation::None => None,
            Truncation::Distance(eta) => Some(eta),
        }
    }
}

/// Physical description of a chain of `M` ions oscillating radially.
#[derive(Debug, Clone, PartialEq)]
pub struct IonChainConfig {
    pub mode_count: usize,
    /// kg
    pub ion_mass: f64,
    /// ω₀ in rad/s.
    pub secular_frequency: f64,
    /// Equilibrium coordinates along the trap axis in metres.
    pub positions: Vec<f64>,
    pub truncation: Truncation,
}

impl IonChainConfig {
    /// Equidistant chain of ⁴⁰Ca⁺ ions.
    pub fn equidistant(mode_count: usize, spacing: f64, secular_frequency: f64) -> Result<Self> {
        Self::equidistant_with_mass(mode_count, spacing, CA40_MASS, secular_frequency)
    }

    pub fn equidistant_with_mass(
        mode_count: usize,
        spacing: f64,
        ion_mass: f64,
        secular_frequency: f64,
    ) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::domain(format!("ion spacing must be positive, got {spacing}")));
        }
        let positions = (0..mode_count).map(|j| j as f64 * spacing).collect();
        Self::with_positions(positions, ion_mass, secular_frequency)
    }

    pub fn with_positions(positions: Vec<f64>, ion_mass: f64, secular_frequency: f64) -> Result<Self> {
        let config = IonChainConfig {
            mode_count: positions.len(),
            ion_mass,
            secular_frequency,
            positions,
            truncation: Truncation::None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Result<Self> {
        self.truncation = truncation;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode_count == 0 {
            return Err(Error::domain("a chain needs at least one mode"));
        }
        if self.positions.len() != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: self.positions.len(),
            });
        }
        if !(self.secular_frequency > 0.0) {
            return Err(Error::domain("secular frequency must be positive"));
        }
        if !(self.ion_mass > 0.0) {
            return Err(Error::domain("ion mass must be positive"));
        }
        if self.positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("ion positions must be strictly increasing"));
        }
        if let Truncation::Distance(0) = self.truncation {
            return Err(Error::domain("truncation distance must be at least 1"));
        }
        Ok(())
    }

    pub fn distance(&self, j: usize, k: usize) -> f64 {
        (self.positions[j] - self.positions[k]).abs()
    }
}

/// `κ = e² / (4π ε₀ d³ m ω₀)` in rad/s.
pub fn coupling_rate(spacing: f64, ion_mass: f64, secular_frequency: f64) -> Result<f64> {
    coupling_rate_with(&CODATA, spacing, ion_mass, secular_frequency)
}

pub fn coupling_rate_with(
    constants: &PhysicalConstants,
    spacing: f64,
    ion_mass: f64,
    secular_frequency: f64,
) -> Result<f64> {
    if !(spacing > 0.0 && ion_mass > 0.0 && secular_frequency > 0.0) {
        return Err(Error::domain(format!(
            "coupling rate needs positive arguments (d = {spacing}, m = {ion_mass}, ω₀ = {secular_frequency})"
        )));
    }
    Ok(constants.coulomb_constant() / (spacing.powi(3) * ion_mass * secular_frequency))
}

/// Spacing at which two ions hop at rate `kappa`; inverse of [`coupling_rate`].
pub fn spacing_for_rate(kappa: f64, ion_mass: f64, secular_frequency: f64) -> Result<f64> {
    if !(kappa > 0.0 && ion_mass > 0.0 && secular_frequency > 0.0) {
        return Err(Error::domain("spacing inversion needs positive arguments"));
    }
    Ok((CODATA.coulomb_constant() / (kappa * ion_mass * secular_frequency)).cbrt())
}

/// Symmetric matrix of hopping rates `κ_{j,k}` (rad/s) with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    modes: usize,
    kappa: Vec<f64>,
}

impl CouplingMatrix {
    pub fn zeros(modes: usize) -> Self {
        CouplingMatrix {
            modes,
            kappa: vec![0.0; modes * modes],
        }
    }

    /// Builds a matrix from a closure giving `κ_{j,k}` for `j > k`.
    pub fn from_fn(modes: usize, mut rate: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(modes);
        for j in 0..modes {
            for k in 0..j {
                m.set(j, k, rate(j, k));
            }
        }
        m
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.kappa[j * self.modes + k]
    }

    fn set(&mut self, j: usize, k: usize, value: f64) {
        self.kappa[j * self.modes + k] = value;
        self.kappa[k * self.modes + j] = value;
    }

    /// Pairs `(j, k)` with `j > k`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.modes).flat_map(|j| (0..j).map(move |k| (j, k)))
    }

    /// Largest nearest-neighbour rate.
    pub fn nearest_neighbour(&self) -> f64 {
        (1..self.modes).map(|j| self.get(j, j - 1)).fold(0.0, f64::max)
    }
}

pub fn build_coupling_matrix(config: &IonChainConfig) -> Result<CouplingMatrix> {
    config.validate()?;
    let mut out = CouplingMatrix::zeros(config.mode_count);
    for j in 0..config.mode_count {
        for k in 0..j {
            if config.truncation.keeps(j, k) {
                let rate = coupling_rate(config.distance(j, k), config.ion_mass, config.secular_frequency)?;
                out.set(j, k, rate);
            }
        }
    }
    Ok(out)
}

/// Bare trap frequencies `ω̃_j` that make the Coulomb-shifted local frequency
/// equal to `ω₀` for every ion.
pub fn compute_bare_frequencies(config: &IonChainConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let coulomb = CODATA.coulomb_constant();
    Ok((0..config.mode_count)
        .map(|j| {
            let shift: f64 = (0..config.mode_count)
                .filter(|&k| k != j)
                .map(|k| coulomb / (config.distance(j, k).powi(3) * config.ion_mass))
                .sum();
            (config.secular_frequency.powi(2) + shift).sqrt()
        })
        .collect())
}

/// Duration of a 50:50 beam splitter between two modes hopping at `kappa`:
/// `(π/4) / (κ/2)`.
pub fn fifty_fifty_time(kappa: f64) -> f64 {
    PI / (2.0 * kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PI: f64 = 2.0 * PI;
    const OMEGA0: f64 = TWO_PI * 2.2e6;

    #[test]
    fn coupling_rate_reference_spacings() {
        let near = coupling_rate(27.6e-6, CA40_MASS, OMEGA0).unwrap() / TWO_PI;
        assert!((near - 1.9e3).abs() / 1.9e3 < 0.01, "{near}");
        // 43.8 µm is 4^(1/3) × 27.6 µm, so the rate is a quarter: 475.9 Hz.
        let far = coupling_rate(43.8e-6, CA40_MASS, OMEGA0).unwrap() / TWO_PI;
        assert!((far - 475.936).abs() < 0.01, "{far}");
    }

    #[test]
    fn coupling_rate_cubic_law() {
        let a = coupling_rate(10e-6, CA40_MASS, OMEGA0).unwrap();
        let b = coupling_rate(20e-6, CA40_MASS, OMEGA0).unwrap();
        assert!((b / a - 0.125).abs() < 1e-15);
    }

    #[test]
    fn coupling_rate_rejects_nonpositive() {
        assert!(coupling_rate(0.0, CA40_MASS, OMEGA0).is_err());
        assert!(coupling_rate(1e-6, -1.0, OMEGA0).is_err());
        assert!(coupling_rate(1e-6, CA40_MASS, 0.0).is_err());
    }

    #[test]
    fn spacing_inversion() {
        let k = coupling_rate(31.0e-6, CA40_MASS, OMEGA0).unwrap();
        let d = spacing_for_rate(k, CA40_MASS, OMEGA0).unwrap();
        assert!((d - 31.0e-6).abs() < 1e-18);
    }

    #[test]
    fn three_mode_matrix_and_truncation() {
        let chain = IonChainConfig::equidistant(3, 43.8e-6, OMEGA0).unwrap();
        let full = build_coupling_matrix(&chain).unwrap();
        assert!((full.get(2, 0) - full.get(1, 0) / 8.0).abs() < 1e-12 * full.get(1, 0));
        assert_eq!(full.get(0, 2), full.get(2, 0));
        assert_eq!(full.get(1, 1), 0.0);

        let cut = build_coupling_matrix(&chain.clone().with_truncation(Truncation::Distance(1)).unwrap()).unwrap();
        assert_eq!(cut.get(2, 0), 0.0);
        assert_eq!(cut.get(1, 0), full.get(1, 0));

        let wide = build_coupling_matrix(&chain.with_truncation(Truncation::Distance(3)).unwrap()).unwrap();
        assert_eq!(wide, full);
    }

    #[test]
    fn two_mode_reference_rate() {
        let chain = IonChainConfig::equidistant(2, 27.6e-6, OMEGA0).unwrap();
        let m = build_coupling_matrix(&chain).unwrap();
        assert!((m.get(1, 0) / TWO_PI - 1.9e3).abs() < 19.0);
    }

    #[test]
    fn config_validation() {
        assert!(IonChainConfig::with_positions(vec![0.0, 0.0], CA40_MASS, OMEGA0).is_err());
        assert!(IonChainConfig::with_positions(vec![], CA40_MASS, OMEGA0).is_err());
        assert!(IonChainConfig::equidistant(2, 1e-6, -1.0).is_err());
        let c = IonChainConfig::equidistant(2, 1e-6, OMEGA0).unwrap();
        assert!(c.with_truncation(Truncation::Distance(0)).is_err());
    }

    #[test]
    fn bare_frequencies() {
        let single = IonChainConfig::equidistant(1, 1e-6, OMEGA0).unwrap();
        assert_eq!(compute_bare_frequencies(&single).unwrap(), vec![OMEGA0]);

        let d = 27.6e-6;
        let pair = IonChainConfig::equidistant(2, d, OMEGA0).unwrap();
        let w = compute_bare_frequencies(&pair).unwrap();
        let expected = (OMEGA0 * OMEGA0 + CODATA.coulomb_constant() / (d.powi(3) * CA40_MASS)).sqrt();
        assert!((w[0] - expected).abs() < 1e-9 * expected);
        assert_eq!(w[0], w[1]);

        let triple = IonChainConfig::equidistant(3, d, OMEGA0).unwrap();
        let w = compute_bare_frequencies(&triple).unwrap();
        assert!(w[1] > w[0]);
        assert!((w[0] - w[2]).abs() < 1e-9 * w[0]);
    }

    #[test]
    fn non_equidistant_chain() {
        let chain = IonChainConfig::with_positions(vec![0.0, 10e-6, 30e-6], CA40_MASS, OMEGA0).unwrap();
        let m = build_coupling_matrix(&chain).unwrap();
        assert!((m.get(2, 1) / m.get(1, 0) - 0.125).abs() < 1e-12);
    }
}
