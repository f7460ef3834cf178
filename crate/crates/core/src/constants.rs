//! CODATA 2018 values of the constants entering the Coulomb coupling.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// C
    pub elementary_charge: f64,
    /// F/m
    pub vacuum_permittivity: f64,
    /// kg
    pub atomic_mass_unit: f64,
    /// J·s
    pub hbar: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    elementary_charge: 1.602_176_634e-19,
    vacuum_permittivity: 8.854_187_812_8e-12,
    atomic_mass_unit: 1.660_539_066_60e-27,
    hbar: 1.054_571_817e-34,
};

pub const ELEMENTARY_CHARGE: f64 = CODATA.elementary_charge;
pub const HBAR: f64 = CODATA.hbar;
pub const ATOMIC_MASS_UNIT: f64 = CODATA.atomic_mass_unit;

/// Mass of the ⁴⁰Ca⁺ ion used throughout the scenarios, taken as 40 u.
pub const CA40_MASS: f64 = 40.0 * ATOMIC_MASS_UNIT;

impl PhysicalConstants {
    /// `e² / (4π ε₀)` in J·m.
    pub fn coulomb_constant(&self) -> f64 {
        self.elementary_charge * self.elementary_charge / (4.0 * std::f64::consts::PI * self.vacuum_permittivity)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive() {
        let c = PhysicalConstants::default();
        assert!(c.elementary_charge > 0.0);
        assert!(c.vacuum_permittivity > 0.0);
        assert!(c.atomic_mass_unit > 0.0);
        assert!(c.hbar > 0.0);
        assert!((c.coulomb_constant() - 2.307_077e-28).abs() < 1e-33);
    }
}
