//! Physical constants (CODATA 2018 exact/recommended values) and the
//! Fowler-Nordheim coefficients derived from them.

use std::f64::consts::PI;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Electron rest mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// The set of constants every model is evaluated with.
///
/// Defaults to CODATA; individual values can be overridden from a run
/// configuration, in which case all derived coefficients follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub e: f64,
    pub h: f64,
    pub m_e: f64,
    pub eps0: f64,
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        e: ELEMENTARY_CHARGE,
        h: PLANCK,
        m_e: ELECTRON_MASS,
        eps0: VACUUM_PERMITTIVITY,
        c: SPEED_OF_LIGHT,
    };

    /// First Fowler-Nordheim constant e³/(8πh) with the work function in eV,
    /// in A·eV/V².
    pub fn fn_prefactor(&self) -> f64 {
        self.e * self.e / (8.0 * PI * self.h)
    }

    /// Second Fowler-Nordheim constant 8π√(2m)/(3he) with the work function
    /// in eV, in V·m⁻¹·eV^(−3/2).
    pub fn fn_exponent(&self) -> f64 {
        8.0 * PI * (2.0 * self.m_e).sqrt() * self.e.sqrt() / (3.0 * self.h)
    }

    /// Schottky lowering per √(V/m), in eV: ΔΦ = coefficient · √F.
    pub fn schottky_coefficient(&self) -> f64 {
        (self.e / (4.0 * PI * self.eps0)).sqrt()
    }

    /// Photon energy in eV at vacuum wavelength `lambda` (m).
    pub fn photon_energy_ev(&self, lambda: f64) -> f64 {
        self.h * self.c / (lambda * self.e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_digits(a: f64, b: f64) -> bool {
        ((a - b) / b).abs() < 5e-5
    }

    #[test]
    fn derived_fn_constants_match_reference() {
        let k = PhysicalConstants::default();
        assert!(four_digits(k.fn_prefactor(), 1.5414e-6), "{}", k.fn_prefactor());
        assert!(four_digits(k.fn_exponent(), 6.8309e9), "{}", k.fn_exponent());
    }

    #[test]
    fn schottky_coefficient_hand_value() {
        let k = PhysicalConstants::default();
        assert!((k.schottky_coefficient() - 3.7946864795956e-5).abs() < 1e-15);
    }

    #[test]
    fn photon_energy_810nm() {
        let k = PhysicalConstants::default();
        assert!((k.photon_energy_ev(810e-9) - 1.53066911645926).abs() < 1e-12);
    }
}
