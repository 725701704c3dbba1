//! Source-quality figures derived from electrons per pulse.
//!
//! SI throughout; [`to_ka_per_cm2`] and friends are for presentation only.

use std::f64::consts::PI;

use crate::constants::ELEMENTARY_CHARGE;
use crate::error::{Error, Result};

/// Default half-angle of the emission cone used for brightness (rad).
pub const DEFAULT_HALF_ANGLE: f64 = 1e-3;

/// Instantaneous current n·e/τ for electrons emitted uniformly over τ.
pub fn instantaneous_current(n: f64, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("emission duration must be positive, got {tau}")));
    }
    if !(n.is_finite() && n >= 0.0) {
        return Err(Error::domain(format!("electron count must be ≥ 0, got {n}")));
    }
    Ok(n * ELEMENTARY_CHARGE / tau)
}

/// Electrons per second during the pulse, n/τ.
pub fn emission_rate(n: f64, tau: f64) -> Result<f64> {
    Ok(instantaneous_current(n, tau)? / ELEMENTARY_CHARGE)
}

pub fn current_density(i: f64, area: f64) -> Result<f64> {
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::domain(format!("area must be positive, got {area}")));
    }
    Ok(i / area)
}

/// Current per unit area per unit solid angle, A/(m²·sr).
pub fn brightness(i: f64, area: f64, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("solid angle must be positive, got {omega}")));
    }
    Ok(current_density(i, area)? / omega)
}

/// Solid angle of a cone with half-angle `alpha`.
pub fn cone_solid_angle(alpha: f64) -> f64 {
    2.0 * PI * (1.0 - alpha.cos())
}

pub fn to_ka_per_cm2(j: f64) -> f64 {
    j * 1e-7
}

pub fn from_ka_per_cm2(j: f64) -> f64 {
    j * 1e7
}

/// All per-pulse metrics for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseMetrics {
    pub n_electrons: f64,
    pub tau: f64,
    pub area: f64,
    pub solid_angle: f64,
    pub i_inst: f64,
    pub j_inst: f64,
    pub brightness: f64,
}

impl PulseMetrics {
    /// Solid angle is explicit: the brightness figure depends entirely on it.
    pub fn compute(n_electrons: f64, tau: f64, area: f64, solid_angle: f64) -> Result<Self> {
        let i_inst = instantaneous_current(n_electrons, tau)?;
        Ok(Self {
            n_electrons,
            tau,
            area,
            solid_angle,
            i_inst,
            j_inst: current_density(i_inst, area)?,
            brightness: brightness(i_inst, area, solid_angle)?,
        })
    }

    pub fn emission_rate(&self) -> f64 {
        self.n_electrons / self.tau
    }
}
