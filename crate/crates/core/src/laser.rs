//! From laser source parameters to the optical field at the tip apex.

use std::f64::consts::{LN_2, PI};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// GDD that stretches a 48 fs transform-limited Gaussian pulse to 65 fs.
pub const DEFAULT_GDD: f64 = 7.587_862_762_344_18e-28;

/// Temporal pulse shape; sets the peak-power form factor P = s·E/τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemporalShape {
    #[default]
    Gaussian,
    FlatTop,
}

impl TemporalShape {
    pub fn form_factor(self) -> f64 {
        match self {
            TemporalShape::Gaussian => 0.94,
            TemporalShape::FlatTop => 1.0,
        }
    }
}

/// Which spatial normalisation converts peak power to intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpatialConvention {
    /// On-axis peak of a Gaussian beam, 2P/(πw₀²).
    #[default]
    PeakOnAxis,
    /// Power spread evenly over the 1/e² disc, P/(πw₀²).
    SpotAverage,
}

impl SpatialConvention {
    fn factor(self) -> f64 {
        match self {
            SpatialConvention::PeakOnAxis => 2.0,
            SpatialConvention::SpotAverage => 1.0,
        }
    }

    pub fn describe(self, shape: TemporalShape) -> String {
        let spatial = match self {
            SpatialConvention::PeakOnAxis => "I0 = 2*P_peak/(pi*w0^2)",
            SpatialConvention::SpotAverage => "I0 = P_peak/(pi*w0^2)",
        };
        format!(
            "{spatial}; P_peak = {}*E_pulse/tau_fwhm; E = sqrt(2*I0/(eps0*c))",
            shape.form_factor()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserSpec {
    /// Centre wavelength (m).
    pub wavelength: f64,
    /// Average power (W).
    pub avg_power: f64,
    /// Repetition rate (Hz).
    pub rep_rate: f64,
    /// Transform-limited intensity FWHM before the focusing optics (s).
    pub pulse_fwhm: f64,
    /// 1/e² intensity radius at the focus (m).
    pub spot_radius: f64,
    /// Group-delay dispersion of the focusing optics (s²).
    pub gdd: f64,
    pub temporal_shape: TemporalShape,
    pub spatial_convention: SpatialConvention,
    /// Lightning-rod field enhancement at the apex.
    pub enhancement: f64,
    /// Polarisation angle relative to the tip axis (rad).
    pub theta: f64,
}

impl Default for LaserSpec {
    /// 810 nm, 260 mW, 1 GHz, 48 fs stretched to 65 fs, 3 µm spot, β = 1.
    fn default() -> Self {
        Self {
            wavelength: 810e-9,
            avg_power: 0.26,
            rep_rate: 1e9,
            pulse_fwhm: 48e-15,
            spot_radius: 3e-6,
            gdd: DEFAULT_GDD,
            temporal_shape: TemporalShape::Gaussian,
            spatial_convention: SpatialConvention::PeakOnAxis,
            enhancement: 1.0,
            theta: 0.0,
        }
    }
}

impl LaserSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("avg_power", self.avg_power),
            ("rep_rate", self.rep_rate),
            ("pulse_fwhm", self.pulse_fwhm),
            ("spot_radius", self.spot_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("laser {name} must be positive, got {v}")));
            }
        }
        if !self.gdd.is_finite() {
            return Err(Error::domain("laser gdd must be finite"));
        }
        if !(self.enhancement.is_finite() && self.enhancement >= 1.0) {
            return Err(Error::domain(format!(
                "enhancement must be ≥ 1, got {}",
                self.enhancement
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::domain("laser theta must be finite"));
        }
        Ok(())
    }

    /// Pulse duration at the focus.
    pub fn focus_duration(&self) -> f64 {
        stretched_duration(self.pulse_fwhm, self.gdd)
    }

    pub fn convention(&self) -> String {
        self.spatial_convention.describe(self.temporal_shape)
    }
}

/// E_pulse = P_avg / f_rep.
pub fn pulse_energy(spec: &LaserSpec) -> f64 {
    spec.avg_power / spec.rep_rate
}

/// FWHM of a transform-limited Gaussian pulse after a quadratic spectral
/// phase `gdd`.
pub fn stretched_duration(tau_in: f64, gdd: f64) -> f64 {
    let x = 4.0 * LN_2 * gdd / (tau_in * tau_in);
    tau_in * (1.0 + x * x).sqrt()
}

/// GDD (≥ 0) that stretches `tau_in` to `tau_out`; inverse of
/// [`stretched_duration`].
pub fn gdd_for_stretch(tau_in: f64, tau_out: f64) -> Result<f64> {
    if !(tau_in > 0.0 && tau_out >= tau_in) {
        return Err(Error::domain(format!(
            "need 0 < tau_in ≤ tau_out, got {tau_in} and {tau_out}"
        )));
    }
    Ok(((tau_out / tau_in).powi(2) - 1.0).sqrt() * tau_in * tau_in / (4.0 * LN_2))
}

/// Peak intensity at the focus (W/m²) under the configured convention.
pub fn peak_intensity(spec: &LaserSpec) -> f64 {
    let p_peak = spec.temporal_shape.form_factor() * pulse_energy(spec) / spec.focus_duration();
    spec.spatial_convention.factor() * p_peak / (PI * spec.spot_radius * spec.spot_radius)
}

/// Peak field of a plane wave with intensity `i`, √(2i/(ε₀c)).
pub fn field_from_intensity(i: f64) -> f64 {
    let k = PhysicalConstants::default();
    (2.0 * i / (k.eps0 * k.c)).sqrt()
}

/// Free-space peak field at the focus.
pub fn free_space_field(spec: &LaserSpec) -> f64 {
    field_from_intensity(peak_intensity(spec))
}

/// β times the free-space peak field.
pub fn enhanced_tip_field(spec: &LaserSpec) -> f64 {
    spec.enhancement * free_space_field(spec)
}

/// Enhancement that turns the free-space field of `spec` into `f_fitted`.
pub fn infer_enhancement(f_fitted: f64, spec: &LaserSpec) -> Result<f64> {
    let free = free_space_field(spec);
    if !(free > 0.0 && free.is_finite()) {
        return Err(Error::domain(format!("free-space field must be positive, got {free}")));
    }
    Ok(f_fitted / free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn focus(power: f64) -> LaserSpec {
        LaserSpec {
            avg_power: power,
            pulse_fwhm: 65e-15,
            gdd: 0.0,
            ..LaserSpec::default()
        }
    }

    #[test]
    fn pulse_energy_examples() {
        assert_relative_eq!(pulse_energy(&focus(0.26)), 0.26e-9, max_relative = 1e-14);
        assert_relative_eq!(pulse_energy(&focus(0.6)), 0.6e-9, max_relative = 1e-14);
        let doubled = LaserSpec {
            rep_rate: 2e9,
            ..focus(0.6)
        };
        assert_relative_eq!(pulse_energy(&doubled), 0.3e-9, max_relative = 1e-14);
    }

    #[test]
    fn stretching() {
        assert_eq!(stretched_duration(48e-15, 0.0), 48e-15);
        assert!((stretched_duration(48e-15, DEFAULT_GDD) - 65e-15).abs() < 1e-21);
        assert_eq!(
            stretched_duration(48e-15, DEFAULT_GDD),
            stretched_duration(48e-15, -DEFAULT_GDD)
        );
        assert_relative_eq!(
            gdd_for_stretch(48e-15, 65e-15).unwrap(),
            DEFAULT_GDD,
            max_relative = 1e-12
        );
        assert!(gdd_for_stretch(65e-15, 48e-15).is_err());
        assert_relative_eq!(LaserSpec::default().focus_duration(), 65e-15, max_relative = 1e-10);
    }

    #[test]
    fn peak_intensity_examples() {
        // golden.py: 2.65965593789123e14 W/m² at 260 mW
        let i = peak_intensity(&focus(0.26));
        assert_relative_eq!(i, 2.65965593789123e14, max_relative = 1e-10);
        let wide = LaserSpec {
            spot_radius: 6e-6,
            ..focus(0.26)
        };
        assert_relative_eq!(peak_intensity(&wide), i / 4.0, max_relative = 1e-14);
        let flat = LaserSpec {
            temporal_shape: TemporalShape::FlatTop,
            ..focus(0.26)
        };
        assert_relative_eq!(i / peak_intensity(&flat), 0.94, max_relative = 1e-14);
        let avg = LaserSpec {
            spatial_convention: SpatialConvention::SpotAverage,
            ..focus(0.26)
        };
        assert_relative_eq!(peak_intensity(&avg), i / 2.0, max_relative = 1e-14);
        assert_relative_eq!(peak_intensity(&focus(0.52)), 2.0 * i, max_relative = 1e-14);
    }

    #[test]
    fn field_examples() {
        assert_eq!(field_from_intensity(0.0), 0.0);
        assert_relative_eq!(field_from_intensity(3e14), 4.75434736004977e8, max_relative = 1e-10);
        assert_relative_eq!(
            field_from_intensity(12e14),
            2.0 * field_from_intensity(3e14),
            max_relative = 1e-14
        );
    }

    #[test]
    fn enhancement_round_trip() {
        let spec = LaserSpec {
            enhancement: 3.7,
            ..LaserSpec::default()
        };
        assert_eq!(
            enhanced_tip_field(&LaserSpec::default()),
            free_space_field(&LaserSpec::default())
        );
        let beta = infer_enhancement(enhanced_tip_field(&spec), &spec).unwrap();
        assert!((beta - 3.7).abs() / 3.7 < 1e-12);
        let free = free_space_field(&spec);
        assert_relative_eq!(infer_enhancement(free, &spec).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn full_power_with_expected_enhancement_exceeds_gv_per_m() {
        let spec = LaserSpec {
            avg_power: 0.6,
            enhancement: 5.0,
            ..LaserSpec::default()
        };
        assert!(enhanced_tip_field(&spec) > 1e9);
    }

    #[test]
    fn validation() {
        assert!(LaserSpec::default().validate().is_ok());
        assert!(LaserSpec {
            enhancement: 0.5,
            ..LaserSpec::default()
        }
        .validate()
        .is_err());
        assert!(LaserSpec {
            rep_rate: 0.0,
            ..LaserSpec::default()
        }
        .validate()
        .is_err());
    }
}
