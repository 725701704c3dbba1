//! Tunnelling emission from a biased tip.
//!
//! Fowler-Nordheim DC emission, single-photon photofield emission (FN with the
//! work function lowered by the photon energy) and optical field emission
//! where the laser field adds to the DC field.
//!
//! Units: fields in V/m, work functions in eV, current densities in A/m²,
//! lengths in m, currents in A.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// Field-conversion factor k in F = U/(k·r) for a paraboloidal tip.
pub const DEFAULT_FIELD_FACTOR: f64 = 5.7;

/// Emitter geometry and material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipSpec {
    /// Apex radius of curvature r (m).
    pub radius: f64,
    /// Field-conversion factor k.
    pub field_factor: f64,
    /// Radius R of the emitting area in I = 2πR²j (m).
    pub emit_radius: f64,
    /// Work function (eV).
    pub work_function: f64,
}

impl TipSpec {
    pub fn new(radius: f64, field_factor: f64, emit_radius: f64, work_function: f64) -> Result<Self> {
        let tip = Self {
            radius,
            field_factor,
            emit_radius,
            work_function,
        };
        tip.validate()?;
        Ok(tip)
    }

    /// Tip with the default k and an emitting area of radius R = r.
    pub fn with_radius(radius: f64, work_function: f64) -> Result<Self> {
        Self::new(radius, DEFAULT_FIELD_FACTOR, radius, work_function)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("radius", self.radius),
            ("field_factor", self.field_factor),
            ("emit_radius", self.emit_radius),
            ("work_function", self.work_function),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!(
                    "tip {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Instantaneous field configuration for optical field emission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldState {
    pub f_dc: f64,
    pub f_laser_peak: f64,
    /// Angle between tip axis and laser polarisation, wrapped into [0, 2π).
    pub theta: f64,
}

impl FieldState {
    pub fn new(f_dc: f64, f_laser_peak: f64, theta: f64) -> Result<Self> {
        if !(f_dc.is_finite() && f_dc >= 0.0) {
            return Err(Error::domain(format!("f_dc must be ≥ 0, got {f_dc}")));
        }
        if !(f_laser_peak.is_finite() && f_laser_peak >= 0.0) {
            return Err(Error::domain(format!("f_laser_peak must be ≥ 0, got {f_laser_peak}")));
        }
        if !theta.is_finite() {
            return Err(Error::domain("theta must be finite"));
        }
        Ok(Self {
            f_dc,
            f_laser_peak,
            theta: theta.rem_euclid(2.0 * PI),
        })
    }

    /// Local field at optical phase `phase`.
    pub fn field_at(&self, phase: f64) -> f64 {
        self.f_dc + self.f_laser_peak * polarization_projection(self.theta) * phase.cos()
    }

    /// Highest field reached over a cycle, f_dc + f_laser·|cos θ|.
    pub fn peak_field(&self) -> f64 {
        self.f_dc + self.f_laser_peak * polarization_projection(self.theta).abs()
    }
}

/// Image-charge correction functions evaluated at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NordheimParams {
    pub w: f64,
    pub v_of_w: f64,
    pub t2_of_w: f64,
}

impl NordheimParams {
    /// Whether v lies in the (0.4, 0.8) band and t² in [0.9, 1.1].
    pub fn in_operating_band(&self) -> bool {
        self.v_of_w > 0.4 && self.v_of_w < 0.8 && (0.9..=1.1).contains(&self.t2_of_w)
    }
}

/// Barrier-shape correction v(w) and its companion t(w).
pub trait BarrierCorrection: Debug + Send + Sync {
    fn v(&self, w: f64) -> f64;
    fn dv_dw(&self, w: f64) -> f64;
    fn d2v_dw2(&self, w: f64) -> f64;

    /// t(w) = v(w) − (2w/3)·v'(w).
    fn t(&self, w: f64) -> f64 {
        self.v(w) - 2.0 * w / 3.0 * self.dv_dw(w)
    }

    fn dt_dw(&self, w: f64) -> f64 {
        self.dv_dw(w) / 3.0 - 2.0 * w / 3.0 * self.d2v_dw2(w)
    }
}

/// v(w) = 1 − w² + (w²/3)·ln w, the usual closed-form fit to the exact
/// elliptic-integral image-charge correction.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogApproximation;

impl BarrierCorrection for LogApproximation {
    fn v(&self, w: f64) -> f64 {
        if w <= 0.0 {
            1.0
        } else {
            1.0 - w * w + w * w / 3.0 * w.ln()
        }
    }

    fn dv_dw(&self, w: f64) -> f64 {
        if w <= 0.0 {
            0.0
        } else {
            w * (-5.0 / 3.0 + 2.0 / 3.0 * w.ln())
        }
    }

    fn d2v_dw2(&self, w: f64) -> f64 {
        -1.0 + 2.0 / 3.0 * w.ln()
    }

    fn t(&self, w: f64) -> f64 {
        if w <= 0.0 {
            1.0
        } else {
            1.0 + w * w / 9.0 - w * w / 9.0 * w.ln()
        }
    }

    fn dt_dw(&self, w: f64) -> f64 {
        if w <= 0.0 {
            0.0
        } else {
            w / 9.0 - 2.0 * w / 9.0 * w.ln()
        }
    }
}

/// How the t²(w) prefactor correction is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrefactorCorrection {
    /// t² ≡ 1.
    #[default]
    Unity,
    /// t² from the barrier correction's t(w).
    FromBarrier,
}

/// Fowler-Nordheim evaluator: constants plus the choice of barrier and
/// prefactor corrections.
#[derive(Debug, Clone)]
pub struct FowlerNordheim {
    constants: PhysicalConstants,
    barrier: Arc<dyn BarrierCorrection>,
    prefactor: PrefactorCorrection,
}

impl Default for FowlerNordheim {
    fn default() -> Self {
        Self::new(PhysicalConstants::default())
    }
}

impl FowlerNordheim {
    pub fn new(constants: PhysicalConstants) -> Self {
        Self {
            constants,
            barrier: Arc::new(LogApproximation),
            prefactor: PrefactorCorrection::Unity,
        }
    }

    pub fn with_barrier(mut self, barrier: Arc<dyn BarrierCorrection>) -> Self {
        self.barrier = barrier;
        self
    }

    pub fn with_prefactor(mut self, prefactor: PrefactorCorrection) -> Self {
        self.prefactor = prefactor;
        self
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// w = ΔΦ_Schottky/Φ.
    pub fn schottky_ratio(&self, f: f64, phi: f64) -> Result<f64> {
        check_phi(phi)?;
        if !(f.is_finite() && f >= 0.0) {
            return Err(Error::domain(format!("field must be ≥ 0, got {f}")));
        }
        Ok(self.constants.schottky_coefficient() * f.sqrt() / phi)
    }

    /// v(w) on [0, 1].
    pub fn nordheim_v(&self, w: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain(format!("Schottky ratio must lie in [0, 1], got {w}")));
        }
        Ok(self.barrier.v(w).clamp(0.0, 1.0))
    }

    // Beyond w = 1 the barrier top is below the Fermi level: v is held at 0
    // and t at t(1).
    fn v_sat(&self, w: f64) -> (f64, f64) {
        if w >= 1.0 {
            (0.0, 0.0)
        } else {
            (self.barrier.v(w).max(0.0), self.barrier.dv_dw(w))
        }
    }

    fn t2_sat(&self, w: f64) -> (f64, f64) {
        match self.prefactor {
            PrefactorCorrection::Unity => (1.0, 0.0),
            PrefactorCorrection::FromBarrier => {
                if w >= 1.0 {
                    let t = self.barrier.t(1.0);
                    (t * t, 0.0)
                } else {
                    let t = self.barrier.t(w);
                    (t * t, 2.0 * t * self.barrier.dt_dw(w))
                }
            }
        }
    }

    pub fn nordheim_params(&self, f: f64, phi: f64) -> Result<NordheimParams> {
        let w = self.schottky_ratio(f, phi)?;
        Ok(NordheimParams {
            w,
            v_of_w: self.v_sat(w).0,
            t2_of_w: self.t2_sat(w).0,
        })
    }

    /// Fowler-Nordheim current density j(F, Φ) in A/m². Zero for F ≤ 0.
    pub fn current_density(&self, f: f64, phi: f64) -> Result<f64> {
        check_phi(phi)?;
        if f.is_nan() {
            return Err(Error::domain("field is NaN"));
        }
        if f <= 0.0 {
            return Ok(0.0);
        }
        let w = self.schottky_ratio(f, phi)?;
        let (v, _) = self.v_sat(w);
        let (t2, _) = self.t2_sat(w);
        let a = self.constants.fn_prefactor();
        let b = self.constants.fn_exponent();
        Ok(a * f * f / (phi * t2) * (-b * phi.powf(1.5) * v / f).exp())
    }

    /// d(ln j)/dF, used by the analytic model Jacobians.
    pub fn log_density_slope(&self, f: f64, phi: f64) -> Result<f64> {
        check_phi(phi)?;
        if f.is_nan() || f <= 0.0 {
            return Err(Error::domain(format!("log slope needs a positive field, got {f}")));
        }
        let w = self.schottky_ratio(f, phi)?;
        let dw_df = w / (2.0 * f);
        let (v, dv) = self.v_sat(w);
        let (t2, dt2) = self.t2_sat(w);
        let bphi = self.constants.fn_exponent() * phi.powf(1.5);
        Ok(2.0 / f - dt2 / t2 * dw_df + bphi * v / (f * f) - bphi * dv * dw_df / f)
    }

    /// Density for a DC bias `u` on `tip`.
    pub fn dc_current(&self, u: f64, tip: &TipSpec) -> Result<f64> {
        let j = self.current_density(tip_field_from_voltage(u, tip), tip.work_function)?;
        Ok(emitted_current(j, tip))
    }

    /// Φ_W − hν in eV.
    pub fn photofield_phi_eff(&self, phi_w: f64, lambda: f64) -> Result<f64> {
        check_phi(phi_w)?;
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::domain(format!("wavelength must be positive, got {lambda}")));
        }
        let phi = phi_w - self.constants.photon_energy_ev(lambda);
        if phi <= 0.0 {
            return Err(Error::domain(format!(
                "photon energy exceeds work function {phi_w} eV at λ = {lambda} m"
            )));
        }
        Ok(phi)
    }

    /// Photofield current: FN at the lowered work function with the laser
    /// field added to the DC field.
    pub fn photofield_current(&self, u: f64, tip: &TipSpec, f_laser: f64, lambda: f64) -> Result<f64> {
        if !(f_laser.is_finite() && f_laser >= 0.0) {
            return Err(Error::domain(format!("f_laser must be ≥ 0, got {f_laser}")));
        }
        let phi = self.photofield_phi_eff(tip.work_function, lambda)?;
        let j = self.current_density(tip_field_from_voltage(u, tip) + f_laser, phi)?;
        Ok(emitted_current(j, tip))
    }

    /// FN density at optical phase `phase`; the field is clamped at zero so
    /// there is no reverse emission.
    pub fn ofe_instantaneous_density(&self, fs: &FieldState, phi: f64, phase: f64) -> Result<f64> {
        self.current_density(fs.field_at(phase).max(0.0), phi)
    }

    /// Density averaged over one optical cycle and, for pulsed envelopes,
    /// over the intensity-weighted pulse.
    pub fn ofe_cycle_averaged_density(
        &self,
        fs: &FieldState,
        phi: f64,
        envelope: Envelope,
        quad: &QuadratureConfig,
    ) -> Result<f64> {
        check_phi(phi)?;
        envelope.validate()?;
        if fs.f_laser_peak == 0.0 || polarization_projection(fs.theta) == 0.0 {
            return self.current_density(fs.f_dc, phi);
        }
        let cycle = |amp: f64| -> Result<f64> {
            let scaled = FieldState {
                f_laser_peak: fs.f_laser_peak * amp,
                ..*fs
            };
            // the integrand is even in phase
            let r = integrate(
                |p| self.ofe_instantaneous_density(&scaled, phi, p).unwrap_or(f64::NAN),
                0.0,
                PI,
                quad,
            )?;
            Ok(r.value / PI)
        };
        match envelope {
            Envelope::Cw | Envelope::FlatTop { .. } => cycle(1.0),
            Envelope::Gaussian { fwhm } => {
                let span = 4.0 * fwhm;
                let weight = |t: f64| envelope.field_amplitude(t).powi(2);
                let norm = integrate(weight, 0.0, span, quad)?.value;
                let failure = std::cell::RefCell::new(None);
                let num = integrate(
                    |t| match cycle(envelope.field_amplitude(t)) {
                        Ok(v) => weight(t) * v,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            f64::NAN
                        }
                    },
                    0.0,
                    span,
                    quad,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                Ok(num?.value / norm)
            }
        }
    }
}

/// Temporal shape of the laser field for envelope averaging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// Constant amplitude at the peak field.
    Cw,
    /// Gaussian pulse with intensity FWHM `fwhm` (s).
    Gaussian { fwhm: f64 },
    /// Rectangular pulse of length `duration` (s).
    FlatTop { duration: f64 },
}

impl Envelope {
    fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Cw => Ok(()),
            Envelope::Gaussian { fwhm: d } | Envelope::FlatTop { duration: d } => {
                if d.is_finite() && d > 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("pulse duration must be positive, got {d}")))
                }
            }
        }
    }

    /// Field amplitude relative to its peak at time `t` from the pulse centre.
    pub fn field_amplitude(&self, t: f64) -> f64 {
        match *self {
            Envelope::Cw => 1.0,
            Envelope::Gaussian { fwhm } => (-2.0 * std::f64::consts::LN_2 * t * t / (fwhm * fwhm)).exp(),
            Envelope::FlatTop { duration } => {
                if t.abs() <= 0.5 * duration {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// cos θ, with the rounding residue at odd multiples of π/2 set to zero.
pub fn polarization_projection(theta: f64) -> f64 {
    let c = theta.cos();
    if c.abs() < 1e-15 {
        0.0
    } else {
        c
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if phi.is_finite() && phi > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("work function must be positive, got {phi}")))
    }
}

/// Apex field |u|/(k·r).
pub fn tip_field_from_voltage(u: f64, tip: &TipSpec) -> f64 {
    u.abs() / (tip.field_factor * tip.radius)
}

/// I = 2πR²·j.
pub fn emitted_current(j: f64, tip: &TipSpec) -> f64 {
    2.0 * PI * tip.emit_radius * tip.emit_radius * j
}

/// g·F²·exp(−h/F) at the cycle-peak field F = f_dc + f_laser·|cos θ|; 0 when
/// F vanishes.
pub fn ofe_peak_field_model(fs: &FieldState, g: f64, h: f64) -> f64 {
    let f = fs.peak_field();
    if f <= 0.0 {
        0.0
    } else {
        g * f * f * (-h / f).exp()
    }
}

pub fn schottky_ratio(f: f64, phi: f64) -> Result<f64> {
    FowlerNordheim::default().schottky_ratio(f, phi)
}

pub fn nordheim_v(w: f64) -> Result<f64> {
    FowlerNordheim::default().nordheim_v(w)
}

pub fn fn_current_density(f: f64, phi: f64) -> Result<f64> {
    FowlerNordheim::default().current_density(f, phi)
}

pub fn photofield_phi_eff(phi_w: f64, lambda: f64) -> Result<f64> {
    FowlerNordheim::default().photofield_phi_eff(phi_w, lambda)
}

pub fn photofield_current(u: f64, tip: &TipSpec, f_laser: f64, lambda: f64) -> Result<f64> {
    FowlerNordheim::default().photofield_current(u, tip, f_laser, lambda)
}

pub fn ofe_instantaneous_density(fs: &FieldState, phi: f64, phase: f64) -> Result<f64> {
    FowlerNordheim::default().ofe_instantaneous_density(fs, phi, phase)
}

pub fn ofe_cycle_averaged_density(
    fs: &FieldState,
    phi: f64,
    envelope: Envelope,
    quad: &QuadratureConfig,
) -> Result<f64> {
    FowlerNordheim::default().ofe_cycle_averaged_density(fs, phi, envelope, quad)
}
