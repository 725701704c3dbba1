//! The registered fit models, each with an analytic gradient.

use crate::emission::{polarization_projection, FowlerNordheim, TipSpec};

use super::lm::Model;

/// DC Fowler-Nordheim current I(U) = 2πR²·j(|U|/(k·r), Φ_W).
/// Parameters: `r` (apex radius, m), `R` (emitting radius, m).
#[derive(Debug, Clone)]
pub struct DcFnModel {
    pub fn_model: FowlerNordheim,
    pub work_function: f64,
    pub field_factor: f64,
}

impl Model for DcFnModel {
    fn id(&self) -> &'static str {
        "dc-fn"
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["r", "R"]
    }

    fn eval(&self, u: f64, p: &[f64]) -> f64 {
        let f = u.abs() / (self.field_factor * p[0]);
        match self.fn_model.current_density(f, self.work_function) {
            Ok(j) => 2.0 * std::f64::consts::PI * p[1] * p[1] * j,
            Err(_) => f64::NAN,
        }
    }

    fn gradient(&self, u: f64, p: &[f64], out: &mut [f64]) {
        let i = self.eval(u, p);
        let f = u.abs() / (self.field_factor * p[0]);
        let slope = self
            .fn_model
            .log_density_slope(f, self.work_function)
            .unwrap_or(f64::NAN);
        out[0] = -i * slope * f / p[0];
        out[1] = 2.0 * i / p[1];
    }
}

/// Photofield current with the tip geometry fixed and the laser field free:
/// I(U) = 2πR²·j(|U|/(k·r) + F_laser, Φ_eff). Parameter: `f_laser` (V/m).
#[derive(Debug, Clone)]
pub struct PhotofieldModel {
    pub fn_model: FowlerNordheim,
    pub tip: TipSpec,
    pub phi_eff: f64,
}

impl PhotofieldModel {
    fn field(&self, u: f64, f_laser: f64) -> f64 {
        u.abs() / (self.tip.field_factor * self.tip.radius) + f_laser
    }
}

impl Model for PhotofieldModel {
    fn id(&self) -> &'static str {
        "photofield"
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["f_laser"]
    }

    fn eval(&self, u: f64, p: &[f64]) -> f64 {
        match self.fn_model.current_density(self.field(u, p[0]), self.phi_eff) {
            Ok(j) => crate::emission::emitted_current(j, &self.tip),
            Err(_) => f64::NAN,
        }
    }

    fn gradient(&self, u: f64, p: &[f64], out: &mut [f64]) {
        let slope = self
            .fn_model
            .log_density_slope(self.field(u, p[0]), self.phi_eff)
            .unwrap_or(f64::NAN);
        out[0] = self.eval(u, p) * slope;
    }
}

/// A·cos²(θ − θ₀) + B. Parameters: `amplitude`, `background`, `theta0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cos2BackgroundModel;

impl Model for Cos2BackgroundModel {
    fn id(&self) -> &'static str {
        "cos2-background"
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["amplitude", "background", "theta0"]
    }

    fn eval(&self, theta: f64, p: &[f64]) -> f64 {
        p[0] * (theta - p[2]).cos().powi(2) + p[1]
    }

    fn gradient(&self, theta: f64, p: &[f64], out: &mut [f64]) {
        let d = theta - p[2];
        out[0] = d.cos().powi(2);
        out[1] = 1.0;
        out[2] = p[0] * (2.0 * d).sin();
    }
}

/// Optical field emission at the cycle-peak field,
/// g·F²·exp(−h/F) with F = f_dc + f_laser·|cos θ|.
/// Parameters: `g`, `h` (V/m), `f_laser` (V/m).
#[derive(Debug, Clone, Copy)]
pub struct OfePolarizationModel {
    pub f_dc: f64,
}

impl Model for OfePolarizationModel {
    fn id(&self) -> &'static str {
        "ofe-polarization"
    }

    fn param_names(&self) -> &'static [&'static str] {
        &["g", "h", "f_laser"]
    }

    fn eval(&self, theta: f64, p: &[f64]) -> f64 {
        let f = self.f_dc + p[2] * polarization_projection(theta).abs();
        if f <= 0.0 {
            0.0
        } else {
            p[0] * f * f * (-p[1] / f).exp()
        }
    }

    fn gradient(&self, theta: f64, p: &[f64], out: &mut [f64]) {
        let c = polarization_projection(theta).abs();
        let f = self.f_dc + p[2] * c;
        if f <= 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let base = f * f * (-p[1] / f).exp();
        let y = p[0] * base;
        out[0] = base;
        out[1] = -y / f;
        out[2] = y * (2.0 / f + p[1] / (f * f)) * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos2_structure() {
        let m = Cos2BackgroundModel;
        let p = [1.0, 0.2, 0.0];
        assert_eq!(m.eval(0.0, &p), 1.2);
        assert!((m.eval(std::f64::consts::FRAC_PI_2, &p) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn ofe_perpendicular_is_dc_value() {
        let m = OfePolarizationModel { f_dc: 1e9 };
        let p = [1e-13, 2e10, 5e8];
        let y = m.eval(std::f64::consts::FRAC_PI_2, &p);
        assert_eq!(y, 1e-13 * 1e9 * 1e9 * (-2e10f64 / 1e9).exp());
    }
}
