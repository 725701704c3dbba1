//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error estimate falls below `max(abs_tol, rel_tol·|I|)` or the subdivision
//! cap is reached. The error estimate of a panel is |K15 − G7|, which is
//! pessimistic for smooth integrands.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on the number of panels.
    pub max_subdivisions: usize,
    /// Number of equal panels the range is split into before adapting.
    pub initial_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_subdivisions: 2000,
            initial_intervals: 8,
        }
    }
}

impl QuadratureConfig {
    /// The same tolerances with twice the starting resolution.
    pub fn refined(&self) -> Self {
        Self {
            initial_intervals: self.initial_intervals * 2,
            max_subdivisions: self.max_subdivisions * 2,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::Numerical`] when the tolerance is not met within
/// `max_subdivisions` panels or the integrand produces a non-finite value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, config: &QuadratureConfig) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            intervals: 0,
            evaluations: 0,
        });
    }
    let n0 = config.initial_intervals.max(1);
    let step = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let lo = a + step * i as f64;
            let hi = if i + 1 == n0 { b } else { lo + step };
            kronrod_panel(&f, lo, hi)
        })
        .collect();
    let mut evaluations = 15 * n0;

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite integrand on [{a}, {b}] after {evaluations} evaluations"
            )));
        }
        if error <= config.abs_tol.max(config.rel_tol * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                intervals: panels.len(),
                evaluations,
            });
        }
        if panels.len() >= config.max_subdivisions.max(n0) {
            return Err(Error::numerical(format!(
                "quadrature on [{a}, {b}] did not reach rel_tol {:e}: estimate {value:e}, error {error:e}, {} panels, {evaluations} evaluations",
                config.rel_tol,
                panels.len()
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(kronrod_panel(&f, p.a, mid));
        panels.push(kronrod_panel(&f, mid, p.b));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn periodic_exponential() {
        // ∫₀^{2π} e^{cos x} dx = 2π I₀(1)
        let i0_1 = 1.266_065_877_752_008_4;
        let r = integrate(|x| x.cos().exp(), 0.0, 2.0 * PI, &QuadratureConfig::default()).unwrap();
        assert!((r.value - 2.0 * PI * i0_1).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let c = QuadratureConfig::default();
        let fwd = integrate(|x| x.sin(), 0.0, 1.0, &c).unwrap().value;
        let rev = integrate(|x| x.sin(), 1.0, 0.0, &c).unwrap().value;
        assert!((fwd + rev).abs() < 1e-15);
    }

    #[test]
    fn cap_reports_non_convergence() {
        let c = QuadratureConfig {
            rel_tol: 1e-15,
            max_subdivisions: 4,
            initial_intervals: 1,
            ..Default::default()
        };
        let err = integrate(|x| x.abs().sqrt(), -1.0, 1.0, &c).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let err = integrate(|_| f64::NAN, 0.0, 1.0, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }
}
