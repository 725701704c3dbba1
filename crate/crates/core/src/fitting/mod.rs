//! Least-squares fits of the emission models to measured sweeps.
//!
//! Four fits are provided: the DC Fowler-Nordheim sweep (tip radius), the
//! photofield sweep (laser field at the apex), the low-power polarisation
//! scan (cos² on a flat background) and the high-power polarisation scan
//! (optical field emission at the cycle-peak field).

mod dataset;
mod lm;
mod models;

use std::f64::consts::{FRAC_PI_2, PI};

pub use dataset::{fit_line, LineFit, SweepDataset, SweepKind};
pub use lm::{central_difference, least_squares, Bounds, FitResult, LmConfig, Model, ResidualMode};
pub use models::{Cos2BackgroundModel, DcFnModel, OfePolarizationModel, PhotofieldModel};

use crate::emission::{polarization_projection, FowlerNordheim, TipSpec};
use crate::error::{Error, Result};

/// |corr(g, h)| above which the OFE fit flags the pair as degenerate.
pub const GH_CORRELATION_FLAG: f64 = 0.999;

/// Emission model and optimiser settings shared by all fits.
#[derive(Debug, Clone, Default)]
pub struct FitSettings {
    pub fn_model: FowlerNordheim,
    pub lm: LmConfig,
}

fn require_kind(data: &SweepDataset, kind: SweepKind) -> Result<()> {
    if data.kind != kind {
        return Err(Error::data(format!("expected a {kind:?} dataset, got {:?}", data.kind)));
    }
    Ok(())
}

/// Fits apex radius `r` and emitting radius `R` to a laser-off I–V sweep.
///
/// The starting radius comes from the FN-plot slope, which equals
/// −B·Φ^{3/2}·k·r·(1 − w²/6) for the default barrier correction.
pub fn fit_dc_fn(data: &SweepDataset, phi_w: f64, k: f64, settings: &FitSettings) -> Result<FitResult> {
    require_kind(data, SweepKind::Iv)?;
    if !(phi_w > 0.0 && k > 0.0) {
        return Err(Error::domain("work function and field factor must be positive"));
    }
    let line = fit_line(&data.fn_linearize()?)?;
    if line.slope >= 0.0 {
        return Err(Error::data("FN plot has a non-negative slope; not field emission"));
    }
    let consts = settings.fn_model.constants();
    let bphi = consts.fn_exponent() * phi_w.powf(1.5);
    let u_mid = {
        let mut u: Vec<f64> = data.x.iter().map(|v| v.abs()).collect();
        u.sort_by(f64::total_cmp);
        u[u.len() / 2]
    };
    let mut r0 = -line.slope / (bphi * k);
    for _ in 0..50 {
        let w = consts.schottky_coefficient() * (u_mid / (k * r0)).sqrt() / phi_w;
        let s = (1.0 - w * w / 6.0).max(0.3);
        r0 = -line.slope / (bphi * k * s);
    }
    let model = DcFnModel {
        fn_model: settings.fn_model.clone(),
        work_function: phi_w,
        field_factor: k,
    };
    let log_offsets: Vec<f64> = data
        .x
        .iter()
        .zip(&data.y)
        .filter_map(|(&u, &y)| {
            let unit = model.eval(u, &[r0, 1.0]);
            (unit > 0.0 && y > 0.0).then(|| (y / unit).ln())
        })
        .collect();
    if log_offsets.is_empty() {
        return Err(Error::numerical("model current underflows at the initial radius"));
    }
    let r_emit0 = (log_offsets.iter().sum::<f64>() / log_offsets.len() as f64 / 2.0).exp();
    let bounds = Bounds::new(vec![r0 * 1e-3, r_emit0 * 1e-6], vec![r0 * 1e3, r_emit0 * 1e6]);
    least_squares(&model, data, &[r0, r_emit0], Some(&bounds), &settings.lm)
}

/// One abscissa of the photofield fit with the ±25 % laser-field band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub u: f64,
    pub lower: f64,
    pub best: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotofieldFit {
    pub result: FitResult,
    /// Model curves at 0.75, 1 and 1.25 times the fitted laser field.
    pub band: Vec<BandPoint>,
}

impl PhotofieldFit {
    pub fn f_laser(&self) -> f64 {
        self.result.params[0]
    }
}

/// Upper limit on the fitted laser field (V/m).
const MAX_LASER_FIELD: f64 = 5e10;

/// Fits the apex laser field to a laser-on I–V sweep, holding the tip
/// geometry (`r`, `k`, `R`) fixed at the DC-fit values.
pub fn fit_photofield(
    data: &SweepDataset,
    tip: &TipSpec,
    phi_eff: f64,
    settings: &FitSettings,
) -> Result<PhotofieldFit> {
    require_kind(data, SweepKind::Iv)?;
    tip.validate()?;
    if phi_eff.is_nan() || phi_eff <= 0.0 {
        return Err(Error::domain(format!(
            "effective work function must be positive, got {phi_eff}"
        )));
    }
    let model = PhotofieldModel {
        fn_model: settings.fn_model.clone(),
        tip: *tip,
        phi_eff,
    };
    if let Some(i) = data.y.iter().position(|&y| y <= 0.0) {
        return Err(Error::data(format!(
            "sample {i}: photofield fit needs positive currents"
        )));
    }
    let data_level = data.y.iter().map(|y| y.ln()).sum::<f64>() / data.len() as f64;
    let mismatch = |f: f64| {
        data.x
            .iter()
            .map(|&u| model.eval(u, &[f]).max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            / data.len() as f64
            - data_level
    };
    let init = if mismatch(0.0) >= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, MAX_LASER_FIELD);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mismatch(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let bounds = Bounds::new(vec![0.0], vec![MAX_LASER_FIELD]);
    let result = least_squares(&model, data, &[init], Some(&bounds), &settings.lm)?;
    let f = result.params[0];
    let band = data
        .x
        .iter()
        .map(|&u| BandPoint {
            u,
            lower: model.eval(u, &[0.75 * f]),
            best: model.eval(u, &[f]),
            upper: model.eval(u, &[1.25 * f]),
        })
        .collect();
    Ok(PhotofieldFit { result, band })
}

/// Fitted laser field when the assumed apex radius is scaled by each factor
/// in `scales` (sensitivity diagnostic).
pub fn photofield_radius_sensitivity(
    data: &SweepDataset,
    tip: &TipSpec,
    phi_eff: f64,
    scales: &[f64],
    settings: &FitSettings,
) -> Result<Vec<(f64, f64)>> {
    scales
        .iter()
        .map(|&s| {
            let scaled = TipSpec {
                radius: tip.radius * s,
                ..*tip
            };
            Ok((s, fit_photofield(data, &scaled, phi_eff, settings)?.f_laser()))
        })
        .collect()
}

/// Maps an angle into (−π/2, π/2], the fundamental domain of cos².
pub fn wrap_half_turn(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t > FRAC_PI_2 {
        t - PI
    } else {
        t
    }
}

fn require_half_turn(data: &SweepDataset) -> Result<()> {
    let (lo, hi) = data
        .x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if data.len() < 4 || hi - lo < PI * (1.0 - 1e-9) - PI / data.len() as f64 {
        return Err(Error::data("polarisation scan must span at least π"));
    }
    Ok(())
}

/// Fits A·cos²(θ − θ₀) + B with A, B ≥ 0 and θ₀ in (−π/2, π/2].
pub fn fit_cos2_background(data: &SweepDataset, settings: &FitSettings) -> Result<FitResult> {
    require_kind(data, SweepKind::Polarization)?;
    require_half_turn(data)?;
    let (imax, ymax) = data.y.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &y)| if y > acc.1 { (i, y) } else { acc },
    );
    let ymin = data.y.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = data.y.iter().sum::<f64>() / data.len() as f64;
    let amp = (ymax - ymin).max(1e-3 * mean).max(f64::MIN_POSITIVE);
    let init = [amp, ymin, wrap_half_turn(data.x[imax])];
    let bounds = Bounds::new(
        vec![0.0, 0.0, f64::NEG_INFINITY],
        vec![f64::INFINITY, f64::INFINITY, f64::INFINITY],
    );
    let mut fit = least_squares(&Cos2BackgroundModel, data, &init, Some(&bounds), &settings.lm)?;
    fit.params[2] = wrap_half_turn(fit.params[2]);
    Ok(fit)
}

/// Fits g, h and the laser field of the cycle-peak optical field emission
/// model to a polarisation scan at known DC field `f_dc`.
///
/// Starting values: for each laser field on a log grid, g and h follow from
/// the points nearest θ = 0 and θ = π/2 via ln(y/F²) = ln g − h/F; the grid
/// value with the smallest log-space misfit seeds the optimiser.
pub fn fit_ofe_polarization(data: &SweepDataset, f_dc: f64, settings: &FitSettings) -> Result<FitResult> {
    require_kind(data, SweepKind::Polarization)?;
    require_half_turn(data)?;
    if !(f_dc.is_finite() && f_dc > 0.0) {
        return Err(Error::domain(format!("DC field must be positive, got {f_dc}")));
    }
    let proj: Vec<f64> = data.x.iter().map(|&t| polarization_projection(t).abs()).collect();
    let positive: Vec<usize> = (0..data.len()).filter(|&i| data.y[i] > 0.0).collect();
    let pick = |better: fn(f64, f64) -> bool| {
        positive
            .iter()
            .copied()
            .reduce(|a, b| if better(proj[b], proj[a]) { b } else { a })
    };
    let (Some(par), Some(perp)) = (pick(|a, b| a > b), pick(|a, b| a < b)) else {
        return Err(Error::data("OFE fit needs positive currents"));
    };
    if proj[par] - proj[perp] < 0.1 {
        return Err(Error::data(
            "scan does not resolve parallel and perpendicular polarisation",
        ));
    }
    let model = OfePolarizationModel { f_dc };
    let mut best: Option<(f64, [f64; 3])> = None;
    for step in 0..=120 {
        let f_l = f_dc * 10f64.powf(-2.0 + 3.5 * step as f64 / 120.0);
        let (f0, f1) = (f_dc + f_l * proj[par], f_dc + f_l * proj[perp]);
        let (l0, l1) = ((data.y[par] / (f0 * f0)).ln(), (data.y[perp] / (f1 * f1)).ln());
        let h = (l0 - l1) / (1.0 / f1 - 1.0 / f0);
        if !(h > 0.0 && h.is_finite()) {
            continue;
        }
        let g = (l0 + h / f0).exp();
        if !(g > 0.0 && g.is_finite()) {
            continue;
        }
        let p = [g, h, f_l];
        let misfit: f64 = positive
            .iter()
            .map(|&i| {
                let m = model.eval(data.x[i], &p);
                if m > 0.0 {
                    (data.y[i].ln() - m.ln()).powi(2)
                } else {
                    f64::INFINITY
                }
            })
            .sum();
        if best.is_none_or(|(b, _)| misfit < b) {
            best = Some((misfit, p));
        }
    }
    let Some((_, init)) = best else {
        return Err(Error::numerical("no admissible starting point for the OFE fit"));
    };
    let bounds = Bounds::new(vec![0.0; 3], vec![f64::INFINITY; 3]);
    let mut fit = least_squares(&model, data, &init, Some(&bounds), &settings.lm)?;
    let corr = fit.correlation(0, 1);
    if corr.abs() > GH_CORRELATION_FLAG {
        fit.diagnostics.push(format!(
            "strong g–h correlation {corr:.6}; individual values are poorly constrained"
        ));
    }
    Ok(fit)
}
