//! Seeded synthetic sweeps from the registered forward models.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{RunConfig, SweepRange};
use crate::emission::{FieldState, TipSpec};
use crate::error::{Error, Result};
use crate::fitting::{
    Cos2BackgroundModel, DcFnModel, Model, OfePolarizationModel, PhotofieldModel, SweepDataset, SweepKind,
};

/// Forward models that can generate synthetic data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthModel {
    /// Laser-off I–V; truth `[r, R]`.
    Dc,
    /// Laser-on I–V; truth `[f_laser]`.
    Photofield,
    /// Low-power polarisation scan; truth `[amplitude, background, theta0]`.
    Cos2,
    /// High-power polarisation scan; truth `[g, h, f_laser]`.
    Ofe,
}

impl SynthModel {
    pub const ALL: [SynthModel; 4] = [
        SynthModel::Dc,
        SynthModel::Photofield,
        SynthModel::Cos2,
        SynthModel::Ofe,
    ];

    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "dc" => Ok(SynthModel::Dc),
            "photofield" => Ok(SynthModel::Photofield),
            "cos2" => Ok(SynthModel::Cos2),
            "ofe" => Ok(SynthModel::Ofe),
            _ => Err(Error::usage(format!(
                "unknown model `{id}` (expected dc, photofield, cos2 or ofe)"
            ))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            SynthModel::Dc => "dc",
            SynthModel::Photofield => "photofield",
            SynthModel::Cos2 => "cos2",
            SynthModel::Ofe => "ofe",
        }
    }

    pub fn kind(self) -> SweepKind {
        match self {
            SynthModel::Dc | SynthModel::Photofield => SweepKind::Iv,
            SynthModel::Cos2 | SynthModel::Ofe => SweepKind::Polarization,
        }
    }

    /// Truth parameters taken from the configuration.
    pub fn default_truth(self, config: &RunConfig) -> Vec<f64> {
        match self {
            SynthModel::Dc => vec![config.tip.radius, config.tip.emit_radius],
            SynthModel::Photofield => vec![config.photofield_f_laser],
            SynthModel::Cos2 => vec![config.cos2.amplitude, config.cos2.background, config.cos2.theta0],
            SynthModel::Ofe => vec![config.ofe.g, config.ofe.h, config.ofe.f_laser],
        }
    }

    fn n_params(self) -> usize {
        match self {
            SynthModel::Photofield => 1,
            SynthModel::Dc => 2,
            SynthModel::Cos2 | SynthModel::Ofe => 3,
        }
    }
}

/// The fit model matching `model`, configured like the generator.
pub fn fit_model(config: &RunConfig, model: SynthModel) -> Result<Box<dyn Model>> {
    let fnm = config.fn_model();
    Ok(match model {
        SynthModel::Dc => Box::new(DcFnModel {
            work_function: config.tip.work_function,
            field_factor: config.tip.field_factor,
            fn_model: fnm,
        }),
        SynthModel::Photofield => {
            let phi_eff = fnm.photofield_phi_eff(config.tip.work_function, config.laser.wavelength)?;
            Box::new(PhotofieldModel {
                fn_model: fnm,
                tip: config.tip,
                phi_eff,
            })
        }
        SynthModel::Cos2 => Box::new(Cos2BackgroundModel),
        SynthModel::Ofe => Box::new(OfePolarizationModel { f_dc: config.ofe.f_dc }),
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn voltages(range: SweepRange, n: usize) -> Vec<f64> {
    let mut u = linspace(range.u_min, range.u_max, n);
    // Pin the end point so the sweep ends exactly at u_max.
    u[n - 1] = range.u_max;
    u
}

/// Noiseless forward model on the configured abscissae.
pub fn forward_model(config: &RunConfig, model: SynthModel, truth: &[f64]) -> Result<SweepDataset> {
    if truth.len() != model.n_params() {
        return Err(Error::usage(format!(
            "model `{}` takes {} parameters, got {}",
            model.id(),
            model.n_params(),
            truth.len()
        )));
    }
    let fnm = config.fn_model();
    let (x, y): (Vec<f64>, Vec<f64>) = match model {
        SynthModel::Dc => {
            let tip = TipSpec::new(truth[0], config.tip.field_factor, truth[1], config.tip.work_function)?;
            let x = voltages(config.dc_sweep, config.sweep_points);
            let y = x.iter().map(|&u| fnm.dc_current(u, &tip)).collect::<Result<_>>()?;
            (x, y)
        }
        SynthModel::Photofield => {
            let x = voltages(config.photofield_sweep, config.sweep_points);
            let y = x
                .iter()
                .map(|&u| fnm.photofield_current(u, &config.tip, truth[0], config.laser.wavelength))
                .collect::<Result<_>>()?;
            (x, y)
        }
        SynthModel::Cos2 => {
            let x = linspace(0.0, PI, config.pol_points);
            let y = x.iter().map(|&t| Cos2BackgroundModel.eval(t, truth)).collect();
            (x, y)
        }
        SynthModel::Ofe => {
            FieldState::new(config.ofe.f_dc, truth[2], 0.0)?;
            let m = OfePolarizationModel { f_dc: config.ofe.f_dc };
            let x = linspace(0.0, PI, config.pol_points);
            let y = x.iter().map(|&t| m.eval(t, truth)).collect();
            (x, y)
        }
    };
    if let Some(i) = y.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::domain(format!(
            "model `{}` gives {} at x = {}",
            model.id(),
            y[i],
            x[i]
        )));
    }
    SweepDataset::new(x, y, None, model.kind())
}

/// Forward model times (1 + noise·N(0,1)), drawn from a ChaCha8 stream
/// seeded with `seed`. With noise > 0 each point carries σ = noise·|y_model|.
/// Negative draws are clipped to zero.
pub fn synthesize_dataset(
    config: &RunConfig,
    model: &str,
    truth: Option<&[f64]>,
    noise: f64,
    seed: u64,
) -> Result<SweepDataset> {
    let model = SynthModel::parse(model)?;
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::usage(format!("noise must be ≥ 0, got {noise}")));
    }
    let default_truth;
    let truth = match truth {
        Some(t) => t,
        None => {
            default_truth = model.default_truth(config);
            &default_truth
        }
    };
    let clean = forward_model(config, model, truth)?;
    if noise == 0.0 {
        return Ok(clean);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = clean
        .y
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (v * (1.0 + noise * z)).max(0.0)
        })
        .collect();
    let sigma: Vec<f64> = clean
        .y
        .iter()
        .map(|&v| (noise * v.abs()).max(f64::MIN_POSITIVE))
        .collect();
    SweepDataset::new(clean.x, y, Some(sigma), model.kind())
}
