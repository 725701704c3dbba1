//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored, and a trailing
//! `# comment` after a value is stripped. Values are SI unless the key says
//! otherwise. Unknown keys and repeated keys are rejected. See
//! [`RunConfig::documented_keys`] for the full list with defaults.

use std::path::{Path, PathBuf};

use crate::constants::PhysicalConstants;
use crate::emission::{FowlerNordheim, PrefactorCorrection, TipSpec, DEFAULT_FIELD_FACTOR};
use crate::error::{Error, Result};
use crate::fitting::{FitSettings, LmConfig};
use crate::laser::{LaserSpec, SpatialConvention, TemporalShape};
use crate::metrics::DEFAULT_HALF_ANGLE;
use crate::pulse::Window;
use crate::quadrature::QuadratureConfig;

/// Voltage sweep for synthetic I–V data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub u_min: f64,
    pub u_max: f64,
}

/// Ground truth for the low-power polarisation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cos2Truth {
    pub amplitude: f64,
    pub background: f64,
    pub theta0: f64,
}

/// Ground truth for the optical-field-emission polarisation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfeTruth {
    pub f_dc: f64,
    pub g: f64,
    pub h: f64,
    pub f_laser: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSettings {
    /// Mean electrons per pulse.
    pub mean: f64,
    pub rep_rate: f64,
    /// Record length (s).
    pub window: f64,
    /// Sampling interval of the binned current (s).
    pub bin: f64,
    pub taper: Window,
    /// Spectrum rows written on each side of the carrier.
    pub half_span_bins: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSettings {
    pub n_electrons: f64,
    pub tau: f64,
    /// Radius of the emitting disc (m).
    pub area_radius: f64,
    /// Half-angle of the emission cone (rad).
    pub half_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub tip: TipSpec,
    pub t_correction: bool,
    pub laser: LaserSpec,
    pub quadrature: QuadratureConfig,
    pub lm: LmConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub dc_sweep: SweepRange,
    pub photofield_sweep: SweepRange,
    pub photofield_f_laser: f64,
    pub sweep_points: usize,
    pub pol_points: usize,
    pub cos2: Cos2Truth,
    pub ofe: OfeTruth,
    pub pulse: PulseSettings,
    pub metrics: MetricsSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        let radius = 134e-9;
        Self {
            constants: PhysicalConstants::default(),
            tip: TipSpec {
                radius,
                field_factor: DEFAULT_FIELD_FACTOR,
                emit_radius: radius,
                work_function: 4.5,
            },
            t_correction: false,
            laser: LaserSpec::default(),
            quadrature: QuadratureConfig::default(),
            lm: LmConfig::default(),
            seed: 1,
            output_dir: PathBuf::from("out"),
            // One decade of DC current for the 134 nm tip.
            dc_sweep: SweepRange {
                u_min: 1405.87,
                u_max: 1500.0,
            },
            photofield_sweep: SweepRange {
                u_min: 600.0,
                u_max: 1500.0,
            },
            photofield_f_laser: 1.1e9,
            sweep_points: 25,
            pol_points: 37,
            cos2: Cos2Truth {
                amplitude: 1e-12,
                background: 0.25e-12,
                theta0: 0.0,
            },
            ofe: OfeTruth {
                f_dc: 1.5e9,
                g: 1e-22,
                h: 4.5e10,
                f_laser: 2.5e9,
            },
            pulse: PulseSettings {
                mean: 0.5,
                rep_rate: 1e6,
                window: 1.0,
                bin: 0.25e-6,
                taper: Window::Rectangular,
                half_span_bins: 50,
            },
            metrics: MetricsSettings {
                n_electrons: 200.0,
                tau: 65e-15,
                area_radius: 1e-6,
                half_angle: DEFAULT_HALF_ANGLE,
            },
        }
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(config_err(
            line,
            key,
            format!("expected a finite number, got `{value}`"),
        )),
    }
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| config_err(line, key, format!("expected a non-negative integer, got `{value}`")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(config_err(line, key, format!("expected true or false, got `{value}`"))),
    }
}

fn config_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    /// Every accepted key with its default value.
    pub fn documented_keys() -> Vec<(&'static str, String)> {
        let d = Self::default();
        let shape = |s: TemporalShape| match s {
            TemporalShape::Gaussian => "gaussian",
            TemporalShape::FlatTop => "flat-top",
        };
        let conv = |c: SpatialConvention| match c {
            SpatialConvention::PeakOnAxis => "peak-on-axis",
            SpatialConvention::SpotAverage => "spot-average",
        };
        let taper = |w: Window| match w {
            Window::Rectangular => "rectangular",
            Window::Hann => "hann",
        };
        vec![
            ("seed", d.seed.to_string()),
            ("output_dir", d.output_dir.display().to_string()),
            ("const.e", format!("{:e}", d.constants.e)),
            ("const.h", format!("{:e}", d.constants.h)),
            ("const.m_e", format!("{:e}", d.constants.m_e)),
            ("const.eps0", format!("{:e}", d.constants.eps0)),
            ("const.c", format!("{:e}", d.constants.c)),
            ("tip.radius", format!("{:e}", d.tip.radius)),
            ("tip.field_factor", format!("{}", d.tip.field_factor)),
            ("tip.emit_radius", "tip.radius".to_string()),
            ("tip.work_function", format!("{}", d.tip.work_function)),
            ("emission.t_correction", d.t_correction.to_string()),
            ("laser.wavelength", format!("{:e}", d.laser.wavelength)),
            ("laser.avg_power", format!("{}", d.laser.avg_power)),
            ("laser.rep_rate", format!("{:e}", d.laser.rep_rate)),
            ("laser.pulse_fwhm", format!("{:e}", d.laser.pulse_fwhm)),
            ("laser.spot_radius", format!("{:e}", d.laser.spot_radius)),
            ("laser.gdd", format!("{:e}", d.laser.gdd)),
            ("laser.temporal_shape", shape(d.laser.temporal_shape).to_string()),
            ("laser.spatial_convention", conv(d.laser.spatial_convention).to_string()),
            ("laser.enhancement", format!("{}", d.laser.enhancement)),
            ("laser.theta", format!("{}", d.laser.theta)),
            ("quad.rel_tol", format!("{:e}", d.quadrature.rel_tol)),
            ("quad.abs_tol", format!("{:e}", d.quadrature.abs_tol)),
            ("quad.max_subdivisions", d.quadrature.max_subdivisions.to_string()),
            ("quad.initial_intervals", d.quadrature.initial_intervals.to_string()),
            ("fit.max_iterations", d.lm.max_iterations.to_string()),
            ("fit.ftol", format!("{:e}", d.lm.ftol)),
            ("fit.gtol", format!("{:e}", d.lm.gtol)),
            ("fit.initial_damping", format!("{:e}", d.lm.initial_damping)),
            ("dc.u_min", format!("{}", d.dc_sweep.u_min)),
            ("dc.u_max", format!("{}", d.dc_sweep.u_max)),
            ("photofield.u_min", format!("{}", d.photofield_sweep.u_min)),
            ("photofield.u_max", format!("{}", d.photofield_sweep.u_max)),
            ("photofield.f_laser", format!("{:e}", d.photofield_f_laser)),
            ("sweep.points", d.sweep_points.to_string()),
            ("pol.points", d.pol_points.to_string()),
            ("cos2.amplitude", format!("{:e}", d.cos2.amplitude)),
            ("cos2.background", format!("{:e}", d.cos2.background)),
            ("cos2.theta0", format!("{}", d.cos2.theta0)),
            ("ofe.f_dc", format!("{:e}", d.ofe.f_dc)),
            ("ofe.g", format!("{:e}", d.ofe.g)),
            ("ofe.h", format!("{:e}", d.ofe.h)),
            ("ofe.f_laser", format!("{:e}", d.ofe.f_laser)),
            ("pulse.mean", format!("{}", d.pulse.mean)),
            ("pulse.rep_rate", format!("{:e}", d.pulse.rep_rate)),
            ("pulse.window", format!("{}", d.pulse.window)),
            ("pulse.bin", format!("{:e}", d.pulse.bin)),
            ("pulse.taper", taper(d.pulse.taper).to_string()),
            ("spectrum.half_span_bins", d.pulse.half_span_bins.to_string()),
            ("metrics.n_electrons", format!("{}", d.metrics.n_electrons)),
            ("metrics.tau", format!("{:e}", d.metrics.tau)),
            ("metrics.area_radius", format!("{:e}", d.metrics.area_radius)),
            ("metrics.half_angle", format!("{:e}", d.metrics.half_angle)),
        ]
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut emit_radius_set = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_err(line, content, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(config_err(line, key, "repeated key"));
            }
            seen.push(key);
            if key == "tip.emit_radius" {
                emit_radius_set = true;
            }
            cfg.set(line, key, value)?;
        }
        if !emit_radius_set {
            cfg.tip.emit_radius = cfg.tip.radius;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let num = || parse_f64(line, key, value);
        let count = || parse_usize(line, key, value);
        match key {
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| config_err(line, key, format!("expected an unsigned integer, got `{value}`")))?
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "const.e" => self.constants.e = num()?,
            "const.h" => self.constants.h = num()?,
            "const.m_e" => self.constants.m_e = num()?,
            "const.eps0" => self.constants.eps0 = num()?,
            "const.c" => self.constants.c = num()?,
            "tip.radius" => self.tip.radius = num()?,
            "tip.field_factor" => self.tip.field_factor = num()?,
            "tip.emit_radius" => self.tip.emit_radius = num()?,
            "tip.work_function" => self.tip.work_function = num()?,
            "emission.t_correction" => self.t_correction = parse_bool(line, key, value)?,
            "laser.wavelength" => self.laser.wavelength = num()?,
            "laser.avg_power" => self.laser.avg_power = num()?,
            "laser.rep_rate" => self.laser.rep_rate = num()?,
            "laser.pulse_fwhm" => self.laser.pulse_fwhm = num()?,
            "laser.spot_radius" => self.laser.spot_radius = num()?,
            "laser.gdd" => self.laser.gdd = num()?,
            "laser.temporal_shape" => {
                self.laser.temporal_shape = match value {
                    "gaussian" => TemporalShape::Gaussian,
                    "flat-top" => TemporalShape::FlatTop,
                    _ => return Err(config_err(line, key, "expected gaussian or flat-top")),
                }
            }
            "laser.spatial_convention" => {
                self.laser.spatial_convention = match value {
                    "peak-on-axis" => SpatialConvention::PeakOnAxis,
                    "spot-average" => SpatialConvention::SpotAverage,
                    _ => return Err(config_err(line, key, "expected peak-on-axis or spot-average")),
                }
            }
            "laser.enhancement" => self.laser.enhancement = num()?,
            "laser.theta" => self.laser.theta = num()?,
            "quad.rel_tol" => self.quadrature.rel_tol = num()?,
            "quad.abs_tol" => self.quadrature.abs_tol = num()?,
            "quad.max_subdivisions" => self.quadrature.max_subdivisions = count()?,
            "quad.initial_intervals" => self.quadrature.initial_intervals = count()?,
            "fit.max_iterations" => self.lm.max_iterations = count()?,
            "fit.ftol" => self.lm.ftol = num()?,
            "fit.gtol" => self.lm.gtol = num()?,
            "fit.initial_damping" => self.lm.initial_damping = num()?,
            "dc.u_min" => self.dc_sweep.u_min = num()?,
            "dc.u_max" => self.dc_sweep.u_max = num()?,
            "photofield.u_min" => self.photofield_sweep.u_min = num()?,
            "photofield.u_max" => self.photofield_sweep.u_max = num()?,
            "photofield.f_laser" => self.photofield_f_laser = num()?,
            "sweep.points" => self.sweep_points = count()?,
            "pol.points" => self.pol_points = count()?,
            "cos2.amplitude" => self.cos2.amplitude = num()?,
            "cos2.background" => self.cos2.background = num()?,
            "cos2.theta0" => self.cos2.theta0 = num()?,
            "ofe.f_dc" => self.ofe.f_dc = num()?,
            "ofe.g" => self.ofe.g = num()?,
            "ofe.h" => self.ofe.h = num()?,
            "ofe.f_laser" => self.ofe.f_laser = num()?,
            "pulse.mean" => self.pulse.mean = num()?,
            "pulse.rep_rate" => self.pulse.rep_rate = num()?,
            "pulse.window" => self.pulse.window = num()?,
            "pulse.bin" => self.pulse.bin = num()?,
            "pulse.taper" => {
                self.pulse.taper = match value {
                    "rectangular" => Window::Rectangular,
                    "hann" => Window::Hann,
                    _ => return Err(config_err(line, key, "expected rectangular or hann")),
                }
            }
            "spectrum.half_span_bins" => self.pulse.half_span_bins = count()?,
            "metrics.n_electrons" => self.metrics.n_electrons = num()?,
            "metrics.tau" => self.metrics.tau = num()?,
            "metrics.area_radius" => self.metrics.area_radius = num()?,
            "metrics.half_angle" => self.metrics.half_angle = num()?,
            _ => return Err(config_err(line, key, "unknown key")),
        }
        Ok(())
    }

    /// Cross-field checks that a single key cannot violate on its own.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("const.e", self.constants.e),
            ("const.h", self.constants.h),
            ("const.m_e", self.constants.m_e),
            ("const.eps0", self.constants.eps0),
            ("const.c", self.constants.c),
            ("quad.rel_tol", self.quadrature.rel_tol),
            ("fit.ftol", self.lm.ftol),
            ("fit.gtol", self.lm.gtol),
            ("fit.initial_damping", self.lm.initial_damping),
        ];
        for (key, v) in positive {
            if v <= 0.0 {
                return Err(Error::usage(format!("{key} must be positive, got {v}")));
            }
        }
        self.tip.validate().map_err(|e| Error::usage(e.to_string()))?;
        self.laser.validate().map_err(|e| Error::usage(e.to_string()))?;
        for (name, s) in [("dc", self.dc_sweep), ("photofield", self.photofield_sweep)] {
            if !(s.u_min > 0.0 && s.u_max > s.u_min) {
                return Err(Error::usage(format!("{name} sweep needs 0 < u_min < u_max")));
            }
        }
        if self.sweep_points < 3 || self.pol_points < 5 {
            return Err(Error::usage("sweep.points must be ≥ 3 and pol.points ≥ 5"));
        }
        if self.quadrature.initial_intervals == 0 || self.lm.max_iterations == 0 {
            return Err(Error::usage(
                "quad.initial_intervals and fit.max_iterations must be ≥ 1",
            ));
        }
        Ok(())
    }

    /// Emission model with this configuration's constants and prefactor.
    pub fn fn_model(&self) -> FowlerNordheim {
        let prefactor = if self.t_correction {
            PrefactorCorrection::FromBarrier
        } else {
            PrefactorCorrection::Unity
        };
        FowlerNordheim::new(self.constants).with_prefactor(prefactor)
    }

    pub fn fit_settings(&self) -> FitSettings {
        FitSettings {
            fn_model: self.fn_model(),
            lm: self.lm,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("# only a comment\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn documented_defaults_parse_back() {
        let text: String = RunConfig::documented_keys()
            .into_iter()
            .filter(|(k, _)| *k != "tip.emit_radius")
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(RunConfig::parse(&text).unwrap(), RunConfig::default());
    }

    #[test]
    fn overrides_and_emit_radius_follow() {
        let c = RunConfig::parse("tip.radius = 30e-9  # sharper tip\nseed = 7\n").unwrap();
        assert_eq!(c.tip.radius, 30e-9);
        assert_eq!(c.tip.emit_radius, 30e-9);
        assert_eq!(c.seed, 7);
        let c = RunConfig::parse("tip.radius = 30e-9\ntip.emit_radius = 10e-9\n").unwrap();
        assert_eq!(c.tip.emit_radius, 10e-9);
    }

    #[test]
    fn errors_name_line_and_key() {
        match RunConfig::parse("seed = 1\n\nbogus.key = 3\n") {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (3, "bogus.key")),
            other => panic!("{other:?}"),
        }
        match RunConfig::parse("tip.radius = fast\n") {
            Err(Error::Config { line, key, .. }) => assert_eq!((line, key.as_str()), (1, "tip.radius")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            RunConfig::parse("seed = 1\nseed = 2\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            RunConfig::parse("just words\n"),
            Err(Error::Config { line: 1, .. })
        ));
    }

    #[test]
    fn invalid_combinations_are_usage_errors() {
        assert!(matches!(RunConfig::parse("dc.u_min = 2000\n"), Err(Error::Usage(_))));
        assert!(matches!(
            RunConfig::parse("tip.work_function = -1\n"),
            Err(Error::Usage(_))
        ));
    }
}
