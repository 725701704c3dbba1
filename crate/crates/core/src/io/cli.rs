//! Command-line front end.
//!
//! Every subcommand computes all of its tables in memory first and only then
//! writes them, so a failing run leaves no partial files behind. Exit status:
//! 0 success, 1 usage or configuration error, 2 data or I/O error, 3
//! numerical failure (including a fit that did not converge).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::RunConfig;
use super::report::{checks_to_rows, criterion_summary, evaluate};
use super::synth::{fit_model, synthesize_dataset, SynthModel};
use super::table::{
    counts_to_string, ingest_sweep_csv, read_counts, rows_to_string, sweep_to_string, NumberFormat, ResultRow,
};
use crate::error::{Error, Result};
use crate::fitting::{
    fit_cos2_background, fit_dc_fn, fit_ofe_polarization, fit_photofield, FitResult, SweepDataset, SweepKind,
};
use crate::laser::{enhanced_tip_field, free_space_field, infer_enhancement, peak_intensity, pulse_energy};
use crate::metrics::{cone_solid_angle, to_ka_per_cm2, PulseMetrics};
use crate::pulse::{line_width, periodogram, sample_pulse_train, snr_at_carrier, PulseTrainRecord};

#[derive(Debug, Parser)]
#[command(
    name = "fieldemit",
    version,
    about = "Field-emission models, fits and pulse statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Args)]
struct Flags {
    /// Run configuration (`key = value` file).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Input CSV.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// RNG seed (overrides `seed`).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Model: dc or photofield for I–V, cos2 or ofe for polarisation.
    #[arg(long, global = true, value_name = "NAME")]
    model: Option<String>,
    /// Relative Gaussian noise for simulated data.
    #[arg(long, global = true, value_name = "REL")]
    noise: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthetic I–V sweep (dc or photofield).
    SimulateIv,
    /// Synthetic polarisation scan (cos2 or ofe).
    SimulatePolarization,
    /// Fit an I–V sweep from --input.
    FitIv,
    /// Fit a polarisation scan from --input.
    FitPolarization,
    /// Poisson electron counts for every pulse of a record.
    PulseTrain,
    /// Power spectrum of a pulse train (from --input counts or simulated).
    Spectrum,
    /// Instantaneous current, density, brightness and laser figures.
    Metrics,
    /// Evaluate every reference check and write a pass/fail table.
    PaperReport,
}

/// Tables and summary produced by one invocation, not yet on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output_dir: PathBuf,
    /// File name and contents.
    pub files: Vec<(String, String)>,
    pub summary: String,
}

impl Outcome {
    /// Writes every file, creating the output directory if needed.
    pub fn write(&self) -> Result<()> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        std::fs::create_dir_all(&self.output_dir).map_err(io_err(&self.output_dir))?;
        for (name, body) in &self.files {
            let path = self.output_dir.join(name);
            std::fs::write(&path, body).map_err(io_err(&path))?;
        }
        Ok(())
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Config { .. } => 1,
        Error::Data(_) | Error::Domain(_) | Error::Io { .. } => 2,
        Error::Numerical(_) => 3,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand,
/// printing the summary to `stdout` and errors to `stderr`.
pub fn cli_dispatch<S: AsRef<str>>(argv: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if informational { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return if informational { 0 } else { 1 };
        }
    };
    match execute(&cli).and_then(|o| o.write().map(|_| o)) {
        Ok(o) => {
            let _ = write!(stdout, "{}", o.summary);
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a command line without touching the filesystem beyond reading
/// inputs.
pub fn plan<S: AsRef<str>>(argv: &[S]) -> Result<Outcome> {
    let cli = Cli::try_parse_from(argv.iter().map(AsRef::as_ref)).map_err(|e| Error::usage(e.to_string()))?;
    execute(&cli)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let f = &cli.flags;
    let mut config = match &f.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = f.seed {
        config.seed = seed;
    }
    let output_dir = f.output.clone().unwrap_or_else(|| config.output_dir.clone());
    let (files, summary) = match cli.command {
        Command::SimulateIv => simulate(&config, f, SweepKind::Iv)?,
        Command::SimulatePolarization => simulate(&config, f, SweepKind::Polarization)?,
        Command::FitIv => fit(&config, f, SweepKind::Iv)?,
        Command::FitPolarization => fit(&config, f, SweepKind::Polarization)?,
        Command::PulseTrain => pulse_train(&config)?,
        Command::Spectrum => spectrum(&config, f)?,
        Command::Metrics => metrics(&config)?,
        Command::PaperReport => report(&config)?,
    };
    Ok(Outcome {
        output_dir,
        files,
        summary,
    })
}

type Tables = (Vec<(String, String)>, String);

fn pick_model(f: &Flags, kind: SweepKind) -> Result<SynthModel> {
    let default = match kind {
        SweepKind::Iv => "dc",
        SweepKind::Polarization => "cos2",
    };
    let m = SynthModel::parse(f.model.as_deref().unwrap_or(default))?;
    if m.kind() != kind {
        return Err(Error::usage(format!(
            "model `{}` does not produce {kind:?} data",
            m.id()
        )));
    }
    Ok(m)
}

fn file_stem(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::Iv => "iv",
        SweepKind::Polarization => "polarization",
    }
}

fn simulate(config: &RunConfig, f: &Flags, kind: SweepKind) -> Result<Tables> {
    let model = pick_model(f, kind)?;
    let noise = f.noise.unwrap_or(0.0);
    let data = synthesize_dataset(config, model.id(), None, noise, config.seed)?;
    let name = format!("{}_{}.csv", file_stem(kind), model.id());
    let mut files = vec![(name.clone(), sweep_to_string(&data)?)];
    if kind == SweepKind::Iv {
        let rows: Vec<ResultRow> = data
            .fn_linearize()?
            .into_iter()
            .map(|(x, y)| {
                ResultRow::new()
                    .num("inv_voltage_1/V", x)
                    .num("ln_current_over_u2_A/V2", y)
            })
            .collect();
        files.push((
            format!("iv_{}_fn_plot.csv", model.id()),
            rows_to_string(&rows, NumberFormat::Sig12)?,
        ));
    }
    let truth = model.default_truth(config);
    let summary = format!(
        "simulated {} points of `{}` (truth {:?}, noise {noise}, seed {}) -> {name}\n",
        data.len(),
        model.id(),
        truth,
        config.seed
    );
    Ok((files, summary))
}

fn unit(param: &str) -> &'static str {
    match param {
        "r" | "R" => "m",
        "f_laser" | "h" => "V/m",
        "amplitude" | "background" => "A",
        "theta0" => "rad",
        "g" => "A*m^2/V^2",
        _ => "",
    }
}

fn param_rows(fit: &FitResult) -> Vec<ResultRow> {
    fit.param_names
        .iter()
        .zip(&fit.params)
        .enumerate()
        .map(|(i, (name, &v))| {
            ResultRow::new()
                .text("param", name.clone())
                .num("value", v)
                .num("sigma", fit.covariance[i][i].max(0.0).sqrt())
                .text("unit", unit(name))
        })
        .collect()
}

fn fit_summary(fit: &FitResult) -> String {
    let mut s = format!("model {}\n", fit.model_id);
    for (i, (name, v)) in fit.param_names.iter().zip(&fit.params).enumerate() {
        let sigma = fit.covariance[i][i].max(0.0).sqrt();
        s += &format!("  {name} = {v:.6e} ± {sigma:.2e} {}\n", unit(name));
    }
    s += &format!(
        "  reduced chi2 {:.4e}, {} iterations, gradient norm {:.2e}\n",
        fit.chi2_reduced, fit.n_iterations, fit.gradient_norm
    );
    for d in &fit.diagnostics {
        s += &format!("  note: {d}\n");
    }
    s
}

fn require_converged(fit: &FitResult) -> Result<()> {
    if fit.converged {
        Ok(())
    } else {
        Err(Error::numerical(format!(
            "fit `{}` did not converge: {}",
            fit.model_id,
            fit.diagnostics.join("; ")
        )))
    }
}

fn curve_rows(config: &RunConfig, model: SynthModel, data: &SweepDataset, fit: &FitResult) -> Result<Vec<ResultRow>> {
    let m = fit_model(config, model)?;
    let x_key = match data.kind {
        SweepKind::Iv => "voltage_V",
        SweepKind::Polarization => "theta_rad",
    };
    Ok((0..data.len())
        .map(|i| {
            ResultRow::new()
                .num(x_key, data.x[i])
                .num("current_A", data.y[i])
                .num("model_A", m.eval(data.x[i], &fit.params))
        })
        .collect())
}

fn fit(config: &RunConfig, f: &Flags, kind: SweepKind) -> Result<Tables> {
    let model = pick_model(f, kind)?;
    let input = f.input.as_ref().ok_or_else(|| Error::usage("--input is required"))?;
    let data = ingest_sweep_csv(input, kind)?;
    let settings = config.fit_settings();
    let tip = &config.tip;
    let mut extra = String::new();
    let (fit, curve) = match model {
        SynthModel::Dc => {
            let fit = fit_dc_fn(&data, tip.work_function, tip.field_factor, &settings)?;
            require_converged(&fit)?;
            extra += &format!("  apex radius r = {:.4} nm\n", fit.params[0] * 1e9);
            let curve = curve_rows(config, model, &data, &fit)?;
            (fit, curve)
        }
        SynthModel::Photofield => {
            let phi_eff = settings
                .fn_model
                .photofield_phi_eff(tip.work_function, config.laser.wavelength)?;
            let pf = fit_photofield(&data, tip, phi_eff, &settings)?;
            require_converged(&pf.result)?;
            let beta = infer_enhancement(pf.f_laser(), &config.laser)?;
            extra += &format!(
                "  effective work function {phi_eff:.4} eV; laser field {:.4e} V/m; inferred enhancement {beta:.4} ({})\n",
                pf.f_laser(),
                config.laser.convention()
            );
            let curve = pf
                .band
                .iter()
                .zip(&data.y)
                .map(|(b, &y)| {
                    ResultRow::new()
                        .num("voltage_V", b.u)
                        .num("current_A", y)
                        .num("model_A", b.best)
                        .num("model_low_A", b.lower)
                        .num("model_high_A", b.upper)
                })
                .collect();
            (pf.result, curve)
        }
        SynthModel::Cos2 => {
            let fit = fit_cos2_background(&data, &settings)?;
            require_converged(&fit)?;
            let curve = curve_rows(config, model, &data, &fit)?;
            (fit, curve)
        }
        SynthModel::Ofe => {
            let fit = fit_ofe_polarization(&data, config.ofe.f_dc, &settings)?;
            require_converged(&fit)?;
            let curve = curve_rows(config, model, &data, &fit)?;
            (fit, curve)
        }
    };
    let stem = format!("fit_{}_{}", file_stem(kind), model.id());
    let summary = format!("{}{extra}", fit_summary(&fit));
    let files = vec![
        (
            format!("{stem}_params.csv"),
            rows_to_string(&param_rows(&fit), NumberFormat::Sig12)?,
        ),
        (
            format!("{stem}_curve.csv"),
            rows_to_string(&curve, NumberFormat::Sig12)?,
        ),
        (format!("{stem}_summary.txt"), summary.clone()),
    ];
    Ok((files, summary))
}

fn simulated_train(config: &RunConfig) -> Result<PulseTrainRecord> {
    let p = &config.pulse;
    sample_pulse_train(p.mean, p.rep_rate, p.window, config.seed)
}

fn pulse_train(config: &RunConfig) -> Result<Tables> {
    let record = simulated_train(config)?;
    let max = record.counts.iter().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max + 1];
    for &c in &record.counts {
        hist[c as usize] += 1;
    }
    let rows: Vec<ResultRow> = hist
        .iter()
        .enumerate()
        .map(|(k, &n)| ResultRow::new().num("electrons", k as f64).num("pulses", n as f64))
        .collect();
    let summary = format!(
        "{} pulses at {:e} Hz, seed {}: mean {:.6} e-/pulse (configured {}), Fano factor {:.4}\n",
        record.counts.len(),
        record.rep_rate,
        record.seed,
        record.mean(),
        config.pulse.mean,
        record.fano_factor()
    );
    let files = vec![
        ("pulse_counts.csv".to_string(), counts_to_string(&record.counts)),
        (
            "pulse_histogram.csv".to_string(),
            rows_to_string(&rows, NumberFormat::Sig12)?,
        ),
    ];
    Ok((files, summary))
}

fn spectrum(config: &RunConfig, f: &Flags) -> Result<Tables> {
    let p = &config.pulse;
    let record = match &f.input {
        Some(path) => {
            let counts = read_counts(path)?;
            PulseTrainRecord {
                window: counts.len() as f64 / p.rep_rate,
                counts,
                rep_rate: p.rep_rate,
                seed: config.seed,
            }
        }
        None => simulated_train(config)?,
    };
    let spec = periodogram(&record, p.bin, p.taper)?;
    let k = spec.carrier_bin;
    let lo = k.saturating_sub(p.half_span_bins);
    let hi = (k + p.half_span_bins).min(spec.freqs.len() - 1);
    let rows: Vec<ResultRow> = (lo..=hi)
        .map(|i| {
            ResultRow::new()
                .num("frequency_Hz", spec.freqs[i])
                .num("power_dBc", spec.power[i])
                .num("power_A2", spec.linear[i])
        })
        .collect();
    let snr = snr_at_carrier(&spec, p.rep_rate)?;
    let width = line_width(&spec, p.rep_rate, -3.0)?;
    let summary = format!(
        "carrier {:e} Hz (bin {k}), resolution bandwidth {:e} Hz, -3 dBc width {:e} Hz, SNR {:.2} dB{}\n",
        spec.freqs[k],
        spec.resolution_bw,
        width,
        snr,
        if spec.carrier_referenced {
            ""
        } else {
            " (no carrier; referenced to DC)"
        }
    );
    Ok((
        vec![("spectrum.csv".to_string(), rows_to_string(&rows, NumberFormat::Sig12)?)],
        summary,
    ))
}

fn metrics(config: &RunConfig) -> Result<Tables> {
    let m = &config.metrics;
    let area = std::f64::consts::PI * m.area_radius * m.area_radius;
    let omega = cone_solid_angle(m.half_angle);
    let pm = PulseMetrics::compute(m.n_electrons, m.tau, area, omega)?;
    let l = &config.laser;
    let table = [
        ("electrons_per_pulse", pm.n_electrons, "1"),
        ("pulse_duration", pm.tau, "s"),
        ("instantaneous_current", pm.i_inst, "A"),
        ("emission_rate", pm.emission_rate(), "1/s"),
        ("current_density", pm.j_inst, "A/m^2"),
        ("current_density_kA_cm2", to_ka_per_cm2(pm.j_inst), "kA/cm^2"),
        ("solid_angle", omega, "sr"),
        ("brightness", pm.brightness, "A/(m^2 sr)"),
        ("laser_pulse_energy", pulse_energy(l), "J"),
        ("laser_focus_duration", l.focus_duration(), "s"),
        ("laser_peak_intensity", peak_intensity(l), "W/m^2"),
        ("laser_free_space_field", free_space_field(l), "V/m"),
        ("laser_tip_field", enhanced_tip_field(l), "V/m"),
    ];
    let rows: Vec<ResultRow> = table
        .iter()
        .map(|&(q, v, u)| ResultRow::new().text("quantity", q).num("value", v).text("unit", u))
        .collect();
    let summary: String = table
        .iter()
        .map(|(q, v, u)| format!("{q:<26} {v:.6e} {u}\n"))
        .collect::<String>()
        + &format!("intensity convention: {}\n", l.convention());
    Ok((
        vec![("metrics.csv".to_string(), rows_to_string(&rows, NumberFormat::Sig12)?)],
        summary,
    ))
}

fn report(config: &RunConfig) -> Result<Tables> {
    let checks = evaluate(config)?;
    let mut summary = String::new();
    for c in &checks {
        summary += &format!(
            "[{:>2}] {:<4} {:<62} {:>14.6e}  target {}\n",
            c.criterion,
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.measured,
            c.target
        );
    }
    for (k, pass) in criterion_summary(&checks) {
        summary += &format!("criterion {k:>2}: {}\n", if pass { "PASS" } else { "FAIL" });
    }
    let rows = checks_to_rows(&checks);
    Ok((
        vec![(
            "paper_report.csv".to_string(),
            rows_to_string(&rows, NumberFormat::Sig12)?,
        )],
        summary,
    ))
}
