//! Analytic Jacobians, covariance honesty and synthetic-noise statistics.

use fieldemit::fitting::{central_difference, fit_dc_fn, fit_photofield};
use fieldemit::io::report::gradient_mismatch;
use fieldemit::io::{fit_model, synthesize_dataset, RunConfig, SynthModel};

#[test]
fn analytic_gradients_match_central_differences() {
    let config = RunConfig::default();
    let scales = [0.7, 1.0, 1.3];
    for model in SynthModel::ALL {
        let m = fit_model(&config, model).unwrap();
        let xs = synthesize_dataset(&config, model.id(), None, 0.0, 0).unwrap().x;
        for s in scales {
            let mut p: Vec<f64> = model.default_truth(&config).iter().map(|v| v * s).collect();
            if model == SynthModel::Cos2 {
                p[2] = 0.3 * s;
            }
            let worst = gradient_mismatch(m.as_ref(), &xs, &p);
            assert!(worst < 1e-6, "{} at scale {s}: {worst:e}", model.id());
        }
    }
}

#[test]
fn central_difference_is_second_order() {
    let f = |p: &[f64]| p[0].exp() * p[1].sin();
    let mut d = [0.0; 2];
    central_difference(f, &[0.7, 1.1], &mut d);
    assert!((d[0] - 0.7f64.exp() * 1.1f64.sin()).abs() < 1e-9);
    assert!((d[1] - 0.7f64.exp() * 1.1f64.cos()).abs() < 1e-9);
}

fn spread(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, sd)
}

#[test]
fn reported_sigma_matches_seed_to_seed_scatter() {
    let config = RunConfig::default();
    let settings = config.fit_settings();
    let phi_eff = settings
        .fn_model
        .photofield_phi_eff(4.5, config.laser.wavelength)
        .unwrap();
    let (mut r, mut r_sigma, mut f, mut f_sigma) = (vec![], vec![], vec![], vec![]);
    for seed in 0..200 {
        let d = synthesize_dataset(&config, "dc", None, 0.02, seed).unwrap();
        let fit = fit_dc_fn(&d, 4.5, 5.7, &settings).unwrap();
        r.push(fit.params[0]);
        r_sigma.push(fit.sigma("r").unwrap());
        let d = synthesize_dataset(&config, "photofield", None, 0.02, seed).unwrap();
        let fit = fit_photofield(&d, &config.tip, phi_eff, &settings).unwrap();
        f.push(fit.f_laser());
        f_sigma.push(fit.result.sigma("f_laser").unwrap());
    }
    for (vals, sig, name) in [(&r, &r_sigma, "r"), (&f, &f_sigma, "f_laser")] {
        let (_, empirical) = spread(vals);
        let (reported, _) = spread(sig);
        let ratio = reported / empirical;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "{name}: reported {reported:e}, empirical {empirical:e}"
        );
    }
}

#[test]
fn synthetic_noise_has_the_requested_scatter() {
    let config = RunConfig::parse("sweep.points = 1000\npol.points = 1000\n").unwrap();
    for model in ["dc", "cos2"] {
        let clean = synthesize_dataset(&config, model, None, 0.0, 0).unwrap();
        let noisy = synthesize_dataset(&config, model, None, 0.02, 31).unwrap();
        let rel: Vec<f64> = noisy.y.iter().zip(&clean.y).map(|(n, c)| n / c - 1.0).collect();
        let (mean, sd) = spread(&rel);
        // 1000 samples: sd of the sample sd is about 2.2 %, of the mean 0.06 %.
        assert!((sd - 0.02).abs() < 0.02 * 0.1, "{model}: {sd}");
        assert!(mean.abs() < 0.002, "{model}: {mean}");
    }
}

#[test]
fn model_ids_and_parameter_names() {
    let config = RunConfig::default();
    let ids: Vec<(&str, usize)> = SynthModel::ALL
        .iter()
        .map(|&m| {
            let fm = fit_model(&config, m).unwrap();
            (fm.id(), fm.param_names().len())
        })
        .collect();
    assert_eq!(ids.len(), 4);
    for (m, (_, n)) in SynthModel::ALL.iter().zip(&ids) {
        assert_eq!(m.default_truth(&config).len(), *n);
    }
}
