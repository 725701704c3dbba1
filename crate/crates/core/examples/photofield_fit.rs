//! Photofield emission: the work function lowered by one 810 nm photon, a
//! noisy synthetic laser-on sweep, the fitted apex laser field with its ±25 %
//! band, and the lightning-rod enhancement that field implies.

use fieldemit::fitting::photofield_radius_sensitivity;
use fieldemit::io::{synthesize_dataset, RunConfig};
use fieldemit::laser::infer_enhancement;

fn main() -> fieldemit::Result<()> {
    let config = RunConfig::default();
    let settings = config.fit_settings();
    let phi_eff = settings
        .fn_model
        .photofield_phi_eff(config.tip.work_function, config.laser.wavelength)?;
    println!("effective work function: {phi_eff:.4} eV");

    let data = synthesize_dataset(&config, "photofield", None, 0.02, 42)?;
    let fit = fieldemit::fitting::fit_photofield(&data, &config.tip, phi_eff, &settings)?;
    let sigma = fit.result.sigma("f_laser").unwrap_or(f64::NAN);
    println!(
        "fitted laser field: {:.4e} ± {:.1e} V/m (truth 1.1e9)",
        fit.f_laser(),
        sigma
    );

    println!(
        "\n{:>8} {:>12} {:>12} {:>12} {:>12}",
        "U (V)", "data (A)", "0.75 F", "fit", "1.25 F"
    );
    for (b, y) in fit.band.iter().zip(&data.y).step_by(4) {
        println!(
            "{:>8.1} {y:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            b.u, b.lower, b.best, b.upper
        );
    }

    println!("\nassumed radius scale -> fitted field");
    for (s, f) in photofield_radius_sensitivity(&data, &config.tip, phi_eff, &[0.8, 1.0, 1.2], &settings)? {
        println!("  {s:.1} -> {f:.4e} V/m");
    }

    let beta = infer_enhancement(fit.f_laser(), &config.laser)?;
    println!("\nenhancement factor {beta:.3} under {}", config.laser.convention());
    Ok(())
}
