//! Polarisation scans. At low power the current follows cos²θ on a flat
//! background; at high power the optical field adds to the DC field and the
//! current follows the cycle-peak field F = F_dc + F_laser·|cos θ|.

use fieldemit::fitting::{fit_cos2_background, fit_ofe_polarization};
use fieldemit::io::{synthesize_dataset, RunConfig};

fn main() -> fieldemit::Result<()> {
    let config = RunConfig::default();
    let settings = config.fit_settings();

    let low = synthesize_dataset(&config, "cos2", None, 0.02, 7)?;
    let fit = fit_cos2_background(&low, &settings)?;
    println!("cos² + background:");
    for name in ["amplitude", "background", "theta0"] {
        println!(
            "  {name:<10} {:>12.5e} ± {:.1e}",
            fit.param(name).unwrap(),
            fit.sigma(name).unwrap()
        );
    }

    let high = synthesize_dataset(&config, "ofe", None, 0.02, 7)?;
    let fit = fit_ofe_polarization(&high, config.ofe.f_dc, &settings)?;
    println!("\noptical field emission at F_dc = {:.2e} V/m:", config.ofe.f_dc);
    for name in ["g", "h", "f_laser"] {
        println!(
            "  {name:<10} {:>12.5e} ± {:.1e}",
            fit.param(name).unwrap(),
            fit.sigma(name).unwrap()
        );
    }
    println!("  corr(g, h) = {:.5}", fit.correlation(0, 1));
    for d in &fit.diagnostics {
        println!("  note: {d}");
    }
    Ok(())
}
