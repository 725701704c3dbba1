//! Cycle-averaged optical-field-emission density versus polarisation angle,
//! for a continuous wave and a 65 fs Gaussian pulse, next to the density at
//! the cycle peak.

use std::f64::consts::PI;

use fieldemit::emission::{Envelope, FieldState, FowlerNordheim};
use fieldemit::quadrature::QuadratureConfig;

fn main() -> fieldemit::Result<()> {
    let fnm = FowlerNordheim::default();
    let quad = QuadratureConfig::default();
    let (f_dc, f_laser, phi) = (1.5e9, 2.0e9, 4.5);
    println!(
        "{:>6} {:>14} {:>14} {:>14}",
        "θ/π", "peak", "CW average", "pulse average"
    );
    for i in 0..=8 {
        let theta = PI * i as f64 / 16.0;
        let fs = FieldState::new(f_dc, f_laser, theta)?;
        let peak = fnm.current_density(fs.peak_field(), phi)?;
        let cw = fnm.ofe_cycle_averaged_density(&fs, phi, Envelope::Cw, &quad)?;
        let pulse = fnm.ofe_cycle_averaged_density(&fs, phi, Envelope::Gaussian { fwhm: 65e-15 }, &quad)?;
        println!("{:>6.4} {peak:>14.5e} {cw:>14.5e} {pulse:>14.5e}", theta / PI);
    }
    let dc = fnm.current_density(f_dc, phi)?;
    println!("DC density {dc:.5e} A/m², reached at θ = π/2");
    Ok(())
}
