//! Source figures for 200 electrons in a 65 fs pulse from a 1 µm radius
//! area, with brightness quoted for a 1 mrad emission cone.

use std::f64::consts::PI;

use fieldemit::metrics::{cone_solid_angle, to_ka_per_cm2, PulseMetrics, DEFAULT_HALF_ANGLE};

fn main() -> fieldemit::Result<()> {
    let area = PI * 1e-6 * 1e-6;
    let m = PulseMetrics::compute(200.0, 65e-15, area, cone_solid_angle(DEFAULT_HALF_ANGLE))?;
    println!("instantaneous current {:.4e} A", m.i_inst);
    println!("emission rate         {:.4e} electrons/s", m.emission_rate());
    println!("current density       {:.3} kA/cm²", to_ka_per_cm2(m.j_inst));
    println!("brightness            {:.3e} A/(m² sr)", m.brightness);
    for alpha in [0.5e-3, 1e-3, 2e-3, 5e-3] {
        let b = PulseMetrics::compute(200.0, 65e-15, area, cone_solid_angle(alpha))?.brightness;
        println!("  half-angle {:.1} mrad -> {b:.3e}", alpha * 1e3);
    }
    Ok(())
}
