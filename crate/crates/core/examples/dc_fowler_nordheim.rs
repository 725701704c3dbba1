//! Laser-off field emission from a 134 nm tungsten tip: local field, barrier
//! parameters, current along a one-decade sweep, and the tip radius recovered
//! from that sweep by a least-squares fit.

use fieldemit::emission::{tip_field_from_voltage, FowlerNordheim, TipSpec};
use fieldemit::fitting::{fit_dc_fn, fit_line, FitSettings, SweepDataset, SweepKind};

fn main() -> fieldemit::Result<()> {
    let fnm = FowlerNordheim::default();
    let tip = TipSpec::with_radius(134e-9, 4.5)?;

    println!(
        "{:>8} {:>12} {:>8} {:>8} {:>12}",
        "U (V)", "F (V/m)", "w", "v(w)", "I (A)"
    );
    let voltages: Vec<f64> = (0..=10).map(|i| 1405.87 + 9.413 * i as f64).collect();
    let mut currents = Vec::new();
    for &u in &voltages {
        let f = tip_field_from_voltage(u, &tip);
        let nh = fnm.nordheim_params(f, tip.work_function)?;
        let i = fnm.dc_current(u, &tip)?;
        currents.push(i);
        println!("{u:>8.2} {f:>12.4e} {:>8.4} {:>8.4} {i:>12.4e}", nh.w, nh.v_of_w);
    }

    let data = SweepDataset::new(voltages, currents, None, SweepKind::Iv)?;
    let line = fit_line(&data.fn_linearize()?)?;
    println!("\nFN plot: slope {:.5e} V, R² = {:.8}", line.slope, line.r_squared);

    let fit = fit_dc_fn(&data, tip.work_function, tip.field_factor, &FitSettings::default())?;
    println!(
        "fitted r = {:.3} nm, R = {:.3} nm, converged: {}",
        fit.params[0] * 1e9,
        fit.params[1] * 1e9,
        fit.converged
    );
    Ok(())
}
