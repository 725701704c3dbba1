//! Shot-noise-limited pulse train: Poisson electron counts per pulse, the
//! spectrum of the resulting current, and its carrier line. Runs at a 1 MHz
//! repetition rate so a 1 s record (1 Hz resolution) fits in memory.

use fieldemit::pulse::{line_width, mean_electrons_per_pulse, periodogram, sample_pulse_train, snr_at_carrier, Window};

fn main() -> fieldemit::Result<()> {
    let at_1ghz = mean_electrons_per_pulse(40e-9, 1e9)?;
    println!("40 nA at 1 GHz = {at_1ghz:.2} electrons per pulse");

    let (rep, window, bin) = (1e6, 1.0, 0.25e-6);
    for mean in [0.05, 0.5, 5.0] {
        let record = sample_pulse_train(mean, rep, window, 2024)?;
        let spec = periodogram(&record, bin, Window::Rectangular)?;
        println!(
            "mean {mean:>4}: Fano {:.4}, carrier {:.0} Hz, RBW {} Hz, -3 dBc width {} Hz, SNR {:.1} dB",
            record.fano_factor(),
            spec.freqs[spec.carrier_bin],
            spec.resolution_bw,
            line_width(&spec, rep, -3.0)?,
            snr_at_carrier(&spec, rep)?
        );
    }
    Ok(())
}
