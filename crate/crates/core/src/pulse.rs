//! Pulse-train counting statistics and the spectrum of the resulting
//! current.
//!
//! Each laser pulse releases a Poisson-distributed number of electrons.
//! Emission inside a pulse (tens of fs) is treated as instantaneous at the
//! pulse time, so the binned current is an impulse train whose spectrum has
//! lines at the repetition rate and its harmonics on a shot-noise floor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::constants::ELEMENTARY_CHARGE;
use crate::error::{Error, Result};

/// Upper bound on pulses per record (memory guard).
pub const MAX_PULSES: usize = 1 << 28;

/// Bins within this distance of a carrier harmonic are excluded from the
/// noise floor.
const GUARD_BINS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrainRecord {
    pub counts: Vec<u64>,
    pub rep_rate: f64,
    pub window: f64,
    pub seed: u64,
}

impl PulseTrainRecord {
    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            return 0.0;
        }
        self.counts.iter().map(|&c| c as f64).sum::<f64>() / self.counts.len() as f64
    }

    /// Variance-to-mean ratio of the counts.
    pub fn fano_factor(&self) -> f64 {
        let m = self.mean();
        let var = self.counts.iter().map(|&c| (c as f64 - m).powi(2)).sum::<f64>() / (self.counts.len() as f64 - 1.0);
        var / m
    }
}

/// Electrons per pulse for an average current `i_avg` at `rep_rate`.
pub fn mean_electrons_per_pulse(i_avg: f64, rep_rate: f64) -> Result<f64> {
    if !(i_avg.is_finite() && i_avg >= 0.0) {
        return Err(Error::domain(format!("average current must be ≥ 0, got {i_avg}")));
    }
    if !(rep_rate.is_finite() && rep_rate > 0.0) {
        return Err(Error::domain(format!(
            "repetition rate must be positive, got {rep_rate}"
        )));
    }
    Ok(i_avg / (ELEMENTARY_CHARGE * rep_rate))
}

fn pulse_count(rep_rate: f64, window: f64) -> Result<usize> {
    if !(rep_rate.is_finite() && rep_rate > 0.0 && window.is_finite() && window > 0.0) {
        return Err(Error::domain("rep_rate and window must be positive"));
    }
    let n = (window * rep_rate).round();
    if n < 1.0 {
        return Err(Error::domain(format!(
            "window {window} s holds no pulse at {rep_rate} Hz"
        )));
    }
    if n > MAX_PULSES as f64 {
        return Err(Error::domain(format!("{n} pulses exceed the limit of {MAX_PULSES}")));
    }
    Ok(n as usize)
}

/// Independent Poisson draws, one per pulse, from a ChaCha8 stream seeded
/// with `seed`.
pub fn sample_pulse_train(mean: f64, rep_rate: f64, window: f64, seed: u64) -> Result<PulseTrainRecord> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::domain(format!("mean must be ≥ 0, got {mean}")));
    }
    let n = pulse_count(rep_rate, window)?;
    let counts = if mean == 0.0 {
        vec![0; n]
    } else {
        let dist = Poisson::new(mean).map_err(|e| Error::domain(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| dist.sample(&mut rng) as u64).collect()
    };
    Ok(PulseTrainRecord {
        counts,
        rep_rate,
        window,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

/// One-sided power spectrum, normalised so the carrier bin reads 0 dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub freqs: Vec<f64>,
    /// Power relative to the reference bin (dBc).
    pub power: Vec<f64>,
    /// One-sided power per bin (A²). With a rectangular window these sum to
    /// the mean square of the time series.
    pub linear: Vec<f64>,
    pub resolution_bw: f64,
    /// Bin holding the repetition-rate line.
    pub carrier_bin: usize,
    /// False when the carrier bin is empty and dB values are relative to DC.
    pub carrier_referenced: bool,
}

impl SpectrumEstimate {
    pub fn bin_of(&self, freq: f64) -> usize {
        (freq / self.resolution_bw).round() as usize
    }
}

/// Spectrum of an arbitrary uniformly sampled current `series` (A) with
/// sample spacing `dt`, referenced to the line at `rep_rate`.
pub fn power_spectrum(series: &[f64], dt: f64, rep_rate: f64, window: Window) -> Result<SpectrumEstimate> {
    let n = series.len();
    if n < 2 {
        return Err(Error::domain("spectrum needs at least two samples"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(format!("sample spacing must be positive, got {dt}")));
    }
    let df = 1.0 / (n as f64 * dt);
    let half = n / 2;
    let carrier_bin = (rep_rate / df).round() as usize;
    if carrier_bin == 0 || carrier_bin > half {
        return Err(Error::domain(format!(
            "repetition rate {rep_rate} Hz is outside the resolved band (0, {}] Hz",
            half as f64 * df
        )));
    }

    let taper: Vec<f64> = match window {
        Window::Rectangular => vec![1.0; n],
        Window::Hann => (0..n)
            .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()))
            .collect(),
    };
    let taper_power: f64 = taper.iter().map(|w| w * w).sum();
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .zip(&taper)
        .map(|(&x, &w)| Complex::new(x * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let norm = n as f64 * taper_power;
    let linear: Vec<f64> = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() / norm;
            if k == 0 || (n.is_multiple_of(2) && k == half) {
                p
            } else {
                2.0 * p
            }
        })
        .collect();

    let carrier = linear[carrier_bin];
    let (reference, carrier_referenced) = if carrier > 0.0 {
        (carrier, true)
    } else {
        (linear[0].max(f64::MIN_POSITIVE), false)
    };
    Ok(SpectrumEstimate {
        freqs: (0..=half).map(|k| k as f64 * df).collect(),
        power: linear.iter().map(|&p| 10.0 * (p / reference).log10()).collect(),
        linear,
        resolution_bw: df,
        carrier_bin,
        carrier_referenced,
    })
}

/// Current time series of a record sampled every `bin` seconds. Pulse `p`
/// lands in the sample containing `p / rep_rate`.
pub fn binned_current(record: &PulseTrainRecord, bin: f64) -> Result<Vec<f64>> {
    let nyquist = 1.0 / (2.0 * record.rep_rate);
    if !(bin.is_finite() && bin > 0.0) || bin > nyquist * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "bin {bin} s must be positive and ≤ 1/(2·rep_rate) = {nyquist} s"
        )));
    }
    let samples = (record.window / bin).round();
    if (samples * bin - record.window).abs() > 1e-9 * record.window {
        return Err(Error::domain(format!(
            "bin {bin} s does not divide the window {} s",
            record.window
        )));
    }
    if samples > (8 * MAX_PULSES) as f64 {
        return Err(Error::domain("binned series too long"));
    }
    let samples = samples as usize;
    let mut series = vec![0.0; samples];
    let scale = ELEMENTARY_CHARGE / bin;
    let per_pulse = 1.0 / (record.rep_rate * bin);
    for (p, &c) in record.counts.iter().enumerate() {
        let idx = (p as f64 * per_pulse + 1e-9).floor() as usize;
        if let Some(s) = series.get_mut(idx) {
            *s += c as f64 * scale;
        }
    }
    Ok(series)
}

/// Power spectrum of the binned pulse-train current.
pub fn periodogram(record: &PulseTrainRecord, bin: f64, window: Window) -> Result<SpectrumEstimate> {
    let series = binned_current(record, bin)?;
    power_spectrum(&series, bin, record.rep_rate, window)
}

fn is_near_harmonic(k: usize, carrier: usize) -> bool {
    let r = k % carrier;
    r <= GUARD_BINS || carrier - r <= GUARD_BINS
}

/// Carrier power over the median of the off-carrier bins (dB). Infinite for
/// a noiseless floor.
pub fn snr_at_carrier(spec: &SpectrumEstimate, rep_rate: f64) -> Result<f64> {
    let k = spec.bin_of(rep_rate);
    if k == 0 || k >= spec.linear.len() {
        return Err(Error::domain(format!("{rep_rate} Hz is outside the spectrum")));
    }
    let mut floor: Vec<f64> = spec
        .linear
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(i, _)| !is_near_harmonic(i, k))
        .map(|(_, &p)| p)
        .collect();
    if floor.is_empty() {
        return Err(Error::domain("no off-carrier bins to estimate the noise floor"));
    }
    floor.sort_by(f64::total_cmp);
    let m = floor.len();
    let median = if m % 2 == 1 {
        floor[m / 2]
    } else {
        0.5 * (floor[m / 2 - 1] + floor[m / 2])
    };
    if median <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (spec.linear[k] / median).log10())
}

/// Width of the contiguous region around the carrier that stays above
/// `level_dbc` relative to the carrier (Hz).
pub fn line_width(spec: &SpectrumEstimate, rep_rate: f64, level_dbc: f64) -> Result<f64> {
    let k = spec.bin_of(rep_rate);
    let peak = *spec
        .linear
        .get(k)
        .ok_or_else(|| Error::domain(format!("{rep_rate} Hz is outside the spectrum")))?;
    if peak <= 0.0 {
        return Ok(0.0);
    }
    let threshold = peak * 10f64.powf(level_dbc / 10.0);
    let above = |i: usize| spec.linear[i] >= threshold;
    let mut lo = k;
    while lo > 0 && above(lo - 1) {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < spec.linear.len() && above(hi + 1) {
        hi += 1;
    }
    Ok((hi - lo + 1) as f64 * spec.resolution_bw)
}

/// Fraction of the laser-on current that is photo-emitted.
pub fn photo_fraction(i_laser_on: f64, i_laser_off: f64) -> Result<f64> {
    if i_laser_on == 0.0 {
        return Err(Error::domain("laser-on current is zero"));
    }
    if !(i_laser_off >= 0.0 && i_laser_on >= i_laser_off) {
        return Err(Error::domain(format!(
            "need i_on ≥ i_off ≥ 0, got {i_laser_on} and {i_laser_off}"
        )));
    }
    Ok((i_laser_on - i_laser_off) / i_laser_on)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn electrons_per_pulse() {
        let n = mean_electrons_per_pulse(40e-9, 1e9).unwrap();
        assert_relative_eq!(n, 249.660362978431, max_relative = 1e-12);
        assert!((n - 200.0).abs() / 200.0 < 0.3);
        assert_relative_eq!(
            mean_electrons_per_pulse(0.16e-12, 1e9).unwrap(),
            1e-3,
            max_relative = 2e-3
        );
        assert_relative_eq!(mean_electrons_per_pulse(ELEMENTARY_CHARGE * 1e9, 1e9).unwrap(), 1.0);
        assert!(mean_electrons_per_pulse(-1.0, 1e9).is_err());
    }

    #[test]
    fn sampling_basics() {
        let zero = sample_pulse_train(0.0, 1e6, 1e-3, 1).unwrap();
        assert_eq!(zero.counts.len(), 1000);
        assert!(zero.counts.iter().all(|&c| c == 0));
        let a = sample_pulse_train(0.5, 1e6, 1e-2, 9).unwrap();
        let b = sample_pulse_train(0.5, 1e6, 1e-2, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.counts, sample_pulse_train(0.5, 1e6, 1e-2, 10).unwrap().counts);
        assert!(sample_pulse_train(1.0, 1e9, 1e-10, 0).is_err());
        assert!(sample_pulse_train(1.0, 1e9, 10.0, 0).is_err());
        assert!(sample_pulse_train(-1.0, 1e9, 1e-6, 0).is_err());
    }

    #[test]
    fn empirical_mean_within_poisson_error() {
        let r = sample_pulse_train(0.5, 1e6, 1.0, 2024).unwrap();
        let sigma = (0.5f64 / 1e6).sqrt();
        assert!((r.mean() - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn spectrum_of_constant_current_has_no_line() {
        let series = vec![1e-9; 4000];
        let s = power_spectrum(&series, 0.25e-6, 1e6, Window::Rectangular).unwrap();
        assert!(s.linear[s.carrier_bin] < 1e-30 * s.linear[0]);
        assert!(!s.carrier_referenced);
    }

    #[test]
    fn equal_counts_give_clean_carrier() {
        let r = PulseTrainRecord {
            counts: vec![3; 4096],
            rep_rate: 1e6,
            window: 4096e-6,
            seed: 0,
        };
        let s = periodogram(&r, 0.25e-6, Window::Rectangular).unwrap();
        assert_eq!(s.carrier_bin, 4096);
        assert_eq!(s.power[s.carrier_bin], 0.0);
        assert_eq!(snr_at_carrier(&s, 1e6).unwrap(), f64::INFINITY);
        let hann = periodogram(&r, 0.25e-6, Window::Hann).unwrap();
        assert!(snr_at_carrier(&hann, 1e6).unwrap() > 60.0);
    }

    #[test]
    fn carrier_bin_and_width() {
        let r = sample_pulse_train(0.5, 1e6, 0.05, 3).unwrap();
        let s = periodogram(&r, 0.25e-6, Window::Rectangular).unwrap();
        let argmax = (1..s.linear.len())
            .max_by(|&a, &b| s.linear[a].total_cmp(&s.linear[b]))
            .unwrap();
        assert_eq!(argmax, s.carrier_bin);
        assert_relative_eq!(s.freqs[argmax], 1e6, max_relative = 1e-12);
        assert_relative_eq!(s.resolution_bw, 1.0 / 0.05, max_relative = 1e-9);
        let w = line_width(&s, 1e6, -3.0).unwrap();
        assert!((w - s.resolution_bw).abs() <= s.resolution_bw);
    }

    #[test]
    fn parseval() {
        let r = sample_pulse_train(0.7, 1e6, 0.01, 5).unwrap();
        let series = binned_current(&r, 0.25e-6).unwrap();
        let ms = series.iter().map(|x| x * x).sum::<f64>() / series.len() as f64;
        let s = power_spectrum(&series, 0.25e-6, 1e6, Window::Rectangular).unwrap();
        let total: f64 = s.linear.iter().sum();
        assert!(((total - ms) / ms).abs() < 1e-9);
    }

    #[test]
    fn nyquist_guard() {
        let r = sample_pulse_train(0.5, 1e6, 1e-3, 3).unwrap();
        assert!(matches!(
            periodogram(&r, 1e-6, Window::Rectangular),
            Err(Error::Domain(_))
        ));
        assert!(periodogram(&r, 0.5e-6, Window::Rectangular).is_ok());
    }

    #[test]
    fn photo_fraction_examples() {
        assert_eq!(photo_fraction(1e-9, 0.0).unwrap(), 1.0);
        assert_relative_eq!(photo_fraction(50.0, 1.0).unwrap(), 0.98);
        assert!(photo_fraction(0.0, 0.0).is_err());
        assert!(photo_fraction(1.0, 2.0).is_err());
    }
}
