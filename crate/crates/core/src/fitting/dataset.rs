use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Current versus bias voltage.
    Iv,
    /// Current versus polarisation angle.
    Polarization,
}

/// Ordered (x, y, σ_y) samples from an I–V or I–θ measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepDataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    pub kind: SweepKind,
}

impl SweepDataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>, sigma: Option<Vec<f64>>, kind: SweepKind) -> Result<Self> {
        let d = Self { x, y, sigma, kind };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_unit(&self) -> &'static str {
        match self.kind {
            SweepKind::Iv => "V",
            SweepKind::Polarization => "rad",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::data(format!(
                "x has {} samples but y has {}",
                self.x.len(),
                self.y.len()
            )));
        }
        if let Some(s) = &self.sigma {
            if s.len() != self.x.len() {
                return Err(Error::data(format!(
                    "sigma has {} samples, expected {}",
                    s.len(),
                    self.x.len()
                )));
            }
            if let Some(i) = s.iter().position(|&v| !(v.is_finite() && v > 0.0)) {
                return Err(Error::data(format!("sample {i}: sigma must be positive, got {}", s[i])));
            }
        }
        if let Some(i) = self.x.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!("sample {i}: x is not finite")));
        }
        if let Some(i) = self.y.iter().position(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::data(format!(
                "sample {i}: current must be ≥ 0, got {}",
                self.y[i]
            )));
        }
        if self.kind == SweepKind::Iv && self.x.len() > 1 {
            let rising = self.x[1] > self.x[0];
            for (i, w) in self.x.windows(2).enumerate() {
                if (w[1] > w[0]) != rising || w[1] == w[0] {
                    return Err(Error::data(format!(
                        "sample {}: voltages are not strictly monotone",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Fowler-Nordheim plot coordinates (1/|U|, ln(I/U²)), in input order.
    pub fn fn_linearize(&self) -> Result<Vec<(f64, f64)>> {
        if self.kind != SweepKind::Iv {
            return Err(Error::data("FN linearisation needs an I–V sweep"));
        }
        if self.is_empty() {
            return Err(Error::data("empty dataset"));
        }
        self.x
            .iter()
            .zip(&self.y)
            .enumerate()
            .map(|(i, (&u, &cur))| {
                if cur <= 0.0 {
                    Err(Error::data(format!(
                        "sample {i}: current must be > 0 for an FN plot, got {cur}"
                    )))
                } else if u == 0.0 {
                    Err(Error::data(format!("sample {i}: zero voltage")))
                } else {
                    Ok((1.0 / u.abs(), (cur / (u * u)).ln()))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least-squares straight line.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::data("a line needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::data("all abscissae are equal"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}
