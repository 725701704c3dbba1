//! Damped (Levenberg–Marquardt) least squares with box bounds.
//!
//! Minimises ½Σrᵢ² where rᵢ is a weighted, log-space or linear residual
//! between data and model. Steps solve (JᵀJ + λ·D)δ = −Jᵀr with D the
//! diagonal of JᵀJ, which makes the iteration invariant to parameter
//! scaling. λ starts at 1e−3, is divided by 10 on an accepted step and
//! multiplied by 10 on a rejected one. Steps are projected onto the bounds.

use nalgebra::{DMatrix, DVector};

use super::dataset::{SweepDataset, SweepKind};
use crate::error::{Error, Result};

/// A model y = f(x; p) with an optional analytic gradient.
pub trait Model {
    fn id(&self) -> &'static str;
    fn param_names(&self) -> &'static [&'static str];
    fn eval(&self, x: f64, params: &[f64]) -> f64;

    /// ∂f/∂p at `x`. Defaults to central differences.
    fn gradient(&self, x: f64, params: &[f64], out: &mut [f64]) {
        central_difference(|p| self.eval(x, p), params, out);
    }

    fn n_params(&self) -> usize {
        self.param_names().len()
    }
}

/// Central-difference gradient with a relative step of 1e−6.
pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, params: &[f64], out: &mut [f64]) {
    let mut p = params.to_vec();
    for i in 0..params.len() {
        let h = 1e-6 * params[i].abs().max(1e-300);
        p[i] = params[i] + h;
        let up = f(&p);
        p[i] = params[i] - h;
        let down = f(&p);
        p[i] = params[i];
        out[i] = (up - down) / (2.0 * h);
    }
}

/// How data and model are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMode {
    /// (y − f)/σ.
    Weighted,
    /// ln y − ln f.
    Log,
    /// y − f.
    Linear,
}

impl ResidualMode {
    /// 1/σ² weighting when σ is present, otherwise log space for I–V data and
    /// linear space for polarisation scans.
    pub fn for_dataset(data: &SweepDataset) -> Self {
        match (&data.sigma, data.kind) {
            (Some(_), _) => ResidualMode::Weighted,
            (None, SweepKind::Iv) => ResidualMode::Log,
            (None, SweepKind::Polarization) => ResidualMode::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { lower, upper }
    }

    fn project(&self, p: &mut [f64]) {
        for ((v, &lo), &hi) in p.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }

    fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((&v, &lo), &hi)| v >= lo && v <= hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Relative cost decrease below which an accepted step ends the fit.
    pub ftol: f64,
    /// Scaled-gradient tolerance.
    pub gtol: f64,
    pub initial_damping: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            ftol: 1e-10,
            gtol: 1e-10,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model_id: String,
    pub param_names: Vec<String>,
    pub params: Vec<f64>,
    /// Covariance scaled by the reduced chi-square.
    pub covariance: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub chi2_reduced: f64,
    pub n_iterations: usize,
    pub converged: bool,
    /// max_i |J_iᵀr| / (‖J_i‖·‖r‖) at the solution.
    pub gradient_norm: f64,
    /// Cost after the start and after every accepted step.
    pub cost_history: Vec<f64>,
    pub rank_deficient: bool,
    pub diagnostics: Vec<String>,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.param_names.iter().position(|n| n == name).map(|i| self.params[i])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.param_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.covariance[i][i].max(0.0).sqrt())
    }

    pub fn correlation(&self, a: usize, b: usize) -> f64 {
        let c = &self.covariance;
        c[a][b] / (c[a][a] * c[b][b]).sqrt()
    }
}

struct Problem<'a> {
    model: &'a dyn Model,
    data: &'a SweepDataset,
    mode: ResidualMode,
}

impl Problem<'_> {
    fn residuals(&self, p: &[f64]) -> Option<DVector<f64>> {
        let mut r = DVector::zeros(self.data.len());
        for i in 0..self.data.len() {
            let (x, y) = (self.data.x[i], self.data.y[i]);
            let f = self.model.eval(x, p);
            r[i] = match self.mode {
                ResidualMode::Weighted => (y - f) / self.data.sigma.as_ref()?[i],
                ResidualMode::Log => {
                    if f <= 0.0 {
                        return None;
                    }
                    y.ln() - f.ln()
                }
                ResidualMode::Linear => y - f,
            };
            if !r[i].is_finite() {
                return None;
            }
        }
        Some(r)
    }

    /// Cost produced by residuals at the level of floating-point roundoff.
    fn roundoff_cost(&self) -> f64 {
        let eps = 1e-12;
        0.5 * (0..self.data.len())
            .map(|i| {
                let y = self.data.y[i];
                let r = match self.mode {
                    ResidualMode::Weighted => eps * y / self.data.sigma.as_ref().expect("sigma")[i],
                    ResidualMode::Log => eps,
                    ResidualMode::Linear => eps * y,
                };
                r * r
            })
            .sum::<f64>()
    }

    fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let n = p.len();
        let mut j = DMatrix::zeros(self.data.len(), n);
        let mut g = vec![0.0; n];
        for i in 0..self.data.len() {
            let x = self.data.x[i];
            self.model.gradient(x, p, &mut g);
            let scale = match self.mode {
                ResidualMode::Weighted => -1.0 / self.data.sigma.as_ref().expect("sigma")[i],
                ResidualMode::Log => -1.0 / self.model.eval(x, p),
                ResidualMode::Linear => -1.0,
            };
            for k in 0..n {
                j[(i, k)] = scale * g[k];
            }
        }
        j
    }
}

fn scaled_gradient_norm(j: &DMatrix<f64>, r: &DVector<f64>) -> f64 {
    let rn = r.norm();
    if rn == 0.0 {
        return 0.0;
    }
    j.column_iter()
        .map(|c| {
            let cn = c.norm();
            if cn == 0.0 {
                0.0
            } else {
                (c.dot(r) / (cn * rn)).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Fits `model` to `data` from `init`.
///
/// Returns a result with `converged = false` when the iteration cap is hit.
/// Fails when `init` lies outside `bounds`, the model cannot be evaluated at
/// `init`, or a parameter has no influence on the residuals there.
pub fn least_squares(
    model: &dyn Model,
    data: &SweepDataset,
    init: &[f64],
    bounds: Option<&Bounds>,
    config: &LmConfig,
) -> Result<FitResult> {
    let n = model.n_params();
    if init.len() != n {
        return Err(Error::usage(format!(
            "{} expects {n} parameters, got {}",
            model.id(),
            init.len()
        )));
    }
    if data.len() < n {
        return Err(Error::data(format!(
            "{} points cannot constrain {n} parameters",
            data.len()
        )));
    }
    if let Some(b) = bounds {
        if b.lower.len() != n || b.upper.len() != n || !b.contains(init) {
            return Err(Error::usage(format!(
                "initial parameters {init:?} lie outside the bounds"
            )));
        }
    }
    let problem = Problem {
        model,
        data,
        mode: ResidualMode::for_dataset(data),
    };
    if problem.mode == ResidualMode::Log {
        if let Some(i) = data.y.iter().position(|&y| y <= 0.0) {
            return Err(Error::data(format!(
                "sample {i}: log-space fit needs positive currents"
            )));
        }
    }

    let mut p = init.to_vec();
    let mut r = problem
        .residuals(&p)
        .ok_or_else(|| Error::numerical(format!("{} cannot be evaluated at {p:?}", model.id())))?;
    let mut j = problem.jacobian(&p);
    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite Jacobian at the initial parameters"));
    }
    if let Some(k) = (0..n).find(|&k| j.column(k).iter().all(|&v| v == 0.0)) {
        return Err(Error::numerical(format!(
            "singular Jacobian: parameter `{}` has no effect at {p:?}",
            model.param_names()[k]
        )));
    }

    let mut cost = 0.5 * r.norm_squared();
    let noise_floor = problem.roundoff_cost();
    let mut history = vec![cost];
    let mut lambda = config.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    let mut diagnostics = Vec::new();

    while iterations < config.max_iterations {
        iterations += 1;
        let gnorm = scaled_gradient_norm(&j, &r);
        if cost <= noise_floor || gnorm < config.gtol {
            converged = true;
            break;
        }
        // Work in column-normalised variables so that parameters of wildly
        // different magnitude do not wreck the conditioning of JᵀJ.
        let norms: Vec<f64> = (0..n).map(|k| j.column(k).norm()).collect();
        let nmax = norms.iter().copied().fold(0.0, f64::max);
        let scale: DVector<f64> = DVector::from_iterator(n, norms.iter().map(|&c| 1.0 / c.max(nmax * 1e-150)));
        let js = &j * DMatrix::from_diagonal(&scale);
        let jtj = js.transpose() * &js;
        let g = js.transpose() * &r;

        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-15);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)).component_mul(&scale),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let mut trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if let Some(b) = bounds {
                b.project(&mut trial);
            }
            match problem.residuals(&trial) {
                Some(rt) if 0.5 * rt.norm_squared() < cost => {
                    let new_cost = 0.5 * rt.norm_squared();
                    let rel = (cost - new_cost) / cost;
                    p = trial;
                    r = rt;
                    cost = new_cost;
                    history.push(cost);
                    j = problem.jacobian(&p);
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if rel < config.ftol {
                        converged = true;
                    }
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if converged {
            break;
        }
        if !accepted {
            // no downhill step at any damping: a minimum to working precision
            let g = scaled_gradient_norm(&j, &r);
            converged = g < 1e-6 || cost <= noise_floor;
            diagnostics.push(format!("stalled: no decreasing step, scaled gradient {g:.3e}"));
            break;
        }
    }
    if !converged && iterations >= config.max_iterations {
        diagnostics.push(format!("iteration limit {} reached", config.max_iterations));
    }

    let m = data.len();
    let dof = m.saturating_sub(n).max(1) as f64;
    let chi2_reduced = 2.0 * cost / dof;
    let (cov, rank_deficient) = covariance(&j, chi2_reduced);
    if rank_deficient {
        diagnostics.push("rank-deficient Jacobian at the solution; covariance is a pseudo-inverse".into());
    }
    let residuals = match problem.mode {
        ResidualMode::Log => r.iter().copied().collect(),
        _ => (0..m).map(|i| data.y[i] - model.eval(data.x[i], &p)).collect(),
    };

    Ok(FitResult {
        model_id: model.id().to_string(),
        param_names: model.param_names().iter().map(|s| s.to_string()).collect(),
        params: p,
        covariance: cov,
        residuals,
        chi2_reduced,
        n_iterations: iterations,
        converged,
        gradient_norm: scaled_gradient_norm(&j, &r),
        cost_history: history,
        rank_deficient,
        diagnostics,
    })
}

/// (JᵀJ)⁺·χ²_red, computed on column-normalised J for conditioning.
fn covariance(j: &DMatrix<f64>, chi2_reduced: f64) -> (Vec<Vec<f64>>, bool) {
    let n = j.ncols();
    let scale: Vec<f64> = j
        .column_iter()
        .map(|c| {
            let v = c.norm();
            if v > 0.0 {
                1.0 / v
            } else {
                0.0
            }
        })
        .collect();
    let mut js = j.clone();
    for (k, s) in scale.iter().enumerate() {
        js.column_mut(k).scale_mut(*s);
    }
    let svd = (js.transpose() * &js).svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-13;
    let rank_deficient = svd.singular_values.iter().any(|&s| s <= tol);
    let pinv = svd.pseudo_inverse(tol).unwrap_or_else(|_| DMatrix::zeros(n, n));
    let cov = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| pinv[(a, b)] * scale[a] * scale[b] * chi2_reduced)
                .collect()
        })
        .collect();
    (cov, rank_deficient)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Line;
    impl Model for Line {
        fn id(&self) -> &'static str {
            "line"
        }
        fn param_names(&self) -> &'static [&'static str] {
            &["a"]
        }
        fn eval(&self, x: f64, p: &[f64]) -> f64 {
            p[0] * x
        }
    }

    struct Exp;
    impl Model for Exp {
        fn id(&self) -> &'static str {
            "exp"
        }
        fn param_names(&self) -> &'static [&'static str] {
            &["amp", "rate"]
        }
        fn eval(&self, x: f64, p: &[f64]) -> f64 {
            p[0] * (-p[1] * x).exp()
        }
    }

    fn pol(x: Vec<f64>, y: Vec<f64>) -> SweepDataset {
        SweepDataset::new(x, y, None, SweepKind::Polarization).unwrap()
    }

    #[test]
    fn slope_through_origin_matches_closed_form() {
        let x: Vec<f64> = (1..=20).map(|i| i as f64 * 0.37).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v + 0.01 * (v * 13.0).sin()).collect();
        let oracle = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>();
        let fit = least_squares(&Line, &pol(x, y), &[1.0], None, &LmConfig::default()).unwrap();
        assert!(((fit.params[0] - oracle) / oracle).abs() < 1e-10);
        assert!(fit.converged);
    }

    #[test]
    fn exact_data_at_truth_is_a_fixed_point() {
        let x: Vec<f64> = (0..15).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().map(|&v| Exp.eval(v, &[3.0, 0.7])).collect();
        let fit = least_squares(&Exp, &pol(x, y), &[3.0, 0.7], None, &LmConfig::default()).unwrap();
        assert_eq!(fit.params, vec![3.0, 0.7]);
        assert!(fit.residuals.iter().all(|r| *r == 0.0));
        assert!(fit.converged);
    }

    #[test]
    fn recovers_from_distant_start_with_monotone_cost() {
        let x: Vec<f64> = (0..25).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().map(|&v| Exp.eval(v, &[3.0, 0.7])).collect();
        let fit = least_squares(&Exp, &pol(x, y), &[1.0, 0.1], None, &LmConfig::default()).unwrap();
        assert!((fit.params[0] - 3.0).abs() < 1e-6 && (fit.params[1] - 0.7).abs() < 1e-6);
        assert!(fit.cost_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn deterministic() {
        let x: Vec<f64> = (0..25).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| Exp.eval(v, &[3.0, 0.7]) * (1.0 + 0.01 * (v * 7.0).sin()))
            .collect();
        let d = pol(x, y);
        let a = least_squares(&Exp, &d, &[1.0, 0.1], None, &LmConfig::default()).unwrap();
        let b = least_squares(&Exp, &d, &[1.0, 0.1], None, &LmConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bounds_are_respected() {
        let x: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let y = vec![0.0; x.len()];
        let b = Bounds::new(vec![0.5], vec![10.0]);
        let fit = least_squares(&Line, &pol(x, y), &[2.0], Some(&b), &LmConfig::default()).unwrap();
        assert_eq!(fit.params[0], 0.5);
        let err = least_squares(
            &Line,
            &pol(vec![1.0], vec![1.0]),
            &[20.0],
            Some(&b),
            &LmConfig::default(),
        );
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn insensitive_parameter_is_singular() {
        let d = pol(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            least_squares(&Line, &d, &[1.0], None, &LmConfig::default()),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let x: Vec<f64> = (0..25).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| Exp.eval(v, &[3.0, 0.7]) + 0.01 * (v * 5.0).cos())
            .collect();
        let cfg = LmConfig {
            max_iterations: 1,
            ..Default::default()
        };
        let fit = least_squares(&Exp, &pol(x, y), &[1.0, 0.1], None, &cfg).unwrap();
        assert!(!fit.converged);
        assert!(fit.diagnostics.iter().any(|d| d.contains("iteration limit")));
    }

    #[test]
    fn numeric_gradient_default() {
        let mut g = [0.0; 2];
        Exp.gradient(1.3, &[2.0, 0.4], &mut g);
        let e = (-0.4f64 * 1.3).exp();
        assert!((g[0] - e).abs() < 1e-8);
        assert!((g[1] + 2.0 * 1.3 * e).abs() < 1e-8);
    }
}
