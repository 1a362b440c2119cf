//! Least-squares fits: exponential approach to saturation and `t* = a ln N + b`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EntropyCurve;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub count: usize,
    pub rms: f64,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    /// Range of the independent variable that entered the fit.
    pub window: (f64, f64),
    pub residuals: ResidualSummary,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }
}

/// Ordinary least squares line through `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: ResidualSummary,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("{n} points cannot determine a line")));
    }
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mean_x).powi(2)).sum();
    if sxx <= f64::EPSILON * mean_x.abs().max(1.0) * nf {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        residuals: ResidualSummary {
            count: n,
            rms: (ss_res / nf).sqrt(),
            max_abs: residuals.iter().fold(0.0, |m, r| r.abs().max(m)),
        },
    })
}

/// Time range for the saturation fit. `end = None` stops at the last recorded
/// time whose mean deficit `S_sat - S` is still at least `min_deficit`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: usize,
    pub end: Option<usize>,
    pub min_deficit: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            start: 50,
            end: None,
            min_deficit: 1.0,
        }
    }
}

/// Fits `ln dS(t) = ln(alpha) - lambda t` with `dS = (S_sat - S(t)) / N`.
pub fn fit_exponential_saturation(curve: &EntropyCurve, window: &FitWindow) -> Result<FitResult> {
    let n = curve.n_qubits as f64;
    let points: Vec<(f64, f64)> = curve
        .times
        .iter()
        .zip(&curve.mean_entropy)
        .filter(|(&t, _)| t >= window.start && window.end.is_none_or(|end| t <= end))
        .map(|(&t, &s)| (t as f64, curve.saturation - s))
        .collect();
    let points: Vec<(f64, f64)> = match window.end {
        Some(_) => points,
        None => {
            let last = points.iter().rposition(|&(_, d)| d >= window.min_deficit);
            points[..last.map_or(0, |i| i + 1)].to_vec()
        }
    };
    if points.len() < 2 {
        return Err(Error::FitWindow(format!(
            "fewer than two points in the window starting at t = {}",
            window.start
        )));
    }
    if let Some(&(t, d)) = points.iter().find(|&&(_, d)| d <= 0.0) {
        return Err(Error::FitWindow(format!("curve is saturated at t = {t} (deficit {d})")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| (p.1 / n).ln()).collect();
    let line = fit_line(&x, &y)?;
    Ok(FitResult {
        params: BTreeMap::from([
            ("lambda".to_string(), -line.slope),
            ("alpha".to_string(), line.intercept.exp()),
        ]),
        r_squared: line.r_squared,
        window: (x[0], x[x.len() - 1]),
        residuals: line.residuals,
    })
}

/// Fits `t* = a ln N + b` to `(N, t*)` pairs with at least two distinct `N`.
pub fn fit_log_scaling(points: &[(f64, f64)]) -> Result<FitResult> {
    if let Some(&(n, _)) = points.iter().find(|p| !p.0.is_finite() || p.0 <= 0.0) {
        return Err(Error::DegenerateFit(format!("system size {n} has no logarithm")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let line = fit_line(&x, &y)?;
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    Ok(FitResult {
        params: BTreeMap::from([("a".to_string(), line.slope), ("b".to_string(), line.intercept)]),
        r_squared: line.r_squared,
        window: (lo, hi),
        residuals: line.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(n: usize, alpha: f64, lambda: f64, times: std::ops::Range<usize>) -> EntropyCurve {
        let sat = n as f64 / 4.0;
        let times: Vec<usize> = times.collect();
        let mean = times
            .iter()
            .map(|&t| sat - alpha * n as f64 * (-lambda * t as f64).exp())
            .collect();
        EntropyCurve::from_means(n, sat, times, mean)
    }

    #[test]
    fn exact_exponential_recovery() {
        let curve = synthetic(1000, 0.25, 0.06, 0..200);
        let fit = fit_exponential_saturation(
            &curve,
            &FitWindow {
                start: 0,
                end: Some(150),
                min_deficit: 0.0,
            },
        )
        .unwrap();
        assert!((fit.param("lambda") - 0.06).abs() < 1e-10);
        assert!((fit.param("alpha") - 0.25).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
        assert_eq!(fit.window, (0.0, 150.0));
    }

    #[test]
    fn default_window_stops_at_small_deficit() {
        let curve = synthetic(1000, 0.25, 0.06, 0..300);
        let fit = fit_exponential_saturation(&curve, &FitWindow::default()).unwrap();
        assert_eq!(fit.window.0, 50.0);
        // 250 e^{-0.06 t} >= 1 up to t = 92
        assert_eq!(fit.window.1, 92.0);
    }

    #[test]
    fn saturated_window_is_an_error() {
        let curve = EntropyCurve::from_means(40, 10.0, vec![0, 1, 2, 3], vec![0.0, 5.0, 10.0, 10.0]);
        let w = FitWindow {
            start: 1,
            end: Some(3),
            min_deficit: 0.0,
        };
        assert!(matches!(fit_exponential_saturation(&curve, &w), Err(Error::FitWindow(_))));
        assert!(matches!(
            fit_exponential_saturation(&curve, &FitWindow::default()),
            Err(Error::FitWindow(_))
        ));
    }

    #[test]
    fn log_scaling_recovery() {
        let points: Vec<(f64, f64)> = [500.0, 1000.0, 1500.0, 2000.0, 3000.0]
            .iter()
            .map(|&n: &f64| (n, 15.61 * n.ln() - 24.18))
            .collect();
        let fit = fit_log_scaling(&points).unwrap();
        assert!((fit.param("a") - 15.61).abs() < 1e-9);
        assert!((fit.param("b") + 24.18).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_points_interpolate() {
        let fit = fit_log_scaling(&[(120.0, 60.0), (1000.0, 95.0)]).unwrap();
        assert_eq!(fit.r_squared, 1.0);
        assert!(fit.residuals.max_abs < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_log_scaling(&[(120.0, 60.0)]), Err(Error::DegenerateFit(_))));
        assert!(matches!(
            fit_log_scaling(&[(120.0, 60.0), (120.0, 62.0)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_log_scaling(&[(0.0, 1.0), (10.0, 2.0)]).is_err());
    }

    proptest! {
        #[test]
        fn exponential_round_trip(alpha in 0.01f64..1.0, lambda in 0.005f64..0.2, start in 0usize..40) {
            let curve = synthetic(400, alpha, lambda, 0..start + 30);
            let fit = fit_exponential_saturation(&curve, &FitWindow { start, end: None, min_deficit: 0.0 }).unwrap();
            prop_assert!((fit.param("lambda") - lambda).abs() < 1e-8 * lambda.max(1.0));
            prop_assert!((fit.param("alpha") / alpha - 1.0).abs() < 1e-8);
            prop_assert!(fit.r_squared <= 1.0 + 1e-12);
        }

        #[test]
        fn r_squared_bounded(points in prop::collection::vec((1.0f64..5000.0, -50.0f64..200.0), 3..20)) {
            if let Ok(fit) = fit_log_scaling(&points) {
                prop_assert!(fit.r_squared <= 1.0 + 1e-12);
            }
        }
    }
}
