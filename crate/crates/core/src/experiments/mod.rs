//! Monte Carlo drivers and post-processing.
//!
//! Per-realization results are exact integers (entropies) or exact
//! [`OtocValue`](crate::otoc::OtocValue)s. Aggregates are computed from
//! integer sums and histograms, so they do not depend on the order in which
//! realizations finish.

pub mod exec;
pub mod fit;
mod otoc_ensemble;

use serde::{Deserialize, Serialize};

pub use exec::{map_indexed, with_threads, Execution};
pub use fit::{fit_exponential_saturation, fit_line, fit_log_scaling, FitResult, FitWindow};
pub use otoc_ensemble::{run_otoc_ensemble, KHistogram, OtocTrace};

use crate::ensembles::{sample_step, EnsembleSpec};
use crate::entropy::prefix_entropy;
use crate::pauli::BasisOperatorLabel;
use crate::tableau::Tableau;
use crate::{Error, Result};

/// Mean prefix entropy against time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub times: Vec<usize>,
    pub mean_entropy: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_realizations: usize,
    pub n_qubits: usize,
    /// `floor(m N)`.
    pub saturation: f64,
    pub spec: Option<EnsembleSpec>,
}

impl EntropyCurve {
    /// A single noiseless curve, for synthetic data and fits of external input.
    pub fn from_means(n_qubits: usize, saturation: f64, times: Vec<usize>, mean_entropy: Vec<f64>) -> Self {
        assert_eq!(times.len(), mean_entropy.len());
        Self {
            std_err: vec![0.0; times.len()],
            times,
            mean_entropy,
            n_realizations: 1,
            n_qubits,
            saturation,
            spec: None,
        }
    }
}

/// Every realization's entropy at every recorded time.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropySamples {
    pub spec: EnsembleSpec,
    pub times: Vec<usize>,
    /// `traces[r][i]` is realization `r` at `times[i]`.
    pub traces: Vec<Vec<u32>>,
}

impl EntropySamples {
    /// Mean and standard error from exact integer sums.
    pub fn curve(&self) -> EntropyCurve {
        let r = self.traces.len() as u128;
        let mut mean_entropy = Vec::with_capacity(self.times.len());
        let mut std_err = Vec::with_capacity(self.times.len());
        for i in 0..self.times.len() {
            let (sum, sum_sq) = self.traces.iter().fold((0u128, 0u128), |(s, q), tr| {
                let v = tr[i] as u128;
                (s + v, q + v * v)
            });
            mean_entropy.push(sum as f64 / r as f64);
            std_err.push(if r > 1 {
                // (R sum x^2 - (sum x)^2) / (R^2 (R - 1)) is the squared standard error
                let num = r * sum_sq - sum * sum;
                (num as f64 / (r * r * (r - 1)) as f64).sqrt()
            } else {
                0.0
            });
        }
        EntropyCurve {
            times: self.times.clone(),
            mean_entropy,
            std_err,
            n_realizations: self.traces.len(),
            n_qubits: self.spec.n_qubits,
            saturation: self.spec.region_size() as f64,
            spec: Some(self.spec.clone()),
        }
    }
}

/// Entropy trace of one realization, starting from the all-X operator.
pub fn entropy_trace(spec: &EnsembleSpec, realization: usize) -> Result<Vec<u32>> {
    let n = spec.n_qubits;
    let n_a = spec.region_size();
    let cadence = spec.entropy_cadence;
    let mut rng = spec.rng(realization);
    let mut t = Tableau::new_computational(&BasisOperatorLabel::all_x(n));
    let mut trace = Vec::with_capacity(spec.max_t / cadence + 1);
    for step in 0..=spec.max_t {
        if step % cadence == 0 {
            trace.push(prefix_entropy(&t, n_a)?);
        }
        if step == spec.max_t {
            break;
        }
        for g in sample_step(spec.family, n, &mut rng)? {
            t.apply_gate(&g)?;
        }
    }
    Ok(trace)
}

pub fn sample_entropy_ensemble(spec: &EnsembleSpec, exec: Execution) -> Result<EntropySamples> {
    spec.validate()?;
    let traces = map_indexed(exec, spec.realizations, |r| entropy_trace(spec, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropySamples {
        spec: spec.clone(),
        times: spec.entropy_times(),
        traces,
    })
}

pub fn run_entropy_ensemble(spec: &EnsembleSpec, exec: Execution) -> Result<EntropyCurve> {
    Ok(sample_entropy_ensemble(spec, exec)?.curve())
}

/// First recorded time with `S >= S_sat - epsilon`, or the fact that the
/// horizon ended first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ScramblingTime {
    Reached { t_star: usize },
    Unsaturated { horizon: usize },
}

impl ScramblingTime {
    pub fn t_star(&self) -> Option<usize> {
        match *self {
            ScramblingTime::Reached { t_star } => Some(t_star),
            ScramblingTime::Unsaturated { .. } => None,
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn first_crossing(times: &[usize], values: impl Iterator<Item = f64>, threshold: f64) -> ScramblingTime {
    match values.zip(times).find(|(v, _)| *v >= threshold) {
        Some((_, &t)) => ScramblingTime::Reached { t_star: t },
        None => ScramblingTime::Unsaturated {
            horizon: times.last().copied().unwrap_or(0),
        },
    }
}

/// Scrambling time of the averaged curve.
pub fn extract_scrambling_time(curve: &EntropyCurve, epsilon: f64) -> Result<ScramblingTime> {
    check_epsilon(epsilon)?;
    Ok(first_crossing(
        &curve.times,
        curve.mean_entropy.iter().copied(),
        curve.saturation - epsilon,
    ))
}

/// Scrambling times extracted per realization, then averaged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerRealizationTimes {
    /// `None` when no realization saturated.
    pub mean: Option<f64>,
    pub std_err: f64,
    pub reached: usize,
    pub unsaturated: usize,
    pub times: Vec<ScramblingTime>,
}

pub fn per_realization_scrambling_times(samples: &EntropySamples, epsilon: f64) -> Result<PerRealizationTimes> {
    check_epsilon(epsilon)?;
    let threshold = samples.spec.region_size() as f64 - epsilon;
    let times: Vec<ScramblingTime> = samples
        .traces
        .iter()
        .map(|tr| first_crossing(&samples.times, tr.iter().map(|&s| s as f64), threshold))
        .collect();
    let reached: Vec<u128> = times.iter().filter_map(|t| t.t_star()).map(|t| t as u128).collect();
    let k = reached.len() as u128;
    let (sum, sum_sq) = reached.iter().fold((0u128, 0u128), |(s, q), &t| (s + t, q + t * t));
    let std_err = if k > 1 {
        ((k * sum_sq - sum * sum) as f64 / (k * k * (k - 1)) as f64).sqrt()
    } else {
        0.0
    };
    Ok(PerRealizationTimes {
        mean: (k > 0).then(|| sum as f64 / k as f64),
        std_err,
        reached: reached.len(),
        unsaturated: times.len() - reached.len(),
        times,
    })
}
