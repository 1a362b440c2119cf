use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::exec::{map_indexed, Execution};
use crate::ensembles::EnsembleSpec;
use crate::otoc::{otoc_trace, plateau_value, OtocValue, MAX_PLATEAU_QUBITS};
use crate::pauli::BasisOperatorLabel;
use crate::tableau::GateOp;
use crate::{Error, Result};

/// Counts of exact OTOC values at one time.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KHistogram {
    pub zero: u64,
    /// Realizations with `F = 2^{-k/2}`, keyed by `k`.
    pub k: BTreeMap<u32, u64>,
}

impl KHistogram {
    pub fn add(&mut self, value: OtocValue) {
        if value.is_zero {
            self.zero += 1;
        } else {
            *self.k.entry(value.k).or_default() += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.zero + self.k.values().sum::<u64>()
    }

    pub fn count(&self, value: OtocValue) -> u64 {
        if value.is_zero {
            self.zero
        } else {
            self.k.get(&value.k).copied().unwrap_or(0)
        }
    }

    /// Mean of `F`, summed in increasing `k`.
    pub fn mean(&self) -> f64 {
        let sum: f64 = self
            .k
            .iter()
            .map(|(&k, &c)| c as f64 * OtocValue::from_k(k).value())
            .sum();
        sum / self.total() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtocTrace {
    pub times: Vec<usize>,
    pub mean_f: Vec<f64>,
    /// Share of realizations whose `F` differs from the plateau value.
    pub fraction_off_plateau: Vec<f64>,
    pub k_histogram: Vec<KHistogram>,
    pub plateau: f64,
    pub n_realizations: usize,
}

/// The exact value equal to `plateau`, if there is one.
fn plateau_as_otoc(plateau: f64) -> Option<OtocValue> {
    if plateau.abs() < 1e-12 {
        return Some(OtocValue::zero());
    }
    (0..=128)
        .map(OtocValue::from_k)
        .find(|v| (v.value() - plateau).abs() < 1e-9)
}

/// Runs the echo OTOC for every realization at every time in `times`.
pub fn run_otoc_ensemble(
    spec: &EnsembleSpec,
    v_gates: &[GateOp],
    w0: &BasisOperatorLabel,
    times: &[usize],
    exec: Execution,
) -> Result<OtocTrace> {
    spec.validate()?;
    if w0.n_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch {
            left: w0.n_qubits(),
            right: spec.n_qubits,
        });
    }
    for g in v_gates {
        g.validate(spec.n_qubits)?;
    }
    let support = v_gates.iter().flat_map(GateOp::qubits).max().map_or(1, |q| q + 1);
    if support > MAX_PLATEAU_QUBITS {
        return Err(Error::SupportOutsideRegion {
            region: MAX_PLATEAU_QUBITS,
        });
    }
    let plateau = plateau_value(v_gates, support)?;
    let plateau_exact = plateau_as_otoc(plateau);
    let horizon = times.last().copied().unwrap_or(0);

    let per_realization = map_indexed(exec, spec.realizations, |r| {
        let steps = spec.sample_circuit(r, horizon)?;
        otoc_trace(&steps, v_gates, w0, times)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut k_histogram = vec![KHistogram::default(); times.len()];
    for trace in &per_realization {
        for (h, &v) in k_histogram.iter_mut().zip(trace) {
            h.add(v);
        }
    }
    let r = spec.realizations as f64;
    Ok(OtocTrace {
        times: times.to_vec(),
        mean_f: k_histogram.iter().map(KHistogram::mean).collect(),
        fraction_off_plateau: k_histogram
            .iter()
            .map(|h| {
                let on = plateau_exact.map_or(0, |p| h.count(p));
                (h.total() - on) as f64 / r
            })
            .collect(),
        k_histogram,
        plateau,
        n_realizations: spec.realizations,
    })
}
