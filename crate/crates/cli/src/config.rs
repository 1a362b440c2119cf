//! Run settings: defaults, then a JSON config file, then command-line flags.

use std::path::Path;

use clap::Args;
use serde::{Deserialize, Serialize};

use scramble_core::bits::BitVec;
use scramble_core::ensembles::{default_cadence, default_horizon, EnsembleSpec, Family, Fraction};
use scramble_core::tableau::{parse_gate_list, GateOp};
use scramble_core::BasisOperatorLabel;

use crate::CliError;

/// Every tunable knob. `None` means "not set at this layer".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// System sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',', global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,

    /// Entropy region as a fraction of N, e.g. 1/4.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Fraction>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,

    /// Master seed; realization seeds are derived from it.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Scrambling cutoff below the saturation entropy.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    /// Timesteps per realization [default: ceil(40 ln N)].
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,

    /// Record every this many steps [default: 1 for N <= 520, else 5; 1 for otoc].
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cadence: Option<usize>,

    /// Circuit family: parallel or nearest-neighbor.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,

    /// V operator: C3, T3C3, identity, or a gate list like "T(2) C3(0,1,2)".
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_gates: Option<String>,

    /// Initial basis operator as bits (0 = X, 1 = Y), zero padded to N; "zeros" for all X.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w0: Option<String>,

    /// First time of the saturation fit window.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_start: Option<usize>,

    /// Last time of the saturation fit window [default: last time with deficit >= 1].
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_end: Option<usize>,

    /// Largest N for the oracle checks.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,

    /// Random cases per oracle check.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cases: Option<usize>,

    /// Gates per random circuit in the oracle checks.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit_len: Option<usize>,

    /// Region size for the plateau average [default: support of V].
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        Settings { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Settings {
    pub fn defaults() -> Self {
        Self {
            n: Some(vec![120]),
            m: Some("1/4".parse().expect("valid fraction")),
            realizations: Some(100),
            seed: Some(0),
            epsilon: Some(10.0),
            family: Some(Family::Parallel),
            v_gates: Some("C3".into()),
            w0: Some("zeros".into()),
            fit_start: Some(50),
            max_n: Some(8),
            cases: Some(50),
            circuit_len: Some(40),
            ..Self::default()
        }
    }

    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        overlay!(
            self, top, n, m, realizations, seed, epsilon, horizon, cadence, family, v_gates, w0,
            fit_start, fit_end, max_n, cases, circuit_len, region
        )
    }

    /// Reads a config file. A run manifest is accepted too; its recorded
    /// settings are used, provided it came from `subcommand`.
    pub fn from_file(path: &Path, subcommand: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        let bad = |e: serde_json::Error| CliError::Config(format!("{}: {e}", path.display()));
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
        if let Some(obj) = value.as_object_mut() {
            if let Some(recorded) = obj.get("subcommand").and_then(|s| s.as_str()) {
                if recorded != subcommand {
                    return Err(CliError::Config(format!(
                        "{} is a manifest of `{recorded}`, not `{subcommand}`",
                        path.display()
                    )));
                }
                value = obj.remove("config").unwrap_or_default();
            } else if let Some(v) = obj.remove("version") {
                if v != 1 {
                    return Err(CliError::Config(format!("unsupported config version {v}")));
                }
            }
        }
        serde_json::from_value(value).map_err(bad)
    }

    pub fn sizes(&self) -> Result<&[usize], CliError> {
        match self.n.as_deref() {
            Some(n) if !n.is_empty() => Ok(n),
            _ => Err(CliError::Config("no system sizes given".into())),
        }
    }

    /// The ensemble for size `n`, validated.
    pub fn ensemble(&self, n: usize) -> Result<EnsembleSpec, CliError> {
        let spec = EnsembleSpec {
            n_qubits: n,
            family: self.family.unwrap_or(Family::Parallel),
            realizations: self.realizations.unwrap_or(100),
            max_t: self.horizon.unwrap_or_else(|| default_horizon(n)),
            master_seed: self.seed.unwrap_or(0),
            entropy_fraction: self.m.unwrap_or(Fraction::new(1, 4)?),
            epsilon: self.epsilon.unwrap_or(10.0),
            entropy_cadence: self.cadence.unwrap_or_else(|| default_cadence(n)),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn v_gates(&self) -> Result<Vec<GateOp>, CliError> {
        let text = self.v_gates.as_deref().unwrap_or("C3");
        match named_v(text) {
            Some(v) => Ok(v),
            None => Ok(parse_gate_list(text)?),
        }
    }

    pub fn w0(&self, n: usize) -> Result<BasisOperatorLabel, CliError> {
        let text = self.w0.as_deref().unwrap_or("zeros").trim();
        if text.eq_ignore_ascii_case("zeros") {
            return Ok(BasisOperatorLabel::all_x(n));
        }
        let given = BitVec::parse_bit_string(text)?;
        if given.len() > n {
            return Err(CliError::Config(format!("w0 has {} bits but N = {n}", given.len())));
        }
        let mut bits = BitVec::zeros(n);
        for i in given.iter_ones() {
            bits.set(i, true);
        }
        Ok(BasisOperatorLabel::from_bits(bits))
    }
}

/// The V catalog: `C3` on qubits 0, 1, 2 (control 0), `T3C3` adds `T` on qubit 2.
fn named_v(name: &str) -> Option<Vec<GateOp>> {
    match name.trim().to_ascii_uppercase().as_str() {
        "C3" => Some(vec![GateOp::c3(0, 1, 2)]),
        "T3C3" => Some(vec![GateOp::T(2), GateOp::c3(0, 1, 2)]),
        "IDENTITY" | "I" | "" => Some(vec![]),
        _ => None,
    }
}
