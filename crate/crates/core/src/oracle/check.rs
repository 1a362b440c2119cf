//! Differential checks of the tableau code against the dense oracles.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::dense::{dense_entropy, DenseSuperState, MAX_DENSE_QUBITS};
use super::physical::{conjugation_oracle, operator_to_super_state, trace_otoc, MAX_PHYSICAL_QUBITS};
use crate::bits::BitVec;
use crate::ensembles::realization_seed;
use crate::entropy::{region_entropy, Region};
use crate::experiments::exec::{map_indexed, Execution};
use crate::otoc::{echo_tableau, inner_product_with_basis};
use crate::pauli::BasisOperatorLabel;
use crate::tableau::{random_circuit, GateOp, Tableau};
use crate::{Error, Result};

/// How a check advances the tableau by one gate. Swappable so a deliberately
/// broken update can be fed through the same checks.
pub type GateApplier = fn(&mut Tableau, &GateOp) -> Result<()>;

pub fn standard_applier(t: &mut Tableau, g: &GateOp) -> Result<()> {
    t.apply_gate(g)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckConfig {
    pub max_n: usize,
    pub cases: usize,
    pub circuit_len: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            max_n: 8,
            cases: 50,
            circuit_len: 40,
            seed: 0,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn collect(name: &str, results: Vec<Option<String>>) -> Self {
        let cases = results.len();
        let failures: Vec<String> = results.into_iter().flatten().collect();
        Self {
            name: name.to_string(),
            cases,
            failures: failures.len(),
            first_failure: failures.into_iter().next(),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} cases, {} failures)", self.name, self.cases, self.failures)?;
        if let Some(msg) = &self.first_failure {
            write!(f, ": {msg}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub config: CheckConfig,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }
}

fn random_label(rng: &mut impl Rng, n: usize) -> BasisOperatorLabel {
    BasisOperatorLabel::from_bits(BitVec::from_bools(&(0..n).map(|_| rng.random()).collect::<Vec<_>>()))
}

/// Runs one case; an error counts as a failure with its message.
fn guard(case: impl FnOnce() -> Result<Option<String>>) -> Option<String> {
    case().unwrap_or_else(|e| Some(format!("error: {e}")))
}

fn case_rng(seed: u64, salt: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(realization_seed(seed ^ salt, case as u64))
}

/// Sizes `2..=max_n` cycled over `cases`.
fn size_for(case: usize, max_n: usize) -> usize {
    2 + case % (max_n - 1)
}

/// After every gate of a random circuit, every generator must fix the dense
/// operator state exactly (to `tolerance`).
pub fn tableau_stabilizes_dense(n: usize, cases: usize, len: usize, seed: u64, tol: f64, applier: GateApplier) -> CheckOutcome {
    let results = map_indexed(Execution::default(), cases, |case| guard(|| {
        let mut rng = case_rng(seed, 0x5EED_0001 ^ n as u64, case);
        let label = random_label(&mut rng, n);
        let gates = random_circuit(&mut rng, n, len);
        let mut t = Tableau::new_computational(&label);
        let mut state = DenseSuperState::basis(&label)?;
        for (step, g) in gates.iter().enumerate() {
            if let Err(e) = applier(&mut t, g) {
                return Ok(Some(format!("N={n} case {case}: {e}")));
            }
            state.apply(g)?;
            for (a, p) in t.generators().iter().enumerate() {
                let r = state.stabilizer_residual(p)?;
                if r > tol {
                    return Ok(Some(format!(
                        "N={n} case {case} gate {step} ({g}): generator {a} {p} residual {r:.3e}"
                    )));
                }
            }
        }
        Ok(None)
    }));
    CheckOutcome::collect(&format!("tableau-vs-dense N={n}"), results)
}

/// Literal conjugation by physical gate matrices must agree with the
/// operator-space evolution amplitude by amplitude, and stay inside the
/// X/Y subspace.
pub fn conjugation_matches_dense(n: usize, cases: usize, len: usize, seed: u64, tol: f64) -> CheckOutcome {
    let results = map_indexed(Execution::default(), cases, |case| guard(|| {
        let mut rng = case_rng(seed, 0x5EED_0002 ^ n as u64, case);
        let label = random_label(&mut rng, n);
        let gates = random_circuit(&mut rng, n, len);
        let w = match conjugation_oracle(&label, &gates) {
            Ok(w) => w,
            Err(e) => return Ok(Some(e.to_string())),
        };
        let (from_matrix, leak) = operator_to_super_state(&w)?;
        let mut state = DenseSuperState::basis(&label)?;
        state.apply_all(&gates)?;
        let diff = from_matrix.max_abs_diff(&state);
        Ok((diff > tol || leak.abs() > tol)
            .then(|| format!("N={n} case {case}: amplitude diff {diff:.3e}, leak {leak:.3e}")))
    }));
    CheckOutcome::collect(&format!("conjugation-vs-dense N={n}"), results)
}

/// Tableau entropy over a random region equals the dense Schmidt entropy,
/// and is unchanged by sign flips or a different initial basis operator.
pub fn entropy_matches_dense(max_n: usize, cases: usize, len: usize, seed: u64, tol: f64, applier: GateApplier) -> CheckOutcome {
    let results = map_indexed(Execution::default(), cases, |case| guard(|| {
        let n = size_for(case, max_n);
        let mut rng = case_rng(seed, 0x5EED_0003, case);
        let label = random_label(&mut rng, n);
        let other_label = random_label(&mut rng, n);
        let gates = random_circuit(&mut rng, n, len);
        let size = rng.random_range(1..n);
        let mut qubits: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(qubits.as_mut_slice(), &mut rng);
        qubits.truncate(size);
        let region = Region::new(qubits, n)?;

        let mut t = Tableau::new_computational(&label);
        let mut t_other = Tableau::new_computational(&other_label);
        for g in &gates {
            if let Err(e) = applier(&mut t, g) {
                return Ok(Some(e.to_string()));
            }
            applier(&mut t_other, g)?;
        }
        let mut state = DenseSuperState::basis(&label)?;
        state.apply_all(&gates)?;
        let s_tab = region_entropy(&t, &region)?;
        let s_dense = dense_entropy(&state, &region)?;
        if (s_dense - s_tab as f64).abs() > tol.max(1e-8) {
            return Ok(Some(format!(
                "N={n} case {case} region {:?}: tableau {s_tab} vs dense {s_dense:.6}",
                region.qubits()
            )));
        }
        let mut flipped = t.clone();
        for a in 0..n {
            if rng.random_bool(0.5) {
                flipped.set_sign(a, !flipped.sign(a));
            }
        }
        let s_flip = region_entropy(&flipped, &region)?;
        let s_other = region_entropy(&t_other, &region)?;
        Ok((s_flip != s_tab || s_other != s_tab).then(|| {
            format!("N={n} case {case}: sign-flipped {s_flip}, other basis {s_other}, original {s_tab}")
        }))
    }));
    CheckOutcome::collect("entropy-vs-dense", results)
}

/// The V operators exercised by the OTOC check: identity, `C3` and `T_3 C3`
/// on the first three qubits, plus a random short super-Clifford product.
pub fn otoc_check_v_gates(kind: usize, rng: &mut impl Rng, n: usize) -> Vec<GateOp> {
    match (kind % 4, n) {
        (0, _) => vec![],
        (1, 3..) => vec![GateOp::c3(0, 1, 2)],
        (2, 3..) => vec![GateOp::T(2), GateOp::c3(0, 1, 2)],
        _ => random_circuit(rng, n, 3),
    }
}

/// Echo-tableau OTOC against the literal trace formula.
///
/// Random V products can make `F` negative, which a stabilizer overlap cannot
/// see, so for those only the magnitude is compared.
pub fn otoc_matches_trace(max_n: usize, cases: usize, len: usize, seed: u64, tol: f64) -> CheckOutcome {
    let max_n = max_n.min(MAX_PHYSICAL_QUBITS);
    let results = map_indexed(Execution::default(), cases, |case| guard(|| {
        let n = size_for(case, max_n);
        let mut rng = case_rng(seed, 0x5EED_0004, case);
        let w0 = match case % 3 {
            0 => BasisOperatorLabel::all_x(n),
            1 => BasisOperatorLabel::from_bits(BitVec::unit(n, 0)),
            _ => random_label(&mut rng, n),
        };
        let kind = case / 3;
        let v = otoc_check_v_gates(kind, &mut rng, n);
        let circuit_len = rng.random_range(0..=len);
        let circuit = random_circuit(&mut rng, n, circuit_len);
        let tableau = match echo_tableau(&circuit, &v, &w0) {
            Ok(t) => t,
            Err(e) => return Ok(Some(e.to_string())),
        };
        let value = inner_product_with_basis(&tableau, &BasisOperatorLabel::all_x(n))?;
        let exact = trace_otoc(&w0, &circuit, &v)?;
        // The stabilizer overlap fixes |F| only. F itself is real, and for the
        // named V operators it is never negative, so there the sign must agree too.
        let named = kind % 4 == 0 || (kind % 4 < 3 && n >= 3);
        let reference = if named { exact.re } else { exact.re.abs() };
        let diff = (reference - value.value()).abs().max(exact.im.abs());
        Ok((diff > tol).then(|| {
            let v_str: Vec<String> = v.iter().map(ToString::to_string).collect();
            format!(
                "N={n} case {case} w0={} V=[{}]: tableau {value} vs trace {exact:.6}",
                w0.operator_string(),
                v_str.join(" ")
            )
        }))
    }));
    CheckOutcome::collect("otoc-vs-trace", results)
}

/// Runs every differential property. The dense tier covers `N = 2..=max_n`,
/// the physical tier `N = 2..=min(max_n, 6)`.
pub fn run_checks(config: &CheckConfig, applier: GateApplier) -> Result<CheckReport> {
    if config.max_n > MAX_DENSE_QUBITS {
        return Err(Error::SizeLimit {
            n: config.max_n,
            max: MAX_DENSE_QUBITS,
        });
    }
    if config.max_n < 2 {
        return Err(Error::Config("oracle checks need max_n >= 2".into()));
    }
    let mut outcomes = Vec::new();
    for n in 2..=config.max_n {
        outcomes.push(tableau_stabilizes_dense(
            n,
            config.cases,
            config.circuit_len,
            config.seed,
            config.tolerance,
            applier,
        ));
    }
    for n in 2..=config.max_n.min(MAX_PHYSICAL_QUBITS) {
        outcomes.push(conjugation_matches_dense(
            n,
            config.cases,
            config.circuit_len,
            config.seed,
            config.tolerance,
        ));
    }
    outcomes.push(entropy_matches_dense(
        config.max_n,
        config.cases,
        config.circuit_len,
        config.seed,
        config.tolerance,
        applier,
    ));
    outcomes.push(otoc_matches_trace(
        config.max_n,
        config.cases,
        config.circuit_len,
        config.seed,
        config.tolerance,
    ));
    Ok(CheckReport {
        config: config.clone(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broken_t_sign(t: &mut Tableau, g: &GateOp) -> Result<()> {
        t.apply_gate(g)?;
        if let GateOp::T(_) = g {
            // forget the sign rule on generator 0
            t.set_sign(0, !t.sign(0));
        }
        Ok(())
    }

    #[test]
    fn default_checks_pass() {
        let config = CheckConfig {
            max_n: 6,
            cases: 20,
            ..CheckConfig::default()
        };
        let report = run_checks(&config, standard_applier).unwrap();
        for o in &report.outcomes {
            assert!(o.passed(), "{o}");
        }
    }

    #[test]
    fn sign_bug_is_caught() {
        let config = CheckConfig {
            max_n: 4,
            cases: 10,
            ..CheckConfig::default()
        };
        let report = run_checks(&config, broken_t_sign).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn oversize_is_rejected() {
        let config = CheckConfig {
            max_n: 13,
            ..CheckConfig::default()
        };
        assert!(matches!(
            run_checks(&config, standard_applier),
            Err(Error::SizeLimit { n: 13, max: 12 })
        ));
    }
}
