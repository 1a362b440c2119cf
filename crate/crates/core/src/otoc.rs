//! Out-of-time-ordered correlators `F(t) = Tr(W(t)^dagger V^dagger W(t) V) / 2^N`.
//!
//! `F` is the overlap of the basis operator `|w0>` with the echo state
//! `U^dagger V U |w0>`. The echo is a stabilizer state whenever every gate is
//! super-Clifford, and its overlap with a basis state is either zero or
//! `2^{-k/2}` for an integer `k`, so results are exact.
//!
//! The overlap of two stabilizer states is only determined up to sign. For
//! the V operators used here (`C3`, `T C3` on a few qubits) the correlator is
//! never negative, and [`OtocValue`] is read as `F` itself.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gf2::RowOp;
use crate::oracle::physical::{basis_operator, circuit_unitary};
use crate::pauli::{BasisOperatorLabel, SuperPauli};
use crate::tableau::{GateOp, Tableau};
use crate::{Error, Result};

/// Largest V support accepted by [`plateau_value`].
pub const MAX_PLATEAU_QUBITS: usize = 5;

/// Either zero or `2^{-k/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OtocValue {
    pub is_zero: bool,
    pub k: u32,
}

impl OtocValue {
    pub const ONE: Self = Self { is_zero: false, k: 0 };

    pub fn zero() -> Self {
        Self { is_zero: true, k: 0 }
    }

    pub fn from_k(k: u32) -> Self {
        Self { is_zero: false, k }
    }

    pub fn value(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            (-0.5 * self.k as f64).exp2()
        }
    }
}

impl fmt::Display for OtocValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "0")
        } else {
            write!(f, "2^(-{}/2)", self.k)
        }
    }
}

/// Gates taking `|00...0>` to `|w0>` up to sign: `T^2` on each site whose
/// label bit is set, since `T T |0> = -|1>`.
pub fn basis_rotation(w0: &BasisOperatorLabel) -> Vec<GateOp> {
    w0.bits.iter_ones().flat_map(|q| [GateOp::T(q), GateOp::T(q)]).collect()
}

/// Tableau of the echo state: rotation to `w0`, the circuit, `V`, the
/// inverse circuit and the inverse rotation, starting from `|00...0>`.
pub fn echo_tableau(circuit: &[GateOp], v_gates: &[GateOp], w0: &BasisOperatorLabel) -> Result<Tableau> {
    let n = w0.n_qubits();
    let rotation = basis_rotation(w0);
    let mut t = Tableau::new_computational(&BasisOperatorLabel::all_x(n));
    t.apply_sequence(&rotation, false)?;
    t.apply_sequence(circuit, false)?;
    t.apply_sequence(v_gates, false)?;
    t.apply_sequence(circuit, true)?;
    t.apply_sequence(&rotation, true)?;
    Ok(t)
}

/// Overlap `|<target|psi>|` of the stabilizer state of `t` with a basis state.
///
/// Row-reduces `(X | Z)` on the X block while multiplying the generators
/// along. With `k` pivots, the remaining `N - k` generators are pure Z strings;
/// each must act on `|target>` with eigenvalue `+1` or the overlap vanishes.
pub fn inner_product_with_basis(t: &Tableau, target: &BasisOperatorLabel) -> Result<OtocValue> {
    let n = t.n_qubits();
    if target.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            left: target.n_qubits(),
            right: n,
        });
    }
    // rows (x_1 .. x_N | z_1 .. z_N), one per generator
    let v = t.entropy_matrix();
    let m = v.select_rows((0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1))).transpose();
    let mut gens = t.generators();
    let (_, k) = m.row_echelon_with_callback(0..n, |op| match op {
        RowOp::Swap(a, b) => gens.swap(a, b),
        RowOp::Add { src, dst } => {
            // gens[dst] *= gens[src] without cloning
            if src < dst {
                let (lo, hi) = gens.split_at_mut(dst);
                hi[0].mul_assign_unchecked(&lo[src]);
            } else {
                let (lo, hi) = gens.split_at_mut(src);
                lo[dst].mul_assign_unchecked(&hi[0]);
            }
        }
    });
    for g in &gens[k..] {
        debug_assert!(g.is_pure_z());
        if g.sign != g.z.dot(&target.bits) {
            return Ok(OtocValue::zero());
        }
    }
    Ok(OtocValue::from_k(k as u32))
}

/// `F` at each requested time, where time `t` runs the first `t` steps.
///
/// Each time point re-runs the echo from scratch.
pub fn otoc_trace(
    steps: &[Vec<GateOp>],
    v_gates: &[GateOp],
    w0: &BasisOperatorLabel,
    times: &[usize],
) -> Result<Vec<OtocValue>> {
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("evaluation times must be increasing".into()));
    }
    if let Some(&last) = times.last() {
        if last > steps.len() {
            return Err(Error::Config(format!(
                "time {last} exceeds the {} sampled steps",
                steps.len()
            )));
        }
    }
    let target = BasisOperatorLabel::all_x(w0.n_qubits());
    let mut circuit = Vec::new();
    let mut done = 0;
    times
        .iter()
        .map(|&time| {
            for step in &steps[done..time] {
                circuit.extend_from_slice(step);
            }
            done = time;
            inner_product_with_basis(&echo_tableau(&circuit, v_gates, w0)?, &target)
        })
        .collect()
}

/// Late-time average `sum_i Tr(P_i V^dagger P_i V) / (d 2^n)` over the X/Y
/// strings `P_i` of the first `region_size` qubits, `d = 2^n`.
pub fn plateau_value(v_gates: &[GateOp], region_size: usize) -> Result<f64> {
    if region_size == 0 || region_size > MAX_PLATEAU_QUBITS {
        return Err(Error::SizeLimit {
            n: region_size,
            max: MAX_PLATEAU_QUBITS,
        });
    }
    if v_gates.iter().flat_map(GateOp::qubits).any(|q| q >= region_size) {
        return Err(Error::SupportOutsideRegion { region: region_size });
    }
    let v = circuit_unitary(region_size, v_gates)?;
    let v_dag = v.adjoint();
    let dim = 1usize << region_size;
    let mut total = Complex64::new(0.0, 0.0);
    for index in 0..dim {
        let p = basis_operator(&BasisOperatorLabel::from_index(index, region_size))?;
        total += (&p * &v_dag * &p * &v).trace();
    }
    Ok((total / (dim * dim) as f64).re)
}

/// Whether a super-Pauli fixes the basis state `|target>`.
pub fn stabilizes_basis(p: &SuperPauli, target: &BasisOperatorLabel) -> bool {
    p.is_pure_z() && p.sign == p.z.dot(&target.bits)
}
