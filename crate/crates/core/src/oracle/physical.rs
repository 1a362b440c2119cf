//! Literal operator conjugation by physical gate unitaries.
//!
//! Gate conventions on the physical Hilbert space:
//!
//! * `T = diag(1, e^{i pi/4})`, conjugating as `W -> T^dagger W T`.
//! * `C3(c; a, b) = CX(a -> c) CX(b -> c) CZ(c, a) T_c^6 T_a^6`, where
//!   `CX(u -> v)` has control `u` and target `v`.
//!
//! A gate list `[g1, g2, ...]` evolves `W -> (g1 g2 ...)^dagger W (g1 g2 ...)`,
//! matching the order in which the tableau applies super-gates.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::DenseSuperState;
use super::{apply_local, local_dagger, local_mul};
use crate::pauli::BasisOperatorLabel;
use crate::tableau::GateOp;
use crate::{Error, Result};

pub const MAX_PHYSICAL_QUBITS: usize = 6;

pub type Operator = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn diag(entries: &[Complex64]) -> Vec<Complex64> {
    let dim = entries.len();
    let mut m = vec![ZERO; dim * dim];
    for (i, e) in entries.iter().enumerate() {
        m[i * dim + i] = *e;
    }
    m
}

/// Three-qubit matrix from a map on basis indices with phases.
fn permutation_with_phase(f: impl Fn(usize) -> (usize, Complex64)) -> Vec<Complex64> {
    let mut m = vec![ZERO; 64];
    for l in 0..8 {
        let (out, phase) = f(l);
        m[out * 8 + l] = phase;
    }
    m
}

/// Physical gate matrix (row-major) on `gate.qubits()` in role order.
pub fn physical_gate_matrix(gate: &GateOp) -> Vec<Complex64> {
    let t_phase = Complex64::from_polar(1.0, FRAC_PI_4);
    match gate {
        GateOp::T(_) => diag(&[ONE, t_phase]),
        GateOp::TInv(_) => diag(&[ONE, t_phase.conj()]),
        GateOp::Swap(..) => {
            let mut m = vec![ZERO; 16];
            for l in 0..4usize {
                m[(((l & 1) << 1) | (l >> 1)) * 4 + l] = ONE;
            }
            m
        }
        GateOp::C3 { .. } => {
            // local bits: 0 = control c, 1 = a, 2 = b
            let bit = |l: usize, j: usize| (l >> j) & 1;
            let cx_a_to_c = permutation_with_phase(|l| (l ^ bit(l, 1), ONE));
            let cx_b_to_c = permutation_with_phase(|l| (l ^ bit(l, 2), ONE));
            let cz = permutation_with_phase(|l| (l, if bit(l, 0) & bit(l, 1) == 1 { -ONE } else { ONE }));
            let t6 = t_phase.powi(6);
            let t6_ca = permutation_with_phase(|l| {
                let mut ph = ONE;
                if bit(l, 0) == 1 {
                    ph *= t6;
                }
                if bit(l, 1) == 1 {
                    ph *= t6;
                }
                (l, ph)
            });
            [cx_b_to_c, cz, t6_ca]
                .iter()
                .fold(cx_a_to_c, |acc, m| local_mul(&acc, m))
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PHYSICAL_QUBITS {
        return Err(Error::SizeLimit {
            n,
            max: MAX_PHYSICAL_QUBITS,
        });
    }
    Ok(())
}

/// Replaces `m` by `local * m`, acting on the row index.
fn left_apply(m: &mut Operator, qubits: &[usize], local: &[Complex64]) {
    let dim = m.nrows();
    for mut col in m.column_iter_mut() {
        let mut v: Vec<Complex64> = col.iter().copied().collect();
        apply_local(&mut v, qubits, local);
        for i in 0..dim {
            col[i] = v[i];
        }
    }
}

/// `g^dagger W g` for a single gate.
fn conjugate(w: &Operator, gate: &GateOp) -> Operator {
    let qubits = gate.qubits();
    let g = physical_gate_matrix(gate);
    let g_dag = local_dagger(&g);
    // g^dagger W, then (g^dagger (g^dagger W)^dagger)^dagger = g^dagger W g
    let mut a = w.clone();
    left_apply(&mut a, &qubits, &g_dag);
    let mut b = a.adjoint();
    left_apply(&mut b, &qubits, &g_dag);
    b.adjoint()
}

/// Full-space unitary `g1 g2 ... gk` for a gate list.
pub fn circuit_unitary(n: usize, gates: &[GateOp]) -> Result<Operator> {
    check_size(n)?;
    let mut u = Operator::identity(1 << n, 1 << n);
    // left-multiplying in reverse builds g1 g2 ... gk
    for g in gates.iter().rev() {
        g.validate(n)?;
        left_apply(&mut u, &g.qubits(), &physical_gate_matrix(g));
    }
    Ok(u)
}

/// The Pauli string `prod_i (X or Y)_i` selected by `label`.
pub fn basis_operator(label: &BasisOperatorLabel) -> Result<Operator> {
    let n = label.n_qubits();
    check_size(n)?;
    let x = Operator::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let y = Operator::from_row_slice(2, 2, &[ZERO, -Complex64::i(), Complex64::i(), ZERO]);
    let mut m = Operator::identity(1, 1);
    for b in label.bits.iter() {
        m = if b { &y } else { &x }.kronecker(&m);
    }
    Ok(m)
}

/// `W(t)` obtained by conjugating the basis operator `w0` gate by gate.
pub fn conjugation_oracle(w0: &BasisOperatorLabel, gates: &[GateOp]) -> Result<Operator> {
    let n = w0.n_qubits();
    let mut w = basis_operator(w0)?;
    for g in gates {
        g.validate(n)?;
        w = conjugate(&w, g);
    }
    Ok(w)
}

/// Expands `w` over the X/Y strings, `c_b = Tr(P_b w) / 2^N`.
///
/// Also returns the weight `Tr(w^dagger w)/2^N - sum |c_b|^2` left outside the
/// X/Y subspace, which vanishes for operators inside it.
pub fn operator_to_super_state(w: &Operator) -> Result<(DenseSuperState, f64)> {
    let dim = w.nrows();
    let n = dim.trailing_zeros() as usize;
    let norm = dim as f64;
    let amps: Vec<Complex64> = (0..dim)
        .map(|b| {
            let p = basis_operator(&BasisOperatorLabel::from_index(b, n))?;
            Ok((&p * w).trace() / norm)
        })
        .collect::<Result<_>>()?;
    let total = (w.adjoint() * w).trace().re / norm;
    let captured: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    Ok((DenseSuperState::from_amplitudes(n, amps)?, total - captured))
}

/// `F = Tr(W(t)^dagger V^dagger W(t) V) / 2^N` with `V = v1 v2 ...`.
pub fn trace_otoc(
    w0: &BasisOperatorLabel,
    circuit: &[GateOp],
    v_gates: &[GateOp],
) -> Result<Complex64> {
    let n = w0.n_qubits();
    let w = conjugation_oracle(w0, circuit)?;
    let v = circuit_unitary(n, v_gates)?;
    let prod = w.adjoint() * v.adjoint() * &w * v;
    Ok(prod.trace() / (1u64 << n) as f64)
}
