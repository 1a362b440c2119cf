//! Brute-force references for differential testing.
//!
//! Two tiers with different size ceilings:
//!
//! * [`dense`]: the operator-space state `|W>` as a vector of `2^N`
//!   amplitudes over X/Y strings, evolved with the super-gate matrices
//!   (`N <= 12`).
//! * [`physical`]: `W(t)` as a `2^N x 2^N` matrix, conjugated by the literal
//!   physical gate unitaries, with `C3` expanded into its `CX`, `CZ` and `T^6`
//!   factors (`N <= 6`). This is the only tier that exercises the
//!   physical-to-operator-space identification instead of assuming it.
//!
//! [`check`] wires both tiers against the tableau code.

pub mod check;
pub mod dense;
pub mod physical;

pub use check::{run_checks, CheckConfig, CheckOutcome, CheckReport, GateApplier};
pub use dense::{dense_apply, dense_entropy, DenseSuperState, MAX_DENSE_QUBITS};
pub use physical::{conjugation_oracle, trace_otoc, MAX_PHYSICAL_QUBITS};

use num_complex::Complex64;

/// Multiplies the `2^k` amplitudes addressed by `qubits` by `local`.
///
/// Local index bit `j` corresponds to `qubits[j]`; global index bit `q`
/// corresponds to qubit `q`.
pub(crate) fn apply_local(amps: &mut [Complex64], qubits: &[usize], local: &[Complex64]) {
    let k = qubits.len();
    let dim = 1usize << k;
    debug_assert_eq!(local.len(), dim * dim);
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|l| {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| (l >> j) & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        })
        .collect();
    let mut gathered = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            gathered[l] = amps[base | off];
        }
        for (row, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, g) in gathered.iter().enumerate() {
                acc += local[row * dim + col] * g;
            }
            amps[base | off] = acc;
        }
    }
}

/// Row-major product of two square local matrices.
pub(crate) fn local_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let dim = (a.len() as f64).sqrt() as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

pub(crate) fn local_dagger(a: &[Complex64]) -> Vec<Complex64> {
    let dim = (a.len() as f64).sqrt() as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}
