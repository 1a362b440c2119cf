//! Dense operator-space states over the X/Y string basis.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::apply_local;
use crate::entropy::Region;
use crate::pauli::{BasisOperatorLabel, SuperPauli};
use crate::tableau::GateOp;
use crate::{Error, Result};

pub const MAX_DENSE_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Super-gate matrix (row-major) acting on `gate.qubits()` in role order.
pub fn super_gate_matrix(gate: &GateOp) -> Vec<Complex64> {
    let h = FRAC_1_SQRT_2;
    match gate {
        // |0> -> (|0> - |1>)/sqrt2, |1> -> (|0> + |1>)/sqrt2
        GateOp::T(_) => vec![c(h), c(h), c(-h), c(h)],
        GateOp::TInv(_) => vec![c(h), c(-h), c(h), c(h)],
        GateOp::Swap(..) => {
            let mut m = vec![ZERO; 16];
            for l in 0..4usize {
                let swapped = ((l & 1) << 1) | (l >> 1);
                m[swapped * 4 + l] = c(1.0);
            }
            m
        }
        GateOp::C3 { .. } => {
            // CY(control, a) CY(control, b); Y|0> = i|1>, Y|1> = -i|0>
            let mut m = vec![ZERO; 64];
            for l in 0..8usize {
                if l & 1 == 0 {
                    m[l * 8 + l] = c(1.0);
                    continue;
                }
                let mut phase = Complex64::new(1.0, 0.0);
                let mut out = l;
                for bit in [1usize, 2] {
                    if (l >> bit) & 1 == 0 {
                        phase *= Complex64::new(0.0, 1.0);
                    } else {
                        phase *= Complex64::new(0.0, -1.0);
                    }
                    out ^= 1 << bit;
                }
                m[out * 8 + l] = phase;
            }
            m
        }
    }
}

/// `|W>` for `W` in the X/Y subspace, basis index bit `i` = qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSuperState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseSuperState {
    pub fn basis(label: &BasisOperatorLabel) -> Result<Self> {
        let n = label.n_qubits();
        check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[label.index()] = c(1.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 1 << n,
            });
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n)?;
        apply_local(&mut self.amps, &gate.qubits(), &super_gate_matrix(gate));
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[GateOp]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply(g))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `P|self>` for a super-Pauli string `P = (-1)^s X^x Z^z`.
    pub fn apply_super_pauli(&self, p: &SuperPauli) -> Result<Self> {
        if p.n_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                left: p.n_qubits(),
                right: self.n,
            });
        }
        let x: usize = p.x.iter_ones().map(|i| 1 << i).sum();
        let z: usize = p.z.iter_ones().map(|i| 1 << i).sum();
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let odd = ((z & b).count_ones() & 1 == 1) ^ p.sign;
            out[b ^ x] = if odd { -*a } else { *a };
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// Largest amplitude deviation between `P|self>` and `|self>`.
    pub fn stabilizer_residual(&self, p: &SuperPauli) -> Result<f64> {
        let image = self.apply_super_pauli(p)?;
        Ok(image
            .amps
            .iter()
            .zip(&self.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::SizeLimit {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

pub fn dense_apply(state: &DenseSuperState, gate: &GateOp) -> Result<DenseSuperState> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Von Neumann entropy (base 2) of the Schmidt spectrum across `region`.
pub fn dense_entropy(state: &DenseSuperState, region: &Region) -> Result<f64> {
    let n = state.n;
    if region.qubits().iter().any(|&q| q >= n) || region.len() >= n {
        return Err(Error::InvalidRegion(format!("region does not fit {n} qubits")));
    }
    let inside = region.qubits();
    let outside: Vec<usize> = (0..n).filter(|q| !inside.contains(q)).collect();
    let split = |b: usize, qs: &[usize]| -> usize {
        qs.iter()
            .enumerate()
            .map(|(j, &q)| ((b >> q) & 1) << j)
            .sum()
    };
    let mut m = DMatrix::<Complex64>::zeros(1 << inside.len(), 1 << outside.len());
    for (b, a) in state.amps.iter().enumerate() {
        m[(split(b, inside), split(b, &outside))] = *a;
    }
    let norm2 = state.norm().powi(2);
    let svd = m.svd(false, false);
    Ok(svd
        .singular_values
        .iter()
        .map(|s| s * s / norm2)
        .filter(|&p| p > 1e-14)
        .map(|p| -p * p.log2())
        .sum())
}
