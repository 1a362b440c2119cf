//! Operator entanglement entropy from GF(2) ranks.
//!
//! For the region `A`, the entropy (base 2) of the operator state is
//! `rank(rows of A) - |A|`, where the rows are the `v_{ix}` and `v_{iz}`
//! columns of every qubit in `A`. Values are exact integers.

use crate::tableau::Tableau;
use crate::{Error, Result};

/// A set of qubits: sorted, distinct, nonempty and not the whole system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    qubits: Vec<usize>,
}

impl Region {
    pub fn new(mut qubits: Vec<usize>, n_qubits: usize) -> Result<Self> {
        qubits.sort_unstable();
        if qubits.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRegion("duplicate qubits".into()));
        }
        if qubits.is_empty() || qubits.len() >= n_qubits {
            return Err(Error::InvalidRegion(format!(
                "region of {} qubits must be a nonempty strict subset of {n_qubits}",
                qubits.len()
            )));
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::InvalidRegion(format!("qubit {q} out of range")));
        }
        Ok(Self { qubits })
    }

    /// The first `n_a` qubits.
    pub fn prefix(n_a: usize, n_qubits: usize) -> Result<Self> {
        Self::new((0..n_a).collect(), n_qubits)
    }

    pub fn complement(&self, n_qubits: usize) -> Result<Self> {
        Self::new(
            (0..n_qubits).filter(|q| self.qubits.binary_search(q).is_err()).collect(),
            n_qubits,
        )
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }
}

/// Entropy of the first `n_a` qubits.
pub fn prefix_entropy(t: &Tableau, n_a: usize) -> Result<u32> {
    let n = t.n_qubits();
    if n_a == 0 || n_a >= n {
        return Err(Error::InvalidRegion(format!(
            "prefix length {n_a} must lie in 1..{n}"
        )));
    }
    let mut rows = t.prefix_rows(n_a);
    Ok((rows.rank_in_place() - n_a) as u32)
}

pub fn region_entropy(t: &Tableau, region: &Region) -> Result<u32> {
    let n = t.n_qubits();
    if region.qubits.last().is_some_and(|&q| q >= n) || region.len() >= n {
        return Err(Error::InvalidRegion(format!(
            "region does not fit {n} qubits"
        )));
    }
    let mut rows = t.qubit_rows(&region.qubits);
    Ok((rows.rank_in_place() - region.len()) as u32)
}
