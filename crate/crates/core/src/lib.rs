//! Operator scrambling in super-Clifford circuits.
//!
//! Operators spanned by Pauli strings with an `X` or `Y` on every site form a
//! `2^N` dimensional subspace. Writing `X = |0>` and `Y = |1>`, the gates
//! `T`, `SWAP` and `C3` act on that subspace as Clifford gates on a fictitious
//! N-qubit "operator space", so the Heisenberg evolution of a basis operator is
//! tracked by N super-stabilizer generators. This crate provides:
//!
//! * [`pauli`]: super-Pauli strings with exact sign arithmetic.
//! * [`gf2`]: bit-packed GF(2) matrices, rank and row reduction.
//! * [`tableau`]: the super-stabilizer tableau and gate updates.
//! * [`entropy`]: operator entanglement entropy from GF(2) ranks.
//! * [`otoc`]: out-of-time-ordered correlators through the echo construction.
//! * [`oracle`]: dense brute-force references used for differential checks.
//! * [`ensembles`]: random circuit families with deterministic seeding.
//! * [`experiments`]: Monte Carlo drivers, scrambling times and fits.

pub mod bits;
pub mod ensembles;
pub mod entropy;
mod error;
pub mod experiments;
pub mod gf2;
pub mod oracle;
pub mod otoc;
pub mod pauli;
pub mod tableau;

pub use error::{Error, Result};
pub use pauli::{BasisOperatorLabel, SuperPauli};
pub use tableau::{GateOp, Tableau};
