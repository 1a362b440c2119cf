//! Super-Pauli strings on the X/Y operator subspace.
//!
//! A [`SuperPauli`] is `(-1)^sign * prod_i X_i^{x_i} Z_i^{z_i}` with the X factor
//! of each site written before its Z factor. Signs are single bits; the gate
//! set is real on the operator subspace so no factors of `i` ever appear.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{and_parity, BitVec};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuperPauli {
    pub sign: bool,
    pub x: BitVec,
    pub z: BitVec,
}

impl SuperPauli {
    pub fn new(sign: bool, x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: z.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::Config("super-Pauli needs at least one qubit".into()));
        }
        Ok(Self { sign, x, z })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sign: false,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    /// `(-1)^sign Z_i`.
    pub fn z_unit(n: usize, i: usize, sign: bool) -> Self {
        Self {
            sign,
            x: BitVec::zeros(n),
            z: BitVec::unit(n, i),
        }
    }

    /// `(-1)^sign X_i`.
    pub fn x_unit(n: usize, i: usize, sign: bool) -> Self {
        Self {
            sign,
            x: BitVec::unit(n, i),
            z: BitVec::zeros(n),
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// True when the string has no X factors.
    pub fn is_pure_z(&self) -> bool {
        self.x.is_zero()
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits(),
                right: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// Product `self * other` in canonical order.
    ///
    /// Moving each X factor of `other` left past the Z factor of `self` on the
    /// same site contributes one `-1`, so the sign picks up the parity of
    /// `self.z & other.x`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    /// In-place `self = self * other`; dimensions must already agree.
    pub(crate) fn mul_assign_unchecked(&mut self, other: &Self) {
        let swap_parity = and_parity(self.z.words(), other.x.words());
        self.sign ^= other.sign ^ swap_parity;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Whether the two strings commute as operators.
    pub fn symplectic_commutes(&self, other: &Self) -> Result<bool> {
        self.check_dims(other)?;
        let a = and_parity(self.x.words(), other.z.words());
        let b = and_parity(self.z.words(), other.x.words());
        Ok(a == b)
    }
}

impl fmt::Display for SuperPauli {
    /// `+XZX.` style: one glyph pair per site, X slot then Z slot.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign { "-" } else { "+" })?;
        for (x, z) in self.x.iter().zip(self.z.iter()) {
            f.write_str(if x { "X" } else { "." })?;
            f.write_str(if z { "Z" } else { "." })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SuperPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SuperPauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (sign, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let chars: Vec<char> = body.chars().collect();
        if chars.is_empty() || !chars.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("expected glyph pairs, got {s:?}")));
        }
        let n = chars.len() / 2;
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        for (i, pair) in chars.chunks(2).enumerate() {
            match pair[0] {
                'X' => x.set(i, true),
                '.' => {}
                c => return Err(Error::Parse(format!("bad X slot {c:?} in {s:?}"))),
            }
            match pair[1] {
                'Z' => z.set(i, true),
                '.' => {}
                c => return Err(Error::Parse(format!("bad Z slot {c:?} in {s:?}"))),
            }
        }
        Ok(Self { sign, x, z })
    }
}

/// A computational-basis operator of the X/Y subspace: bit `i` is 0 for `X`
/// and 1 for `Y` on site `i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisOperatorLabel {
    pub bits: BitVec,
}

impl BasisOperatorLabel {
    /// `X_1 X_2 ... X_N`.
    pub fn all_x(n: usize) -> Self {
        Self {
            bits: BitVec::zeros(n),
        }
    }

    pub fn from_bits(bits: BitVec) -> Self {
        Self { bits }
    }

    pub fn n_qubits(&self) -> usize {
        self.bits.len()
    }

    /// Basis index with qubit 0 as the least significant bit.
    pub fn index(&self) -> usize {
        self.bits.iter_ones().map(|i| 1usize << i).sum()
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Self {
            bits: BitVec::from_bools(&(0..n).map(|i| (index >> i) & 1 == 1).collect::<Vec<_>>()),
        }
    }

    /// Operator string such as `YXX`.
    pub fn operator_string(&self) -> String {
        self.bits.iter().map(|b| if b { 'Y' } else { 'X' }).collect()
    }
}

impl FromStr for BasisOperatorLabel {
    type Err = Error;

    /// Accepts either `0`/`1` bits or `X`/`Y` letters, qubit 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' | 'X' | 'x' => Ok(false),
                '1' | 'Y' | 'y' => Ok(true),
                other => Err(Error::Parse(format!("bad basis label character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::Parse("empty basis label".into()));
        }
        Ok(Self::from_bits(BitVec::from_bools(&bits)))
    }
}
