//! The super-stabilizer tableau.
//!
//! Storage is column-sliced: for every qubit `i` there is a packed column of
//! `v_{ix}` bits and one of `v_{iz}` bits, each running over all N
//! generators, plus a packed column of signs. A gate therefore touches only
//! the columns of the (at most three) qubits it acts on, costing `O(N / 64)`
//! word operations, and the first `2 N_A` columns are exactly the rows of the
//! entropy matrix for the prefix region of `N_A` qubits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::{get_bit, set_bit, words_for, BitVec};
use crate::gf2::BitMatrix;
use crate::pauli::{BasisOperatorLabel, SuperPauli};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    T,
    TInv,
    Swap,
    C3,
}

/// One gate of the super-Clifford set. Qubit indices are zero based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateOp {
    T(usize),
    TInv(usize),
    Swap(usize, usize),
    /// `C3` with the control first, acting on the operator space as
    /// `CY(control, a) CY(control, b)`.
    C3 { control: usize, targets: [usize; 2] },
}

impl GateOp {
    pub fn c3(control: usize, a: usize, b: usize) -> Self {
        GateOp::C3 {
            control,
            targets: [a, b],
        }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            GateOp::T(_) => GateKind::T,
            GateOp::TInv(_) => GateKind::TInv,
            GateOp::Swap(..) => GateKind::Swap,
            GateOp::C3 { .. } => GateKind::C3,
        }
    }

    /// Qubits in role order (control first for `C3`).
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::T(q) | GateOp::TInv(q) => vec![q],
            GateOp::Swap(a, b) => vec![a, b],
            GateOp::C3 { control, targets } => vec![control, targets[0], targets[1]],
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GateOp::T(q) => GateOp::TInv(q),
            GateOp::TInv(q) => GateOp::T(q),
            other => other,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            if qs[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Largest qubit index plus one.
    pub fn support_size(&self) -> usize {
        self.qubits().into_iter().max().map_or(0, |q| q + 1)
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::T(q) => write!(f, "T({q})"),
            GateOp::TInv(q) => write!(f, "TINV({q})"),
            GateOp::Swap(a, b) => write!(f, "SWAP({a},{b})"),
            GateOp::C3 { control, targets } => write!(f, "C3({control},{},{})", targets[0], targets[1]),
        }
    }
}

impl FromStr for GateOp {
    type Err = Error;

    /// Parses `T(q)`, `TINV(q)`, `SWAP(a,b)` or `C3(control,a,b)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("cannot parse gate {s:?}"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = s[..open].trim().to_ascii_uppercase();
        let args = s[open + 1..s.len() - 1]
            .split([',', ';'])
            .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (name.as_str(), args.as_slice()) {
            ("T", &[q]) => Ok(GateOp::T(q)),
            ("TINV" | "TDG", &[q]) => Ok(GateOp::TInv(q)),
            ("SWAP", &[a, b]) => Ok(GateOp::Swap(a, b)),
            ("C3", &[c, a, b]) => Ok(GateOp::c3(c, a, b)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for GateOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GateOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Parses a gate list separated by whitespace or `;` between gates, e.g.
/// `"T(2) C3(0,1,2)"`.
pub fn parse_gate_list(s: &str) -> Result<Vec<GateOp>> {
    let mut gates = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
                if depth == 0 {
                    gates.push(current.trim().parse()?);
                    current.clear();
                }
            }
            c if depth == 0 && (c.is_whitespace() || c == ';' || c == ',') => {}
            c => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        return Err(Error::Parse(format!("trailing input {:?}", current.trim())));
    }
    Ok(gates)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    stride: usize,
    /// Column `2i` holds `v_{ix}`, column `2i + 1` holds `v_{iz}`.
    cols: Vec<u64>,
    signs: Vec<u64>,
}

impl Tableau {
    /// Stabilizers `(-1)^{b_a} Z_a` of the basis operator `label`.
    pub fn new_computational(label: &BasisOperatorLabel) -> Self {
        let n = label.n_qubits();
        assert!(n >= 1, "tableau needs at least one qubit");
        let stride = words_for(n);
        let mut t = Self {
            n,
            stride,
            cols: vec![0; 2 * n * stride],
            signs: label.bits.words().to_vec(),
        };
        for a in 0..n {
            t.set_component(a, 2 * a + 1, true);
        }
        t
    }

    /// Builds from explicit generators after checking the tableau invariants.
    pub fn from_generators(generators: &[SuperPauli]) -> Result<Self> {
        let t = Self::from_generators_unchecked(generators)?;
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn from_generators_unchecked(generators: &[SuperPauli]) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::InvalidTableau("no generators".into()));
        }
        let stride = words_for(n);
        let mut t = Self {
            n,
            stride,
            cols: vec![0; 2 * n * stride],
            signs: vec![0; stride],
        };
        for (a, g) in generators.iter().enumerate() {
            if g.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    left: g.n_qubits(),
                    right: n,
                });
            }
            set_bit(&mut t.signs, a, g.sign);
            for i in g.x.iter_ones() {
                t.set_component(a, 2 * i, true);
            }
            for i in g.z.iter_ones() {
                t.set_component(a, 2 * i + 1, true);
            }
        }
        Ok(t)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn set_component(&mut self, generator: usize, col: usize, value: bool) {
        let base = col * self.stride;
        set_bit(&mut self.cols[base..base + self.stride], generator, value);
    }

    #[inline]
    fn component(&self, generator: usize, col: usize) -> bool {
        get_bit(&self.cols[col * self.stride..(col + 1) * self.stride], generator)
    }

    pub fn sign(&self, generator: usize) -> bool {
        get_bit(&self.signs, generator)
    }

    pub fn set_sign(&mut self, generator: usize, sign: bool) {
        set_bit(&mut self.signs, generator, sign);
    }

    /// Generator `a` as a standalone super-Pauli string.
    pub fn generator(&self, a: usize) -> SuperPauli {
        assert!(a < self.n);
        let mut p = SuperPauli::identity(self.n);
        p.sign = self.sign(a);
        for i in 0..self.n {
            if self.component(a, 2 * i) {
                p.x.set(i, true);
            }
            if self.component(a, 2 * i + 1) {
                p.z.set(i, true);
            }
        }
        p
    }

    pub fn generators(&self) -> Vec<SuperPauli> {
        // Transposing in bulk is much cheaper than per-generator gathers.
        let v = self.entropy_matrix().transpose();
        (0..self.n)
            .map(|a| {
                let mut p = SuperPauli::identity(self.n);
                p.sign = self.sign(a);
                for c in v.row(a).iter_ones() {
                    if c % 2 == 0 {
                        p.x.set(c / 2, true);
                    } else {
                        p.z.set(c / 2, true);
                    }
                }
                p
            })
            .collect()
    }

    /// The `2N x N` matrix whose column `a` is `(v_{1x}, v_{1z}, ..., v_{Nx}, v_{Nz})`
    /// of generator `a`.
    pub fn entropy_matrix(&self) -> BitMatrix {
        BitMatrix::from_words(2 * self.n, self.n, self.cols.clone())
    }

    /// Rows `2i` and `2i + 1` of [`Self::entropy_matrix`] for each listed qubit.
    pub(crate) fn qubit_rows(&self, qubits: &[usize]) -> BitMatrix {
        let mut data = Vec::with_capacity(2 * qubits.len() * self.stride);
        for &q in qubits {
            data.extend_from_slice(&self.cols[2 * q * self.stride..(2 * q + 2) * self.stride]);
        }
        BitMatrix::from_words(2 * qubits.len(), self.n, data)
    }

    /// The first `2 n_a` rows of [`Self::entropy_matrix`].
    pub(crate) fn prefix_rows(&self, n_a: usize) -> BitMatrix {
        BitMatrix::from_words(2 * n_a, self.n, self.cols[..2 * n_a * self.stride].to_vec())
    }

    /// Applies one gate to every generator. All updates read pre-gate values.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n)?;
        let s = self.stride;
        let xc = |q: usize| 2 * q * s;
        let zc = |q: usize| (2 * q + 1) * s;
        match *gate {
            GateOp::T(q) => {
                // X -> Z, Z -> -X
                let (xo, zo) = (xc(q), zc(q));
                for w in 0..s {
                    let x = self.cols[xo + w];
                    let z = self.cols[zo + w];
                    self.signs[w] ^= !x & z;
                    self.cols[xo + w] = z;
                    self.cols[zo + w] = x;
                }
            }
            GateOp::TInv(q) => {
                // X -> -Z, Z -> X
                let (xo, zo) = (xc(q), zc(q));
                for w in 0..s {
                    let x = self.cols[xo + w];
                    let z = self.cols[zo + w];
                    self.signs[w] ^= x & !z;
                    self.cols[xo + w] = z;
                    self.cols[zo + w] = x;
                }
            }
            GateOp::Swap(a, b) => {
                for w in 0..s {
                    self.cols.swap(xc(a) + w, xc(b) + w);
                    self.cols.swap(zc(a) + w, zc(b) + w);
                }
            }
            GateOp::C3 { control, targets: [a, b] } => {
                let (x1o, z1o) = (xc(control), zc(control));
                let (x2o, z2o) = (xc(a), zc(a));
                let (x3o, z3o) = (xc(b), zc(b));
                for w in 0..s {
                    let x1 = self.cols[x1o + w];
                    let x2 = self.cols[x2o + w];
                    let z2 = self.cols[z2o + w];
                    let x3 = self.cols[x3o + w];
                    let z3 = self.cols[z3o + w];
                    self.signs[w] ^= x1 ^ (x1 & x2) ^ (x1 & x3);
                    self.cols[z1o + w] ^= x2 ^ z2 ^ x3 ^ z3;
                    self.cols[x2o + w] = x2 ^ x1;
                    self.cols[z2o + w] = z2 ^ x1;
                    self.cols[x3o + w] = x3 ^ x1;
                    self.cols[z3o + w] = z3 ^ x1;
                }
            }
        }
        Ok(())
    }

    /// Applies `gates` in order, or when `reversed_inverse` is set, the
    /// inverse of each gate in reverse order.
    ///
    /// Every gate is validated before any is applied, so an error leaves the
    /// tableau untouched.
    pub fn apply_sequence(&mut self, gates: &[GateOp], reversed_inverse: bool) -> Result<()> {
        for g in gates {
            g.validate(self.n)?;
        }
        if reversed_inverse {
            for g in gates.iter().rev() {
                self.apply_gate(&g.inverse())?;
            }
        } else {
            for g in gates {
                self.apply_gate(g)?;
            }
        }
        Ok(())
    }

    /// Checks pairwise commutation and independence of the generators.
    pub fn validate(&self) -> Result<()> {
        if self.entropy_matrix().rank() != self.n {
            return Err(Error::InvalidTableau("generators are not independent".into()));
        }
        let gens = self.generators();
        for (a, ga) in gens.iter().enumerate() {
            for (b, gb) in gens.iter().enumerate().skip(a + 1) {
                if !ga.symplectic_commutes(gb)? {
                    return Err(Error::InvalidTableau(format!(
                        "generators {a} and {b} anticommute"
                    )));
                }
            }
        }
        Ok(())
    }

    /// A canonical generating set: reduced row-echelon form of `(X | Z)` with
    /// signs carried through the row multiplications. Two tableaux stabilize
    /// the same operator iff their canonical forms are equal.
    pub fn canonical_generators(&self) -> Vec<SuperPauli> {
        let mut gens = self.generators();
        let n = self.n;
        let mut rank = 0;
        for c in 0..2 * n {
            let bit = |p: &SuperPauli| if c < n { p.x.get(c) } else { p.z.get(c - n) };
            let Some(pivot) = (rank..n).find(|&r| bit(&gens[r])) else {
                continue;
            };
            gens.swap(pivot, rank);
            let pivot_row = gens[rank].clone();
            for (r, g) in gens.iter_mut().enumerate() {
                if r != rank && bit(g) {
                    g.mul_assign_unchecked(&pivot_row);
                }
            }
            rank += 1;
        }
        gens
    }

    pub fn same_stabilizer_group(&self, other: &Tableau) -> bool {
        self.n == other.n && self.canonical_generators() == other.canonical_generators()
    }

    pub fn to_record(&self) -> TableauRecord {
        TableauRecord {
            format: TABLEAU_FORMAT.to_string(),
            version: TABLEAU_VERSION,
            n_qubits: self.n,
            generators: self
                .generators()
                .into_iter()
                .map(|g| GeneratorRecord {
                    sign: g.sign as u8,
                    x: g.x,
                    z: g.z,
                })
                .collect(),
        }
    }

    pub fn from_record(record: &TableauRecord) -> Result<Self> {
        if record.format != TABLEAU_FORMAT || record.version != TABLEAU_VERSION {
            return Err(Error::Parse(format!(
                "unsupported tableau format {} v{}",
                record.format, record.version
            )));
        }
        if record.generators.len() != record.n_qubits {
            return Err(Error::InvalidTableau(format!(
                "{} generators for {} qubits",
                record.generators.len(),
                record.n_qubits
            )));
        }
        let gens = record
            .generators
            .iter()
            .map(|g| {
                if g.sign > 1 {
                    return Err(Error::Parse(format!("sign must be 0 or 1, got {}", g.sign)));
                }
                SuperPauli::new(g.sign == 1, g.x.clone(), g.z.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(&gens)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("tableau record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let record: TableauRecord =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_record(&record)
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tableau(n = {})", self.n)?;
        for g in self.generators() {
            writeln!(f, "  {g}")?;
        }
        Ok(())
    }
}

pub const TABLEAU_FORMAT: &str = "super-stabilizer-tableau";
pub const TABLEAU_VERSION: u32 = 1;

/// Checkpoint form of a tableau: generator rows as bit strings, qubit 0
/// first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauRecord {
    pub format: String,
    pub version: u32,
    pub n_qubits: usize,
    pub generators: Vec<GeneratorRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub sign: u8,
    pub x: BitVec,
    pub z: BitVec,
}

/// Uniformly random gate over the full super-Clifford set including `TINV`.
/// `C3` is only drawn when `n >= 3` and `SWAP` when `n >= 2`.
pub fn random_gate(rng: &mut impl rand::Rng, n: usize) -> GateOp {
    use rand::seq::index::sample;
    let kinds = match n {
        1 => 2,
        2 => 3,
        _ => 4,
    };
    match rng.random_range(0..kinds) {
        0 => GateOp::T(rng.random_range(0..n)),
        1 => GateOp::TInv(rng.random_range(0..n)),
        2 => {
            let q = sample(rng, n, 2);
            GateOp::Swap(q.index(0), q.index(1))
        }
        _ => {
            let q = sample(rng, n, 3);
            GateOp::c3(q.index(0), q.index(1), q.index(2))
        }
    }
}

pub fn random_circuit(rng: &mut impl rand::Rng, n: usize, len: usize) -> Vec<GateOp> {
    (0..len).map(|_| random_gate(rng, n)).collect()
}
