//! Random circuit families and deterministic per-realization seeding.
//!
//! Every realization draws from its own `ChaCha8Rng`, seeded with
//! [`realization_seed`]`(master_seed, index)`. ChaCha8 output is specified
//! bit for bit, so a `(family, N, seed)` triple fixes the gate sequence on
//! every platform.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::tableau::GateOp;
use crate::{Error, Result};

/// Schema version of the JSON form of [`EnsembleSpec`].
pub const SPEC_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `N/10` qubits per step: three quarters in random `C3` triples, the rest get `T`.
    Parallel,
    /// One `T` on a random qubit and one `C3` on a random window of three neighbors.
    NearestNeighbor,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Parallel => "parallel",
            Family::NearestNeighbor => "nearest_neighbor",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "parallel" => Ok(Family::Parallel),
            "nearest_neighbor" | "nn" => Ok(Family::NearestNeighbor),
            other => Err(Error::Parse(format!("unknown circuit family {other:?}"))),
        }
    }
}

/// A positive rational `num/den`, written as `"1/4"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u32,
    den: u32,
}

impl Fraction {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `floor(self * n)`, computed exactly.
    pub fn floor_times(&self, n: usize) -> usize {
        (self.num as u64 * n as u64 / self.den as u64) as usize
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a fraction like 1/4, got {s:?}"));
        let (num, den) = s.trim().split_once('/').ok_or_else(bad)?;
        Self::new(
            num.trim().parse().map_err(|_| bad())?,
            den.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One Monte Carlo experiment: a circuit family at one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_qubits: usize,
    pub family: Family,
    pub realizations: usize,
    /// Number of timesteps sampled per realization.
    pub max_t: usize,
    pub master_seed: u64,
    /// Entropy is measured on the first `floor(m N)` qubits.
    pub entropy_fraction: Fraction,
    pub epsilon: f64,
    pub entropy_cadence: usize,
}

#[derive(Serialize, Deserialize)]
struct VersionedSpec {
    version: u32,
    #[serde(flatten)]
    spec: EnsembleSpec,
}

impl EnsembleSpec {
    /// Defaults for size `n`: parallel family, `m = 1/4`, `epsilon = 10`,
    /// horizon `ceil(40 ln N)`, cadence 1 up to `N = 520` and 5 above.
    pub fn with_defaults(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            family: Family::Parallel,
            realizations: 100,
            max_t: default_horizon(n_qubits),
            master_seed: 0,
            entropy_fraction: Fraction { num: 1, den: 4 },
            epsilon: 10.0,
            entropy_cadence: default_cadence(n_qubits),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        match self.family {
            Family::Parallel if n == 0 || !n.is_multiple_of(40) => {
                return Err(Error::Config(format!(
                    "the parallel family needs N divisible by 40, got {n}"
                )))
            }
            Family::NearestNeighbor if n < 3 => {
                return Err(Error::Config(format!("the nearest-neighbor family needs N >= 3, got {n}")))
            }
            _ => {}
        }
        let m = self.entropy_fraction;
        if m.num == 0 || 2 * m.num as u64 >= m.den as u64 {
            return Err(Error::Config(format!("entropy fraction {m} must lie in (0, 1/2)")));
        }
        if self.region_size() == 0 {
            return Err(Error::Config(format!("region floor({m} * {n}) is empty")));
        }
        if self.realizations == 0 {
            return Err(Error::Config("need at least one realization".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.entropy_cadence == 0 {
            return Err(Error::Config("entropy cadence must be at least 1".into()));
        }
        Ok(())
    }

    /// `floor(m N)`, which is also the saturation entropy.
    pub fn region_size(&self) -> usize {
        self.entropy_fraction.floor_times(self.n_qubits)
    }

    /// Times at which entropy is recorded: multiples of the cadence up to `max_t`.
    pub fn entropy_times(&self) -> Vec<usize> {
        (0..=self.max_t).step_by(self.entropy_cadence.max(1)).collect()
    }

    pub fn rng(&self, realization: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(realization_seed(self.master_seed, realization as u64))
    }

    /// The first `steps` timesteps of realization `realization`.
    pub fn sample_circuit(&self, realization: usize, steps: usize) -> Result<Vec<Vec<GateOp>>> {
        let mut rng = self.rng(realization);
        (0..steps).map(|_| sample_step(self.family, self.n_qubits, &mut rng)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&VersionedSpec {
            version: SPEC_VERSION,
            spec: self.clone(),
        })
        .expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: VersionedSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if v.version != SPEC_VERSION {
            return Err(Error::Parse(format!(
                "unsupported ensemble spec version {} (expected {SPEC_VERSION})",
                v.version
            )));
        }
        Ok(v.spec)
    }
}

pub fn default_horizon(n: usize) -> usize {
    (40.0 * (n.max(1) as f64).ln()).ceil() as usize
}

pub fn default_cadence(n: usize) -> usize {
    if n <= 520 {
        1
    } else {
        5
    }
}

pub fn sample_step(family: Family, n: usize, rng: &mut impl Rng) -> Result<Vec<GateOp>> {
    match family {
        Family::Parallel => sample_parallel_step(n, rng),
        Family::NearestNeighbor => sample_nn_step(n, rng),
    }
}

/// `C3` on three qubits with a uniformly chosen control.
fn c3_random_control(rng: &mut impl Rng, q: [usize; 3]) -> GateOp {
    match rng.random_range(0..3) {
        0 => GateOp::c3(q[0], q[1], q[2]),
        1 => GateOp::c3(q[1], q[0], q[2]),
        _ => GateOp::c3(q[2], q[0], q[1]),
    }
}

/// One step of the parallel circuit: draw `N/10` distinct qubits, put a
/// shuffled three quarters of them into `C3` triples and give the rest `T`.
pub fn sample_parallel_step(n: usize, rng: &mut impl Rng) -> Result<Vec<GateOp>> {
    if n == 0 || !n.is_multiple_of(40) {
        return Err(Error::Config(format!(
            "the parallel family needs N divisible by 40, got {n}"
        )));
    }
    let mut gamma = sample(rng, n, n / 10).into_vec();
    gamma.shuffle(rng);
    let (triples, singles) = gamma.split_at(3 * gamma.len() / 4);
    let mut gates = Vec::with_capacity(triples.len() / 3 + singles.len());
    for t in triples.chunks_exact(3) {
        gates.push(c3_random_control(rng, [t[0], t[1], t[2]]));
    }
    gates.extend(singles.iter().map(|&q| GateOp::T(q)));
    Ok(gates)
}

/// One step of the nearest-neighbor circuit: `T` on a random qubit, then `C3`
/// on a random window `j, j+1, j+2` with a random control.
pub fn sample_nn_step(n: usize, rng: &mut impl Rng) -> Result<Vec<GateOp>> {
    if n < 3 {
        return Err(Error::Config(format!("the nearest-neighbor family needs N >= 3, got {n}")));
    }
    let t = GateOp::T(rng.random_range(0..n));
    let j = rng.random_range(0..n - 2);
    Ok(vec![t, c3_random_control(rng, [j, j + 1, j + 2])])
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(master) ^ index)`. For a fixed master seed this is a
/// bijection of the index, so distinct realizations never share a seed.
pub fn realization_seed(master_seed: u64, realization_index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ realization_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn count(gates: &[GateOp]) -> (usize, usize) {
        let c3 = gates.iter().filter(|g| matches!(g, GateOp::C3 { .. })).count();
        (c3, gates.len() - c3)
    }

    #[test]
    fn parallel_step_counts() {
        assert_eq!(count(&sample_parallel_step(40, &mut rng(1)).unwrap()), (1, 1));
        assert_eq!(count(&sample_parallel_step(80, &mut rng(1)).unwrap()), (2, 2));
        assert_eq!(count(&sample_parallel_step(1000, &mut rng(1)).unwrap()), (25, 25));
        assert!(matches!(sample_parallel_step(50, &mut rng(1)), Err(Error::Config(_))));
    }

    #[test]
    fn parallel_step_touches_distinct_qubits() {
        let mut r = rng(5);
        for n in [40, 120, 400] {
            for _ in 0..200 {
                let gates = sample_parallel_step(n, &mut r).unwrap();
                let qubits: Vec<usize> = gates.iter().flat_map(GateOp::qubits).collect();
                let distinct: HashSet<_> = qubits.iter().collect();
                assert_eq!(qubits.len(), n / 10);
                assert_eq!(distinct.len(), n / 10);
            }
        }
    }

    #[test]
    fn gamma_membership_is_uniform() {
        // chi-square with 119 degrees of freedom; the 0.1% critical value is about 170
        let n = 120;
        let steps = 20_000;
        let mut hits = vec![0u64; n];
        let mut r = rng(11);
        for _ in 0..steps {
            for q in sample_parallel_step(n, &mut r).unwrap().iter().flat_map(GateOp::qubits) {
                hits[q] += 1;
            }
        }
        let expected = steps as f64 / 10.0;
        let chi2: f64 = hits.iter().map(|&h| (h as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 170.0, "chi2 = {chi2}");
    }

    #[test]
    fn control_is_uniform_within_triple() {
        let mut r = rng(2);
        let mut by_role = [0u32; 3];
        for _ in 0..30_000 {
            if let GateOp::C3 { control, targets } = sample_nn_step(3, &mut r).unwrap()[1] {
                assert_eq!(
                    {
                        let mut all = vec![control, targets[0], targets[1]];
                        all.sort();
                        all
                    },
                    vec![0, 1, 2]
                );
                by_role[control] += 1;
            }
        }
        for c in by_role {
            assert!((c as f64 - 10_000.0).abs() < 400.0, "{by_role:?}");
        }
    }

    #[test]
    fn nn_windows() {
        let mut r = rng(3);
        let mut starts = HashSet::new();
        for _ in 0..200 {
            let gates = sample_nn_step(4, &mut r).unwrap();
            assert!(matches!(gates[0], GateOp::T(q) if q < 4));
            let mut q = gates[1].qubits();
            q.sort();
            assert_eq!(q[2] - q[0], 2);
            starts.insert(q[0]);
        }
        assert_eq!(starts, HashSet::from([0, 1]));
        assert!(sample_nn_step(2, &mut r).is_err());
        assert_eq!(sample_nn_step(9, &mut rng(8)).unwrap(), sample_nn_step(9, &mut rng(8)).unwrap());
    }

    #[test]
    fn seeds() {
        assert_ne!(realization_seed(7, 0), realization_seed(7, 1));
        assert_eq!(realization_seed(7, 3), realization_seed(7, 3));
        let seeds: HashSet<u64> = (0..10_000).map(|i| realization_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        // pinned so a change in the mixing function is noticed
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn circuits_are_reproducible() {
        let spec = EnsembleSpec::with_defaults(120);
        assert_eq!(spec.sample_circuit(4, 30).unwrap(), spec.sample_circuit(4, 30).unwrap());
        assert_ne!(spec.sample_circuit(4, 30).unwrap(), spec.sample_circuit(5, 30).unwrap());
    }

    #[test]
    fn spec_validation() {
        let ok = EnsembleSpec::with_defaults(120);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.region_size(), 30);
        assert_eq!(ok.max_t, 192);
        let bad = |f: &dyn Fn(&mut EnsembleSpec)| {
            let mut s = ok.clone();
            f(&mut s);
            s.validate().is_err()
        };
        assert!(bad(&|s| s.n_qubits = 50));
        assert!(bad(&|s| s.entropy_fraction = "1/2".parse().unwrap()));
        assert!(bad(&|s| s.entropy_fraction = "0/3".parse().unwrap()));
        assert!(bad(&|s| s.realizations = 0));
        assert!(bad(&|s| s.epsilon = 0.0));
        assert!(bad(&|s| s.entropy_cadence = 0));
        let mut nn = ok.clone();
        nn.family = Family::NearestNeighbor;
        nn.n_qubits = 50;
        assert!(nn.validate().is_ok());
    }

    #[test]
    fn spec_json_round_trip() {
        let mut spec = EnsembleSpec::with_defaults(1000);
        spec.entropy_fraction = "1/3".parse().unwrap();
        let json = spec.to_json();
        assert!(json.contains("\"version\": 1"));
        assert!(json.contains("\"1/3\""));
        assert_eq!(EnsembleSpec::from_json(&json).unwrap(), spec);
        let future = json.replace("\"version\": 1", "\"version\": 9");
        assert!(EnsembleSpec::from_json(&future).is_err());
    }

    #[test]
    fn fraction_parsing() {
        let f: Fraction = " 1 / 5 ".parse().unwrap();
        assert_eq!(f.floor_times(1000), 200);
        assert_eq!(f.to_string(), "1/5");
        assert!("0.25".parse::<Fraction>().is_err());
        assert!("1/0".parse::<Fraction>().is_err());
        assert_eq!("1/3".parse::<Fraction>().unwrap().floor_times(1000), 333);
    }
}
