use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::channel::{BlochVector, DensityMatrix, SuperOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrepLabel {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    ZPlus,
    ZMinus,
}

impl PrepLabel {
    pub const ALL: [PrepLabel; 6] = [
        PrepLabel::XPlus,
        PrepLabel::XMinus,
        PrepLabel::YPlus,
        PrepLabel::YMinus,
        PrepLabel::ZPlus,
        PrepLabel::ZMinus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PrepLabel::XPlus => "x+",
            PrepLabel::XMinus => "x-",
            PrepLabel::YPlus => "y+",
            PrepLabel::YMinus => "y-",
            PrepLabel::ZPlus => "z+",
            PrepLabel::ZMinus => "z-",
        }
    }

    /// Axis index (0 = x, 1 = y, 2 = z) and sign.
    pub fn axis(&self) -> (usize, f64) {
        let i = *self as usize;
        (i / 2, if i.is_multiple_of(2) { 1.0 } else { -1.0 })
    }

    pub fn bloch(&self) -> BlochVector {
        let (axis, sign) = self.axis();
        let mut r = BlochVector::new(0.0, 0.0, 0.0);
        r.0[axis] = sign;
        r
    }
}

impl fmt::Display for PrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the six Pauli eigenstates used as tomography inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepSetting {
    pub label: PrepLabel,
    pub state: DensityMatrix,
}

impl PrepSetting {
    pub fn all() -> Vec<PrepSetting> {
        PrepLabel::ALL
            .iter()
            .map(|&label| PrepSetting {
                label,
                state: DensityMatrix::from_bloch(&label.bloch()),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::X => "X",
            Basis::Y => "Y",
            Basis::Z => "Z",
        }
    }
}

pub fn setting_key(prep: PrepLabel, basis: Basis) -> String {
    format!("{}/{}", prep.as_str(), basis.as_str())
}

/// Shot counts `[n(+1), n(−1)]` for each of the 18 (preparation, basis) settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsTable {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, [u64; 2]>,
}

impl CountsTable {
    pub fn get(&self, prep: PrepLabel, basis: Basis) -> Option<[u64; 2]> {
        self.counts.get(&setting_key(prep, basis)).copied()
    }

    /// All 18 keys present, no extras, each summing to `shots`.
    pub fn validate(&self) -> Result<()> {
        for prep in PrepLabel::ALL {
            for basis in Basis::ALL {
                let key = setting_key(prep, basis);
                let c = self
                    .counts
                    .get(&key)
                    .ok_or_else(|| Error::InvalidArgument(format!("missing setting {key}")))?;
                if c[0] + c[1] != self.shots {
                    return Err(Error::InvalidArgument(format!(
                        "setting {key} has {} shots, expected {}",
                        c[0] + c[1],
                        self.shots
                    )));
                }
            }
        }
        if self.counts.len() != 18 {
            return Err(Error::InvalidArgument(format!(
                "expected 18 settings, found {}",
                self.counts.len()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Outcome weights `[w(+1), w(−1)]` per (prep, basis): shot counts or exact probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    weights: [[[f64; 2]; 3]; 6],
}

fn born_plus(s: &SuperOperator, prep: PrepLabel, basis: Basis) -> Result<f64> {
    let out = s.apply(&DensityMatrix::from_bloch(&prep.bloch())).bloch();
    let p = 0.5 * (1.0 + out.0[basis as usize]);
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || !p.is_finite() {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

impl Observations {
    /// Exact Born probabilities of `s` (the infinite-shot limit).
    pub fn exact(s: &SuperOperator) -> Result<Self> {
        let mut weights = [[[0.0; 2]; 3]; 6];
        for (i, prep) in PrepLabel::ALL.iter().enumerate() {
            for (b, basis) in Basis::ALL.iter().enumerate() {
                let p = born_plus(s, *prep, *basis)?;
                weights[i][b] = [p, 1.0 - p];
            }
        }
        Ok(Self { weights })
    }

    pub fn from_counts(t: &CountsTable) -> Result<Self> {
        t.validate()?;
        let mut weights = [[[0.0; 2]; 3]; 6];
        for (i, prep) in PrepLabel::ALL.iter().enumerate() {
            for (b, basis) in Basis::ALL.iter().enumerate() {
                let c = t.get(*prep, *basis).unwrap();
                weights[i][b] = [c[0] as f64, c[1] as f64];
            }
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, prep: PrepLabel, basis: Basis) -> [f64; 2] {
        self.weights[prep as usize][basis as usize]
    }

    /// Empirical `⟨σ_basis⟩` after preparing `prep`.
    pub fn expectation(&self, prep: PrepLabel, basis: Basis) -> f64 {
        let [a, b] = self.weight(prep, basis);
        if a + b == 0.0 {
            0.0
        } else {
            (a - b) / (a + b)
        }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().flatten().flatten().sum()
    }
}

/// Draws `shots` outcomes per setting from the exact Born probabilities.
///
/// Settings are sampled in the fixed order x+, x−, y+, y−, z+, z− × X, Y, Z
/// from one ChaCha8 stream, so a seed fixes the whole table.
pub fn simulate_experiment(s: &SuperOperator, shots: u64, seed: u64) -> Result<CountsTable> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for prep in PrepLabel::ALL {
        for basis in Basis::ALL {
            let p = born_plus(s, prep, basis)?;
            let dist = Binomial::new(shots, p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let plus = dist.sample(&mut rng);
            counts.insert(setting_key(prep, basis), [plus, shots - plus]);
        }
    }
    Ok(CountsTable { shots, seed, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Fixture;
    use crate::linalg::{c, cr};

    #[test]
    fn prep_states_match_definitions() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let cases = [
            (PrepLabel::XPlus, cr(h), cr(h)),
            (PrepLabel::XMinus, cr(h), cr(-h)),
            (PrepLabel::YPlus, cr(h), c(0.0, h)),
            (PrepLabel::YMinus, cr(h), c(0.0, -h)),
            (PrepLabel::ZPlus, cr(1.0), cr(0.0)),
            (PrepLabel::ZMinus, cr(0.0), cr(1.0)),
        ];
        let settings = PrepSetting::all();
        for ((label, a0, a1), set) in cases.iter().zip(settings.iter()) {
            assert_eq!(*label, set.label);
            let pure = DensityMatrix::pure(*a0, *a1).unwrap();
            assert!((pure.matrix() - set.state.matrix()).norm() < 1e-15, "{label}");
        }
    }

    #[test]
    fn identity_z_plus_is_deterministic() {
        let t = simulate_experiment(&SuperOperator::identity(), 100, 1).unwrap();
        assert_eq!(t.get(PrepLabel::ZPlus, Basis::Z), Some([100, 0]));
        assert_eq!(t.get(PrepLabel::ZMinus, Basis::Z), Some([0, 100]));
    }

    #[test]
    fn e2_z_plus_probability() {
        let o = Observations::exact(&Fixture::E2.superop()).unwrap();
        let [p, q] = o.weight(PrepLabel::ZPlus, Basis::Z);
        assert!((p - 0.25).abs() < 1e-15 && (q - 0.75).abs() < 1e-15);
    }

    #[test]
    fn seeded_tables_repeat() {
        let s = Fixture::E1.superop();
        let a = simulate_experiment(&s, 4096, 9).unwrap();
        assert_eq!(a, simulate_experiment(&s, 4096, 9).unwrap());
        assert_ne!(a, simulate_experiment(&s, 4096, 10).unwrap());
        a.validate().unwrap();
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = simulate_experiment(&Fixture::E2.superop(), 64, 2).unwrap();
        let back = CountsTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        let mut broken = t.clone();
        broken.counts.remove("y-/Z");
        assert!(broken.validate().is_err());
        let mut wrong_sum = t;
        wrong_sum.counts.insert("x+/X".into(), [1, 1]);
        assert!(wrong_sum.validate().is_err());
    }

    #[test]
    fn non_cptp_input_is_flagged() {
        use crate::channel::AffineBlochRep;
        use nalgebra::{Matrix3, Vector3};
        let s = AffineBlochRep::new(Matrix3::identity() * 1.5, Vector3::zeros()).to_superop();
        assert!(matches!(
            simulate_experiment(&s, 10, 0),
            Err(Error::ProbabilityOutOfRange(_))
        ));
    }
}
