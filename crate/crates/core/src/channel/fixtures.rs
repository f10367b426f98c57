//! Named channels used throughout the crate and a seeded random CPTP generator.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, OMatrix, Vector3, U2, U4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::repr::{AffineBlochRep, KrausSet, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{c, cr, pauli, sqrtm2, CMatrix2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fixture {
    /// `½ √σx ρ √σx† + ¼ σy ρ σy + ¼ σz ρ σz`; K-broken.
    E1,
    /// `¼ ρ + ¼ σx ρ σx + ½ σy ρ σy`; K-exact.
    E2,
    /// Rotation by −π/2 about (1,1,1)/√3.
    E3,
    Identity,
    /// `ρ ↦ |0⟩⟨0|`.
    Reset,
    /// Distortion `λ I`, no shift.
    Depolarizing(f64),
    Rotation { axis: [f64; 3], angle: f64 },
    /// `(1 − p) E1 + p E2`.
    Interpolated(f64),
}

impl Fixture {
    pub const NAMES: [&'static str; 8] = [
        "E1",
        "E2",
        "E3",
        "identity",
        "reset",
        "depolarizing:<lambda>",
        "rotation:<nx>,<ny>,<nz>,<angle>",
        "interp:<p>",
    ];

    pub fn rotation(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let norm = axis.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidAxis { norm });
        }
        Ok(Fixture::Rotation {
            axis: [axis.x, axis.y, axis.z],
            angle,
        })
    }

    pub fn kraus(&self) -> Option<KrausSet> {
        let ops = match *self {
            Fixture::E1 => vec![
                sqrtm2(&pauli(1)) * cr(0.5f64.sqrt()),
                pauli(2) * cr(0.5),
                pauli(3) * cr(0.5),
            ],
            Fixture::E2 => vec![
                pauli(0) * cr(0.5),
                pauli(1) * cr(0.5),
                pauli(2) * cr(0.5f64.sqrt()),
            ],
            Fixture::E3 => vec![rotation_unitary(&e3_axis(), -FRAC_PI_2)],
            Fixture::Identity => vec![CMatrix2::identity()],
            Fixture::Reset => vec![
                CMatrix2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0)),
                CMatrix2::new(cr(0.0), cr(1.0), cr(0.0), cr(0.0)),
            ],
            Fixture::Depolarizing(l) => {
                let p0 = (1.0 + 3.0 * l) / 4.0;
                let p = (1.0 - l) / 4.0;
                if p0 < 0.0 || p < 0.0 {
                    return None;
                }
                (0..4)
                    .map(|k| pauli(k) * cr(if k == 0 { p0 } else { p }.sqrt()))
                    .collect()
            }
            Fixture::Rotation { axis, angle } => {
                vec![rotation_unitary(&Vector3::from(axis).normalize(), angle)]
            }
            Fixture::Interpolated(_) => return None,
        };
        KrausSet::new(ops).ok()
    }

    pub fn affine(&self) -> AffineBlochRep {
        match *self {
            Fixture::E3 => AffineBlochRep::unital(rodrigues(&e3_axis(), -FRAC_PI_2)),
            Fixture::Depolarizing(l) => AffineBlochRep::unital(Matrix3::identity() * l),
            Fixture::Rotation { axis, angle } => {
                AffineBlochRep::unital(rodrigues(&Vector3::from(axis).normalize(), angle))
            }
            Fixture::Reset => AffineBlochRep::new(Matrix3::zeros(), Vector3::new(0.0, 0.0, 1.0)),
            Fixture::Identity => AffineBlochRep::unital(Matrix3::identity()),
            Fixture::Interpolated(p) => {
                let a = Fixture::E1.affine();
                let b = Fixture::E2.affine();
                AffineBlochRep::new(
                    a.distortion * (1.0 - p) + b.distortion * p,
                    a.shift * (1.0 - p) + b.shift * p,
                )
            }
            Fixture::E1 => AffineBlochRep::unital(Matrix3::new(
                0.0, 0.0, 0.0, //
                0.0, 0.0, -0.5, //
                0.0, 0.5, 0.0,
            )),
            Fixture::E2 => AffineBlochRep::unital(Matrix3::from_diagonal(&Vector3::new(0.0, 0.5, -0.5))),
        }
    }

    /// Built from the affine form, whose entries are exact binary fractions.
    pub fn superop(&self) -> SuperOperator {
        self.affine().to_superop()
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::E1 => write!(f, "E1"),
            Fixture::E2 => write!(f, "E2"),
            Fixture::E3 => write!(f, "E3"),
            Fixture::Identity => write!(f, "identity"),
            Fixture::Reset => write!(f, "reset"),
            Fixture::Depolarizing(l) => write!(f, "depolarizing:{l}"),
            Fixture::Rotation { axis, angle } => {
                write!(f, "rotation:{},{},{},{}", axis[0], axis[1], axis[2], angle)
            }
            Fixture::Interpolated(p) => write!(f, "interp:{p}"),
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let nums = |a: Option<&str>, n: usize| -> Result<Vec<f64>> {
            let a = a.ok_or_else(|| Error::UnknownFixture(s.to_string()))?;
            let v = a
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
            if v.len() != n {
                return Err(Error::Parse(format!("{s}: expected {n} numbers")));
            }
            Ok(v)
        };
        match (head.to_ascii_lowercase().as_str(), args) {
            ("e1", None) => Ok(Fixture::E1),
            ("e2", None) => Ok(Fixture::E2),
            ("e3", None) => Ok(Fixture::E3),
            ("identity" | "id", None) => Ok(Fixture::Identity),
            ("reset", None) => Ok(Fixture::Reset),
            ("depolarizing", a) => Ok(Fixture::Depolarizing(nums(a, 1)?[0])),
            ("interp", a) => Ok(Fixture::Interpolated(nums(a, 1)?[0])),
            ("rotation", a) => {
                let v = nums(a, 4)?;
                Fixture::rotation(Vector3::new(v[0], v[1], v[2]), v[3])
            }
            _ => Err(Error::UnknownFixture(s.to_string())),
        }
    }
}

/// Fixture lookup by name.
pub fn builtin(name: &str) -> Result<SuperOperator> {
    Ok(name.parse::<Fixture>()?.superop())
}

fn e3_axis() -> Vector3<f64> {
    Vector3::new(1.0, 1.0, 1.0) / 3f64.sqrt()
}

/// Rodrigues' formula `R = I + sin θ K + (1 − cos θ) K²` for a unit axis.
pub fn rodrigues(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = axis.cross_matrix();
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// `exp(−i θ n·σ / 2)`, which rotates Bloch vectors by `θ` about `n`.
pub fn rotation_unitary(axis: &Vector3<f64>, angle: f64) -> CMatrix2 {
    let (s, co) = (angle / 2.0).sin_cos();
    let ns = pauli(1) * cr(axis.x) + pauli(2) * cr(axis.y) + pauli(3) * cr(axis.z);
    CMatrix2::identity() * cr(co) - ns * c(0.0, s)
}

/// Random channel from a Haar-like isometry into signal ⊗ one ancilla qubit.
pub fn random_cptp(seed: u64) -> SuperOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_isometry_channel(&mut rng)
}

pub(crate) fn random_isometry_channel(rng: &mut ChaCha8Rng) -> SuperOperator {
    let g = OMatrix::<crate::linalg::C64, U4, U2>::from_fn(|_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let q = g.qr().q();
    // Row index is 2·s_out + a, with the ancilla a traced out.
    let kraus: Vec<CMatrix2> = (0..2)
        .map(|a| CMatrix2::from_fn(|s_out, s_in| q[(2 * s_out + a, s_in)]))
        .collect();
    KrausSet::new(kraus).expect("two operators").to_superop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::cptp::{check_cptp, DEFAULT_CPTP_TOL};
    use std::f64::consts::PI;

    #[test]
    fn e3_matches_printed_matrix() {
        let s3 = 3f64.sqrt();
        let expected = Matrix3::new(
            1.0,
            1.0 + s3,
            1.0 - s3,
            1.0 - s3,
            1.0,
            1.0 + s3,
            1.0 + s3,
            1.0 - s3,
            1.0,
        ) / 3.0;
        let e3 = Fixture::E3.affine().distortion;
        assert!((e3 - expected).abs().max() <= 1e-12);
        // The Kraus (unitary) form describes the same map.
        let from_kraus = Fixture::E3.kraus().unwrap().to_superop().to_affine().unwrap();
        assert!((from_kraus.distortion - expected).abs().max() <= 1e-12);
    }

    #[test]
    fn kraus_forms_agree_with_affine_forms() {
        for f in [
            Fixture::E1,
            Fixture::E2,
            Fixture::E3,
            Fixture::Identity,
            Fixture::Reset,
            Fixture::rotation(Vector3::new(0.0, 0.6, 0.8), 1.1).unwrap(),
        ] {
            let k = f.kraus().unwrap();
            assert!(k.completeness_residual() < 1e-15, "{f}");
            assert!((k.to_superop().0 - f.superop().0).norm() < 1e-15, "{f}");
        }
    }

    #[test]
    fn rotation_by_zero_is_identity() {
        for axis in [Vector3::x(), Vector3::new(0.6, 0.0, 0.8)] {
            assert!((rodrigues(&axis, 0.0) - Matrix3::identity()).abs().max() < 1e-15);
        }
    }

    #[test]
    fn half_turn_about_z() {
        let r = rodrigues(&Vector3::z(), PI);
        let expected = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        assert!((r - expected).abs().max() < 1e-15);
    }

    #[test]
    fn rotation_requires_unit_axis() {
        assert!(matches!(
            Fixture::rotation(Vector3::new(1.0, 1.0, 0.0), 0.3),
            Err(Error::InvalidAxis { .. })
        ));
        assert!("rotation:1,1,0,0.3".parse::<Fixture>().is_err());
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(builtin("E4"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn names_round_trip_through_display() {
        for f in [
            Fixture::E1,
            Fixture::E3,
            Fixture::Reset,
            Fixture::Depolarizing(0.25),
            Fixture::Interpolated(0.5),
        ] {
            assert_eq!(f.to_string().parse::<Fixture>().unwrap(), f);
        }
    }

    #[test]
    fn depolarizing_kraus_agrees_with_affine() {
        let f = Fixture::Depolarizing(0.3);
        let a = f.kraus().unwrap().to_superop();
        assert!((a.0 - f.superop().0).norm() < 1e-14);
        assert!(Fixture::Depolarizing(-0.5).kraus().is_none());
    }

    #[test]
    fn random_channels_are_cptp_and_deterministic() {
        for seed in 0..50 {
            let s = random_cptp(seed);
            assert!(check_cptp(&s, DEFAULT_CPTP_TOL).is_cptp());
            assert_eq!(s, random_cptp(seed));
        }
        assert_ne!(random_cptp(1), random_cptp(2));
    }
}
