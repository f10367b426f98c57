//! JSON channel definition files.
//!
//! ```json
//! { "name": "E2", "repr": "affine", "shift": [0, 0, 0],
//!   "distortion": [[0, 0, 0], [0, 0.5, 0], [0, 0, -0.5]] }
//! ```
//!
//! Exactly one representation (`kraus`, `shift` + `distortion`, or
//! `superop`) must be present and must agree with `repr`.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::repr::{AffineBlochRep, KrausSet, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix2, CMatrix4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReprKind {
    Kraus,
    Affine,
    Superop,
}

type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub name: String,
    pub repr: ReprKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<[[Pair; 2]; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superop: Option<[[Pair; 4]; 4]>,
}

impl ChannelFile {
    pub fn from_affine(name: &str, a: &AffineBlochRep) -> Self {
        let d = &a.distortion;
        Self {
            name: name.to_string(),
            repr: ReprKind::Affine,
            kraus: None,
            shift: Some([a.shift.x, a.shift.y, a.shift.z]),
            distortion: Some(std::array::from_fn(|i| std::array::from_fn(|j| d[(i, j)]))),
            superop: None,
        }
    }

    pub fn from_superop(name: &str, s: &SuperOperator) -> Self {
        let m = s.matrix();
        Self {
            name: name.to_string(),
            repr: ReprKind::Superop,
            kraus: None,
            shift: None,
            distortion: None,
            superop: Some(std::array::from_fn(|i| {
                std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im])
            })),
        }
    }

    pub fn from_kraus(name: &str, k: &KrausSet) -> Self {
        let ops = k
            .operators()
            .iter()
            .map(|m| std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im])))
            .collect();
        Self {
            name: name.to_string(),
            repr: ReprKind::Kraus,
            kraus: Some(ops),
            shift: None,
            distortion: None,
            superop: None,
        }
    }

    fn check_keys(&self) -> Result<()> {
        let present = [
            (ReprKind::Kraus, self.kraus.is_some()),
            (ReprKind::Affine, self.shift.is_some() || self.distortion.is_some()),
            (ReprKind::Superop, self.superop.is_some()),
        ];
        let count = present.iter().filter(|p| p.1).count();
        if count != 1 {
            return Err(Error::Parse(format!(
                "channel file must hold exactly one representation, found {count}"
            )));
        }
        if !present.iter().any(|&(k, p)| p && k == self.repr) {
            return Err(Error::Parse(format!(
                "repr {:?} does not match the representation present",
                self.repr
            )));
        }
        if self.repr == ReprKind::Affine && (self.shift.is_none() || self.distortion.is_none()) {
            return Err(Error::Parse("affine repr needs both shift and distortion".into()));
        }
        Ok(())
    }

    /// Superoperator described by the file. Does not check CPTP.
    pub fn superop(&self) -> Result<SuperOperator> {
        self.check_keys()?;
        match self.repr {
            ReprKind::Kraus => {
                let ops = self
                    .kraus
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|k| CMatrix2::from_fn(|i, j| c(k[i][j][0], k[i][j][1])))
                    .collect();
                Ok(KrausSet::new(ops)?.to_superop())
            }
            ReprKind::Affine => {
                let s = self.shift.unwrap();
                let d = self.distortion.unwrap();
                Ok(AffineBlochRep::new(
                    Matrix3::from_fn(|i, j| d[i][j]),
                    Vector3::from(s),
                )
                .to_superop())
            }
            ReprKind::Superop => {
                let m = self.superop.unwrap();
                Ok(SuperOperator(CMatrix4::from_fn(|i, j| c(m[i][j][0], m[i][j][1]))))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text)?;
        f.check_keys()?;
        Ok(f)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
