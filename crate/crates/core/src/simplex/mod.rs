//! Three-channel interpolation: phase diagrams, EP lines, EP3 search and slices.

pub mod diagram;
pub mod ep3;
pub mod slice;

use nalgebra::Matrix3;
use serde::Serialize;

use crate::channel::{check_cptp, SuperOperator, DEFAULT_CPTP_TOL};
use crate::error::{Error, Result};

pub use diagram::{phase_diagram, Cell, PhaseDiagram};
pub use ep3::{ep3_search, Ep3Options};
pub use slice::{slice_sweep, SliceRow, SliceTable, Sweep};

const SUM_TOL: f64 = 1e-12;

/// Barycentric coordinates `(a1, a2, a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexPoint {
    pub a: [f64; 3],
}

impl SimplexPoint {
    pub fn new(a: [f64; 3]) -> Result<Self> {
        let sum: f64 = a.iter().sum();
        if a.iter().any(|x| !x.is_finite() || *x < -SUM_TOL) || (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::OutsideSimplex(a.to_vec()));
        }
        Ok(Self { a })
    }

    /// `(a1, a2, 1 − a1 − a2)`.
    pub fn from_pair(a1: f64, a2: f64) -> Result<Self> {
        Self::new([a1, a2, 1.0 - a1 - a2])
    }

    pub fn centroid() -> Self {
        Self { a: [1.0 / 3.0; 3] }
    }

    pub fn is_interior(&self) -> bool {
        self.a.iter().all(|&x| x > 0.0)
    }

    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Distortion matrices of three CPTP channels; `E(a) = Σ a_i E_i`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Triple {
    pub(crate) e: [Matrix3<f64>; 3],
}

impl Triple {
    pub(crate) fn new(channels: &[SuperOperator; 3]) -> Result<Self> {
        let mut e = [Matrix3::zeros(); 3];
        for (slot, s) in e.iter_mut().zip(channels) {
            let rep = check_cptp(s, DEFAULT_CPTP_TOL);
            if !rep.is_cptp() {
                return Err(Error::NotCptp {
                    min_eigenvalue: rep.min_choi_eigenvalue,
                    tp_residual: rep.tp_residual,
                });
            }
            *slot = s.to_affine()?.distortion;
        }
        Ok(Self { e })
    }

    pub(crate) fn at(&self, a: &[f64; 3]) -> Matrix3<f64> {
        self.e[0] * a[0] + self.e[1] * a[1] + self.e[2] * a[2]
    }
}
