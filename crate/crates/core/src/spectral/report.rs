use std::fmt;

use nalgebra::{DMatrix, Matrix3};
use serde::Serialize;

use super::eig::eigenvalues;
use crate::error::{Error, Result};
use crate::linalg::{bdot3, complexify3, cr, dense_svd, right_singular_ascending, CMatrix3, CVector3, C64};
use crate::serde_util;

/// Default classification tolerance, relative to `max(1, ‖E‖_F)`.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    KExact,
    KBroken,
    Boundary,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::KExact => "k_exact",
            Phase::KBroken => "k_broken",
            Phase::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    #[serde(serialize_with = "serde_util::complex_array")]
    pub eigenvalues: [C64; 3],
    /// Column `k` pairs with `eigenvalues[k]`.
    #[serde(serialize_with = "serde_util::complex_columns")]
    pub right_eigenvectors: CMatrix3,
    #[serde(serialize_with = "serde_util::complex_columns")]
    pub left_eigenvectors: CMatrix3,
    pub phase: Phase,
    pub rigidities: [f64; 3],
    /// `max(1, ‖E‖_F)`, the scale used for all thresholds.
    pub scale: f64,
}

impl SpectrumReport {
    pub fn right(&self, k: usize) -> CVector3 {
        self.right_eigenvectors.column(k).into_owned()
    }

    pub fn left(&self, k: usize) -> CVector3 {
        self.left_eigenvectors.column(k).into_owned()
    }

    pub fn min_rigidity(&self) -> f64 {
        self.rigidities.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest eigenvalue-equation residual `‖E v − λ v‖ / ‖v‖` over the columns.
    pub fn max_residual(&self, e: &Matrix3<f64>) -> f64 {
        let ec = complexify3(e);
        (0..3)
            .map(|k| {
                let v = self.right(k);
                (ec * v - v * self.eigenvalues[k]).norm() / v.norm()
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn scale_of(e: &Matrix3<f64>) -> f64 {
    e.norm().max(1.0)
}

/// `|vL·vR| / (‖vL‖ ‖vR‖)` with the bilinear (unconjugated) product.
pub fn phase_rigidity(vl: &CVector3, vr: &CVector3) -> Result<f64> {
    let (nl, nr) = (vl.norm(), vr.norm());
    if nl == 0.0 || nr == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((bdot3(vl, vr).norm() / (nl * nr)).min(1.0))
}

fn classify_values(ev: &[C64; 3], thr: f64) -> Phase {
    let complex = ev.iter().filter(|z| z.im.abs() > thr).count();
    if complex == 2 {
        return Phase::KBroken;
    }
    let degenerate = (0..3).any(|i| (i + 1..3).any(|j| (ev[i] - ev[j]).norm() <= thr));
    if complex == 0 && !degenerate {
        Phase::KExact
    } else {
        Phase::Boundary
    }
}

/// Reclassifies a report at a possibly different tolerance.
pub fn classify_phase(report: &SpectrumReport, tol: f64) -> Phase {
    classify_values(&report.eigenvalues, tol * report.scale)
}

/// Phase label straight from the eigenvalues, skipping eigenvectors.
pub fn phase_of(e: &Matrix3<f64>, tol: f64) -> Result<Phase> {
    Ok(classify_values(&eigenvalues(e)?, tol * scale_of(e)))
}

fn null_basis(m: &CMatrix3, thr: f64, max_dim: usize) -> Vec<CVector3> {
    let sv = right_singular_ascending(m);
    let dim = sv.iter().filter(|(s, _)| *s <= thr).count().clamp(1, max_dim);
    sv.into_iter().take(dim).map(|(_, v)| v).collect()
}

/// Eigenvalues, left/right eigenvectors, phase and rigidities of a real 3×3 matrix.
///
/// Eigenvalues closer than `tol·scale` are treated as one cluster; each
/// cluster gets a biorthogonal pairing of its left and right null spaces, and
/// missing directions of defective clusters repeat the last vector with
/// rigidity 0.
pub fn spectrum(e: &Matrix3<f64>, tol: f64) -> Result<SpectrumReport> {
    let ev = eigenvalues(e)?;
    let scale = scale_of(e);
    let thr = tol * scale;
    let ec = complexify3(e);
    let ect = ec.transpose();

    let mut right = CMatrix3::zeros();
    let mut left = CMatrix3::zeros();
    let mut rig = [0.0; 3];

    let mut assigned = [false; 3];
    for i in 0..3 {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..3)
            .filter(|&j| !assigned[j] && (ev[j] - ev[i]).norm() <= thr)
            .collect();
        for &j in &members {
            assigned[j] = true;
        }
        let m = members.len();
        let mean = members.iter().map(|&j| ev[j]).sum::<C64>() / cr(m as f64);
        let shifted = |a: &CMatrix3| a - CMatrix3::identity() * mean;
        let vr = null_basis(&shifted(&ec), 10.0 * thr, m);
        let vl = null_basis(&shifted(&ect), 10.0 * thr, m);
        let k = vr.len().min(vl.len());

        let g = DMatrix::from_fn(k, k, |a, b| bdot3(&vl[a], &vr[b]));
        let (ua, sig, vbt) = dense_svd(g);
        let vb = vbt.adjoint();
        for (slot, &j) in members.iter().enumerate() {
            let col = slot.min(k - 1);
            let mut r = CVector3::zeros();
            let mut l = CVector3::zeros();
            for b in 0..k {
                r += vr[b] * vb[(b, col)];
                l += vl[b] * ua[(b, col)].conj();
            }
            right.set_column(j, &r);
            left.set_column(j, &l);
            rig[j] = if slot < k { sig[col].min(1.0) } else { 0.0 };
        }
    }

    Ok(SpectrumReport {
        eigenvalues: ev,
        right_eigenvectors: right,
        left_eigenvectors: left,
        phase: classify_values(&ev, thr),
        rigidities: rig,
        scale,
    })
}
