use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::linalg::{cr, pauli, CMatrix2};

const STATE_TOL: f64 = 1e-12;

/// Single-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix2);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to `1e-12`.
    pub fn new(m: CMatrix2) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - cr(1.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_eig = min_eigenvalue_2x2(&m);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by a trusted map without re-validating it.
    pub(crate) fn from_raw(m: CMatrix2) -> Self {
        Self(m)
    }

    pub fn from_bloch(r: &BlochVector) -> Self {
        let m = (pauli(0) + pauli(1) * cr(r.0.x) + pauli(2) * cr(r.0.y) + pauli(3) * cr(r.0.z))
            * cr(0.5);
        Self(m)
    }

    /// Pure state `|ψ⟩⟨ψ|` for a normalized amplitude pair.
    pub fn pure(a0: crate::linalg::C64, a1: crate::linalg::C64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let (a0, a1) = (a0 / norm, a1 / norm);
        Self::new(CMatrix2::new(
            a0 * a0.conj(),
            a0 * a1.conj(),
            a1 * a0.conj(),
            a1 * a1.conj(),
        ))
    }

    pub fn zero() -> Self {
        Self(CMatrix2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0)))
    }

    pub fn one() -> Self {
        Self(CMatrix2::new(cr(0.0), cr(0.0), cr(0.0), cr(1.0)))
    }

    pub fn maximally_mixed() -> Self {
        Self(CMatrix2::identity() * cr(0.5))
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix2 {
        self.0
    }

    pub fn bloch(&self) -> BlochVector {
        let comp = |k| (pauli(k) * self.0).trace().re;
        BlochVector(Vector3::new(comp(1), comp(2), comp(3)))
    }

    pub fn trace(&self) -> crate::linalg::C64 {
        self.0.trace()
    }
}

/// Smaller eigenvalue of the Hermitian part of a 2×2 matrix.
fn min_eigenvalue_2x2(m: &CMatrix2) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    mean - rad
}

/// Bloch vector `(r_x, r_y, r_z)` with `r_k = tr(ρ σ_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub Vector3<f64>);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn bloch_round_trip() {
        let r = BlochVector::new(0.3, -0.4, 0.5);
        let rho = DensityMatrix::from_bloch(&r);
        let back = rho.bloch();
        assert!((back.0 - r.0).norm() < 1e-15);
        assert!(DensityMatrix::new(rho.into_matrix()).is_ok());
    }

    #[test]
    fn y_component_sign_convention() {
        // |y+⟩ = (|0⟩ + i|1⟩)/√2 points along +y.
        let rho = DensityMatrix::pure(cr(1.0), c(0.0, 1.0)).unwrap();
        let r = rho.bloch();
        assert!((r.0.y - 1.0).abs() < 1e-15);
        assert!(r.0.x.abs() < 1e-15 && r.0.z.abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_states() {
        let not_herm = CMatrix2::new(cr(0.5), cr(0.1), cr(0.0), cr(0.5));
        assert!(DensityMatrix::new(not_herm).is_err());
        let bad_trace = CMatrix2::identity();
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = CMatrix2::new(cr(1.2), cr(0.0), cr(0.0), cr(-0.2));
        assert!(DensityMatrix::new(negative).is_err());
    }
}
