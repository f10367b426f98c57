use serde::Serialize;

use super::repr::SuperOperator;
use crate::linalg::{eigh4, ptrace_second, CMatrix2};

/// Default tolerance for CP and TP checks.
pub const DEFAULT_CPTP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CptpReport {
    pub is_cp: bool,
    pub is_tp: bool,
    pub min_choi_eigenvalue: f64,
    pub tp_residual: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.is_cp && self.is_tp
    }
}

/// CP via the smallest Choi eigenvalue, TP via `Tr_out J = I`.
pub fn check_cptp(s: &SuperOperator, tol: f64) -> CptpReport {
    let j = s.choi();
    let min_choi_eigenvalue = eigh4(j.matrix())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let tp_residual = (ptrace_second(j.matrix()) - CMatrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    CptpReport {
        is_cp: min_choi_eigenvalue >= -tol,
        is_tp: tp_residual <= tol,
        min_choi_eigenvalue,
        tp_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::fixtures::Fixture;
    use crate::channel::repr::AffineBlochRep;
    use nalgebra::{Matrix3, Vector3};

    #[test]
    fn named_fixtures_are_cptp() {
        for f in [Fixture::E1, Fixture::E2, Fixture::E3] {
            let r = check_cptp(&f.superop(), DEFAULT_CPTP_TOL);
            assert!(r.is_cptp(), "{f:?}: {r:?}");
        }
    }

    #[test]
    fn reflection_is_not_cp() {
        // Brute-force check of the Choi spectrum for E = diag(1, 1, -1).
        let s = AffineBlochRep::unital(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)))
            .to_superop();
        let r = check_cptp(&s, DEFAULT_CPTP_TOL);
        assert!(!r.is_cp);
        assert!(r.is_tp);
        assert!(r.min_choi_eigenvalue < -0.4, "{r:?}");
    }

    #[test]
    fn identity_sits_on_cp_boundary() {
        let r = check_cptp(&SuperOperator::identity(), DEFAULT_CPTP_TOL);
        assert!(r.is_cptp());
        assert!(r.min_choi_eigenvalue.abs() < 1e-12);
    }
}
