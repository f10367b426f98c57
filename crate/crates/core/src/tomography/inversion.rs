use nalgebra::{Matrix3, Vector3};

use super::experiment::{Basis, Observations, PrepLabel};
use crate::channel::{AffineBlochRep, SuperOperator};

/// Affine Bloch estimate from empirical Pauli expectations.
///
/// Column `j` of `E` is half the difference of the outputs for the `±` preps
/// along axis `j`; the shift is the mean output over all six preps.
pub fn linear_inversion(obs: &Observations) -> SuperOperator {
    let out = |prep: PrepLabel| {
        Vector3::from_iterator(Basis::ALL.iter().map(|&b| obs.expectation(prep, b)))
    };
    let mut e = Matrix3::zeros();
    let mut shift = Vector3::zeros();
    for axis in 0..3 {
        let plus = out(PrepLabel::ALL[2 * axis]);
        let minus = out(PrepLabel::ALL[2 * axis + 1]);
        e.set_column(axis, &((plus - minus) * 0.5));
        shift += (plus + minus) / 6.0;
    }
    AffineBlochRep::new(e, shift).to_superop()
}
