//! Spectra of distortion matrices: phases, rigidities, EP location and order.

pub mod eig;
pub mod ep;
pub mod report;

use nalgebra::Matrix3;

use crate::channel::SuperOperator;
use crate::error::Result;

pub use eig::{eigenvalues, DepressedCubic};
pub use ep::{ep_locate_1d, ep_order, EPRecord, EpOptions, PointKind};
pub use report::{classify_phase, phase_of, phase_rigidity, spectrum, Phase, SpectrumReport, DEFAULT_TOL};

/// Distortion matrices of the given channels.
pub fn distortions(channels: &[SuperOperator]) -> Result<Vec<Matrix3<f64>>> {
    channels.iter().map(|s| Ok(s.to_affine()?.distortion)).collect()
}

/// `Σ w_i E_i`; equals the distortion of the mixed channel.
pub fn combine(ds: &[Matrix3<f64>], weights: &[f64]) -> Matrix3<f64> {
    ds.iter()
        .zip(weights)
        .fold(Matrix3::zeros(), |acc, (d, &w)| acc + d * w)
}

/// `p ↦ (1 − p) E_a + p E_b` for two channels.
pub fn pair_family(a: &SuperOperator, b: &SuperOperator) -> Result<impl Fn(f64) -> Matrix3<f64>> {
    let ea = a.to_affine()?.distortion;
    let eb = b.to_affine()?.distortion;
    Ok(move |p: f64| ea * (1.0 - p) + eb * p)
}
