use crate::channel::SuperOperator;
use crate::linalg::{cr, hermitian_map4, CMatrix4};

/// Uhlmann fidelity `[tr √(√ρ σ √ρ)]²` of two 4×4 density matrices.
///
/// Evaluated as the squared trace norm of `√ρ √σ`, which is symmetric in its
/// arguments to rounding.
pub fn state_fidelity(rho: &CMatrix4, sigma: &CMatrix4) -> f64 {
    let root = |m: &CMatrix4| hermitian_map4(m, |x| x.max(0.0).sqrt());
    let t: f64 = (root(rho) * root(sigma)).singular_values().sum();
    (t * t).clamp(0.0, 1.0)
}

/// Choi-state fidelity on trace-normalized Choi matrices.
pub fn process_fidelity(a: &SuperOperator, b: &SuperOperator) -> f64 {
    let ja = a.choi().0 * cr(0.5);
    let jb = b.choi().0 * cr(0.5);
    state_fidelity(&ja, &jb)
}
