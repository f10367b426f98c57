//! Compilation of a qubit channel into the average of two one-ancilla circuits.
//!
//! Both circuits share one template:
//!
//! ```text
//! q0 (signal):  U3(a) ────────⊕───────────●──── U3(b)
//! q1 (ancilla): Ry(c1) ───────●── Ry(c2) ─⊕────────
//! ```
//!
//! The sixteen angles are fitted by Levenberg–Marquardt so that
//! `(Φ_1 + Φ_2)/2` matches the target's Pauli transfer matrix.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gate::{Circuit, Gate, ANCILLA, SIGNAL};
use super::sim::{induced_channel, induced_channel_kraus};
use crate::channel::{check_cptp, CptpReport, SuperOperator, DEFAULT_CPTP_TOL};
use crate::error::{Error, Result};
use crate::optim::{levenberg_marquardt, LmOptions};

pub const TEMPLATE_PARAMS: usize = 8;

/// One circuit of the template, from 8 angles.
pub fn template(x: &[f64]) -> Circuit {
    assert_eq!(x.len(), TEMPLATE_PARAMS);
    Circuit::new(vec![
        Gate::U3 { qubit: SIGNAL, theta: x[0], phi: x[1], lambda: x[2] },
        Gate::Ry { qubit: ANCILLA, theta: x[3] },
        Gate::Cnot { control: ANCILLA, target: SIGNAL },
        Gate::Ry { qubit: ANCILLA, theta: x[4] },
        Gate::Cnot { control: SIGNAL, target: ANCILLA },
        Gate::U3 { qubit: SIGNAL, theta: x[5], phi: x[6], lambda: x[7] },
    ])
    .expect("template qubits are valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub q1: Circuit,
    pub q2: Circuit,
    /// Frobenius distance between the target and the induced average.
    pub residual: f64,
}

impl Decomposition {
    pub fn average(&self) -> SuperOperator {
        SuperOperator((induced_channel(&self.q1).0 + induced_channel(&self.q2).0) * crate::linalg::cr(0.5))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            starts: 8,
            seed: 0,
        }
    }
}

fn transfer_rows(s: &SuperOperator) -> [f64; 12] {
    let t = s.pauli_transfer_complex();
    std::array::from_fn(|k| t[(1 + k / 4, k % 4)].re)
}

/// `decompose_with` using default options.
pub fn decompose(s: &SuperOperator, tol: f64) -> Result<Decomposition> {
    decompose_with(s, tol, &DecomposeOptions::default())
}

/// Fits two template circuits whose average reproduces `s` within `tol`
/// (superoperator Frobenius norm).
///
/// Start 0 has the ancilla block acting as the identity (`Ry(0)`, `Ry(π/2)`),
/// so unitary targets close immediately; the remaining starts are seeded
/// uniformly random angles. The best start is kept.
pub fn decompose_with(s: &SuperOperator, tol: f64, opts: &DecomposeOptions) -> Result<Decomposition> {
    let report = check_cptp(s, DEFAULT_CPTP_TOL);
    if !report.is_cptp() {
        return Err(Error::NotCptp {
            min_eigenvalue: report.min_choi_eigenvalue,
            tp_residual: report.tp_residual,
        });
    }
    let target = transfer_rows(s);
    let residual = |x: &[f64]| -> Vec<f64> {
        let a = transfer_rows(&induced_channel_kraus(&template(&x[..TEMPLATE_PARAMS])));
        let b = transfer_rows(&induced_channel_kraus(&template(&x[TEMPLATE_PARAMS..])));
        (0..12).map(|k| 0.5 * (a[k] + b[k]) - target[k]).collect()
    };
    let lm = LmOptions {
        max_iter: opts.max_iter,
        target: (tol * 1e-3).max(1e-15),
        ..LmOptions::default()
    };

    let mut best: Option<Decomposition> = None;
    for start in 0..opts.starts.max(1) {
        let x0: Vec<f64> = if start == 0 {
            let half = [0.0, 0.0, 0.0, 0.0, FRAC_PI_2, 0.0, 0.0, 0.0];
            half.iter().chain(half.iter()).copied().collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(start as u64));
            (0..2 * TEMPLATE_PARAMS).map(|_| rng.random_range(-PI..PI)).collect()
        };
        let fit = levenberg_marquardt(residual, &x0, &lm);
        let d = Decomposition {
            q1: template(&fit.x[..TEMPLATE_PARAMS]),
            q2: template(&fit.x[TEMPLATE_PARAMS..]),
            residual: 0.0,
        };
        let d = Decomposition {
            residual: d.average().frobenius_distance(s),
            ..d
        };
        let better = best.as_ref().is_none_or(|b| d.residual < b.residual);
        if better {
            best = Some(d);
        }
        if best.as_ref().unwrap().residual <= tol {
            break;
        }
    }
    let best = best.unwrap();
    if best.residual <= tol {
        Ok(best)
    } else {
        Err(Error::DecompositionFailed {
            residual: best.residual,
            tol,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verification {
    pub distance: f64,
    pub q1: CptpReport,
    pub q2: CptpReport,
}

/// Frobenius distance between `s` and the average induced by `d`, plus CPTP
/// reports for each circuit's channel.
pub fn verify_decomposition(s: &SuperOperator, d: &Decomposition) -> Verification {
    let a = induced_channel(&d.q1);
    let b = induced_channel(&d.q2);
    let avg = SuperOperator((a.0 + b.0) * crate::linalg::cr(0.5));
    Verification {
        distance: avg.frobenius_distance(s),
        q1: check_cptp(&a, DEFAULT_CPTP_TOL),
        q2: check_cptp(&b, DEFAULT_CPTP_TOL),
    }
}
