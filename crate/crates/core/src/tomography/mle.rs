use serde::Serialize;

use super::experiment::{Basis, Observations, PrepLabel};
use crate::channel::{ChoiMatrix, DensityMatrix, SuperOperator};
use crate::linalg::{cr, eigh4, hermitian_part4, kron2, pauli, ptrace_second, CMatrix2, CMatrix4};

#[derive(Debug, Clone, Copy)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Relative objective change that counts as converged.
    pub rel_tol: f64,
    /// Consecutive accepted steps that must stay below `rel_tol`.
    pub patience: usize,
    /// Alternations per projection onto the CPTP set.
    pub projection_iter: usize,
    pub projection_tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            rel_tol: 1e-10,
            patience: 5,
            projection_iter: 100,
            projection_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    #[serde(skip)]
    pub superop_estimate: SuperOperator,
    #[serde(skip)]
    pub choi_estimate: ChoiMatrix,
    pub neg_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Negative log-likelihood after every accepted step, starting with the initial point.
    pub objective_trace: Vec<f64>,
}

/// Measurement operators `ρᵀ ⊗ Π` with weights, so that `p = tr(J A)`.
struct Model {
    ops: Vec<(CMatrix4, f64)>,
    total: f64,
}

impl Model {
    fn new(obs: &Observations) -> Self {
        let mut ops = Vec::with_capacity(36);
        for prep in PrepLabel::ALL {
            let rho_t = DensityMatrix::from_bloch(&prep.bloch()).into_matrix().transpose();
            for basis in Basis::ALL {
                let sigma = pauli(basis as usize + 1);
                let w = obs.weight(prep, basis);
                for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                    let proj = (CMatrix2::identity() + sigma * cr(sign)) * cr(0.5);
                    ops.push((kron2(&rho_t, &proj), w[k]));
                }
            }
        }
        let total = ops.iter().map(|o| o.1).sum::<f64>().max(f64::MIN_POSITIVE);
        Self { ops, total }
    }

    fn prob(a: &CMatrix4, j: &CMatrix4) -> f64 {
        a.component_mul(&j.transpose()).sum().re
    }

    /// Mean negative log-likelihood; `+∞` when an observed outcome gets probability ≤ 0.
    fn objective(&self, j: &CMatrix4) -> f64 {
        let mut acc = 0.0;
        for (a, w) in &self.ops {
            if *w == 0.0 {
                continue;
            }
            let p = Self::prob(a, j);
            if p <= 0.0 {
                return f64::INFINITY;
            }
            acc -= w * p.ln();
        }
        acc / self.total
    }

    fn gradient(&self, j: &CMatrix4) -> CMatrix4 {
        let mut g = CMatrix4::zeros();
        for (a, w) in &self.ops {
            if *w == 0.0 {
                continue;
            }
            let p = Self::prob(a, j).max(1e-300);
            g -= a * cr(w / (p * self.total));
        }
        hermitian_part4(&g)
    }
}

fn project_tp(j: &CMatrix4) -> CMatrix4 {
    let excess = ptrace_second(j) - CMatrix2::identity();
    j - kron2(&excess, &CMatrix2::identity()) * cr(0.5)
}

fn project_psd(j: &CMatrix4) -> CMatrix4 {
    crate::linalg::hermitian_map4(j, |x| x.max(0.0))
}

/// Point of the CPTP set near `v`.
///
/// Dykstra alternation between PSD clipping and the affine TP projection,
/// then an exact TP projection and the smallest admixture of `I/2` that
/// restores positivity.
pub(crate) fn project_cptp(v: &CMatrix4, iters: usize, tol: f64) -> CMatrix4 {
    let mut x = hermitian_part4(v);
    let mut p = CMatrix4::zeros();
    for _ in 0..iters {
        let y = project_psd(&(x + p));
        p = x + p - y;
        let x_new = project_tp(&y);
        let moved = (x_new - x).norm();
        x = x_new;
        if moved < tol {
            break;
        }
    }
    let x = hermitian_part4(&project_tp(&x));
    let e = (-eigh4(&x).eigenvalues.min()).max(0.0);
    if e > 0.0 {
        let w = 2.0 * e / (1.0 + 2.0 * e);
        x * cr(1.0 - w) + CMatrix4::identity() * cr(w * 0.5)
    } else {
        x
    }
}

/// Projected-gradient maximum likelihood over CPTP Choi matrices.
///
/// Steps use backtracking with the usual sufficient-decrease test for
/// projected gradients, so the recorded objective never increases.
/// The likelihood is flat along directions that leave the rank of a
/// boundary channel, so one small change does not end the run; the change
/// has to stay below `rel_tol` for `patience` accepted steps.
pub fn mle_cptp_fit(obs: &Observations, init: &SuperOperator, opts: &MleOptions) -> ReconstructionResult {
    let model = Model::new(obs);
    let mut j = project_cptp(&init.choi().0, opts.projection_iter, opts.projection_tol);
    let mut f = model.objective(&j);
    if !f.is_finite() {
        // Start from the maximally mixed Choi state, where every probability is 1/2.
        j = CMatrix4::identity() * cr(0.5);
        f = model.objective(&j);
    }
    let mut trace = vec![f * model.total];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut quiet = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let g = model.gradient(&j);
        let mut accepted = None;
        let mut t = step;
        while t > 1e-18 {
            let cand = project_cptp(&(j - g * cr(t)), opts.projection_iter, opts.projection_tol);
            let d = cand - j;
            let fc = model.objective(&cand);
            let bound = f + (g.adjoint() * d).trace().re + d.norm_squared() / (2.0 * t);
            if fc.is_finite() && fc <= bound && fc <= f {
                accepted = Some((cand, fc, t));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc, t)) = accepted else {
            converged = true;
            break;
        };
        let change = (f - fc).abs() / f.abs().max(1.0);
        j = cand;
        f = fc;
        trace.push(f * model.total);
        step = (t * 2.0).min(1e6);
        quiet = if change <= opts.rel_tol { quiet + 1 } else { 0 };
        if quiet >= opts.patience.max(1) {
            converged = true;
            break;
        }
    }
    let choi = ChoiMatrix(j);
    ReconstructionResult {
        superop_estimate: choi.to_superop(),
        choi_estimate: choi,
        neg_log_likelihood: f * model.total,
        iterations,
        converged,
        objective_trace: trace,
    }
}
