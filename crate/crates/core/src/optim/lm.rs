use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Central-difference step for the Jacobian.
    pub fd_step: f64,
    /// Stop once the residual norm reaches this value.
    pub target: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            fd_step: 1e-7,
            target: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: &F, x: &[f64], m: usize, h: f64) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, x.len());
    let mut xp = x.to_vec();
    for k in 0..x.len() {
        xp[k] = x[k] + h;
        let fp = f(&xp);
        xp[k] = x[k] - h;
        let fm = f(&xp);
        xp[k] = x[k];
        for i in 0..m {
            j[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    j
}

/// Levenberg–Marquardt on `‖r(x)‖²` with a finite-difference Jacobian and
/// Nielsen's damping update.
pub fn levenberg_marquardt<F: Fn(&[f64]) -> Vec<f64>>(f: F, x0: &[f64], opts: &LmOptions) -> LmResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = DVector::from_vec(f(&x));
    let m = r.len();
    let mut cost = r.norm_squared();
    let mut mu = -1.0;
    let mut nu = 2.0;
    let mut iterations = 0;
    let mut j = jacobian(&f, &x, m, opts.fd_step);
    while iterations < opts.max_iter && cost.sqrt() > opts.target {
        iterations += 1;
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        if mu < 0.0 {
            mu = 1e-3 * (0..n).map(|k| jtj[(k, k)]).fold(0.0, f64::max).max(1e-12);
        }
        let mut a = jtj.clone();
        for k in 0..n {
            a[(k, k)] += mu;
        }
        let Some(step) = a.cholesky().map(|ch| ch.solve(&(-&g))) else {
            mu *= nu;
            nu *= 2.0;
            continue;
        };
        if step.norm() <= 1e-16 * (1.0 + DVector::from_column_slice(&x).norm()) {
            break;
        }
        let x_new: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let r_new = DVector::from_vec(f(&x_new));
        let cost_new = r_new.norm_squared();
        let predicted = -(step.dot(&g) * 2.0 + step.dot(&(&jtj * &step)));
        let rho = if predicted > 0.0 { (cost - cost_new) / predicted } else { -1.0 };
        if cost_new < cost {
            x = x_new;
            r = r_new;
            cost = cost_new;
            j = jacobian(&f, &x, m, opts.fd_step);
            let t = 2.0 * rho.clamp(0.0, 1.0) - 1.0;
            mu *= (1.0f64 / 3.0).max(1.0 - t * t * t);
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
            if !mu.is_finite() || mu > 1e30 {
                break;
            }
        }
    }
    LmResult {
        x,
        residual_norm: cost.sqrt(),
        iterations,
    }
}
