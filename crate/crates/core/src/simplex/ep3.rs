use nalgebra::{Matrix2, Matrix3, Vector2};

use super::{SimplexPoint, Triple};
use crate::channel::SuperOperator;
use crate::error::{Error, Result};
use crate::linalg::{c, complexify3, line_sine, right_singular_ascending, CMatrix3};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::spectral::ep::real_representative;
use crate::spectral::{ep_order, spectrum, DepressedCubic, EPRecord, PointKind, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ep3Options {
    pub max_iter: usize,
    /// Residual of the depressed-cubic coefficients `|P| + |Q|` accepted as a triple root.
    pub residual_tol: f64,
    /// Singular-value threshold passed to [`ep_order`].
    pub order_tol: f64,
}

impl Default for Ep3Options {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            residual_tol: 1e-12,
            order_tol: 1e-7,
        }
    }
}

fn weights(x: &[f64]) -> [f64; 3] {
    [x[0], x[1], 1.0 - x[0] - x[1]]
}

fn coalescence_objective(t: &Triple, x: &[f64]) -> f64 {
    let a = weights(x);
    let outside: f64 = a.iter().map(|v| (-v).max(0.0)).sum();
    if outside > 0.0 {
        return 1e3 * (1.0 + outside);
    }
    match crate::spectral::eigenvalues(&t.at(&a)) {
        Ok(ev) => {
            let mut s = 0.0;
            for i in 0..3 {
                for j in i + 1..3 {
                    s += (ev[i] - ev[j]).norm_sqr();
                }
            }
            s
        }
        Err(_) => f64::INFINITY,
    }
}

/// `(P, Q)` of the depressed characteristic cubic; both vanish exactly at a triple root.
fn pq(t: &Triple, x: &Vector2<f64>) -> Vector2<f64> {
    let d = DepressedCubic::of(&t.at(&weights(x.as_slice())));
    Vector2::new(d.p, d.q)
}

fn pq_jacobian(t: &Triple, x: &Vector2<f64>) -> Matrix2<f64> {
    const H: f64 = 1e-6;
    let mut j = Matrix2::zeros();
    for k in 0..2 {
        let mut up = *x;
        let mut dn = *x;
        up[k] += H;
        dn[k] -= H;
        j.set_column(k, &((pq(t, &up) - pq(t, &dn)) / (2.0 * H)));
    }
    j
}

fn inside(x: &Vector2<f64>) -> bool {
    weights(x.as_slice()).iter().all(|&v| v >= 0.0)
}

/// Damped Newton on `(P, Q) = 0`, never leaving the simplex.
fn polish(t: &Triple, x0: Vector2<f64>, iters: usize) -> (Vector2<f64>, f64) {
    let mut x = x0;
    let mut r = pq(t, &x).abs().sum();
    for _ in 0..iters {
        if r == 0.0 {
            break;
        }
        let Some(inv) = pq_jacobian(t, &x).try_inverse() else {
            break;
        };
        let dx = inv * pq(t, &x);
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-6 {
            let cand = x - dx * step;
            let rc = pq(t, &cand).abs().sum();
            if inside(&cand) && rc < r {
                x = cand;
                r = rc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, r)
}

/// Searches the simplex interior for a triple eigenvalue coalescence of
/// `E(a) = a1 E_1 + a2 E_2 + a3 E_3`.
///
/// Nelder–Mead minimizes `Σ_{i<j} |λ_i − λ_j|²` from `seed`; Newton on the
/// depressed-cubic coefficients then pins the zero. Zeros on the simplex
/// boundary and zeros with a singular Jacobian (not isolated) are rejected,
/// and the local search is repeated with a different initial simplex size.
/// The order is decided by [`ep_order`] alone.
pub fn ep3_search(channels: &[SuperOperator; 3], seed: &SimplexPoint, opts: &Ep3Options) -> Result<EPRecord> {
    if !seed.is_interior() {
        return Err(Error::OutsideSimplex(seed.a.to_vec()));
    }
    let t = Triple::new(channels)?;
    let mut last = None;
    for step in INITIAL_STEPS {
        match attempt(&t, seed, step, opts) {
            Ok(x) => return record(&t, &x, opts),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Initial Nelder–Mead simplex sizes tried in turn from the same seed.
const INITIAL_STEPS: [f64; 4] = [0.02, 0.05, 0.1, 0.01];

/// Smallest barycentric coordinate for a point to count as interior.
const INTERIOR_MARGIN: f64 = 1e-6;

fn attempt(t: &Triple, seed: &SimplexPoint, step: f64, opts: &Ep3Options) -> Result<Vector2<f64>> {
    let nm = NelderMeadOptions {
        max_iter: opts.max_iter,
        initial_step: step,
        ..NelderMeadOptions::default()
    };
    let coarse = nelder_mead(|x| coalescence_objective(t, x), &seed.a[..2], &nm);
    let (x, residual) = polish(t, Vector2::new(coarse.x[0], coarse.x[1]), 100);
    let a = weights(x.as_slice());
    let fail = |reason: &str| Error::NoConvergence {
        reason: reason.into(),
        best: a.to_vec(),
        objective: residual,
    };
    let scale = t.at(&a).norm().max(1.0);
    if a.iter().any(|&v| v < INTERIOR_MARGIN) {
        return Err(fail("search left the simplex interior"));
    }
    if residual > opts.residual_tol * scale.powi(3) {
        return Err(fail("no triple coalescence reached"));
    }
    let jac = pq_jacobian(t, &x);
    let jn = jac.norm();
    if jn <= 1e-10 || jac.determinant().abs() <= 1e-8 * jn * jn {
        return Err(fail("objective has no isolated zero"));
    }
    Ok(x)
}

fn record(t: &Triple, x: &Vector2<f64>, opts: &Ep3Options) -> Result<EPRecord> {
    let a = weights(x.as_slice());
    let e = t.at(&a);
    let lambda = c(e.trace() / 3.0, 0.0);
    let order = ep_order(&e, lambda, opts.order_tol)?;
    let report = spectrum(&e, DEFAULT_TOL)?;
    let v = coalesced_vector(&e, lambda);
    let gap = (0..3)
        .map(|k| line_sine(&report.right(k), &v))
        .fold(0.0, f64::max);
    let kind = if order >= 2 { PointKind::EP } else { PointKind::DP };
    Ok(EPRecord {
        params: a.to_vec(),
        coalesced_eigenvalue: lambda,
        order,
        min_rigidity: report.min_rigidity(),
        eigenvector_gap: gap,
        kind,
        coalesced_eigenvector: (kind == PointKind::EP).then(|| real_representative(&v)),
        order_confirmed: order >= 2,
    })
}

fn coalesced_vector(e: &Matrix3<f64>, lambda: nalgebra::Complex<f64>) -> nalgebra::Vector3<nalgebra::Complex<f64>> {
    let n = complexify3(e) - CMatrix3::identity() * lambda;
    right_singular_ascending(&n)[0].1
}
