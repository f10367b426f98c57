//! Closed-form eigenvalues of real 3×3 matrices through the depressed
//! characteristic cubic.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// `det(tI − (E − mI)) = t³ + p t + q` with `m = tr E / 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepressedCubic {
    pub shift: f64,
    pub p: f64,
    pub q: f64,
}

impl DepressedCubic {
    pub fn of(e: &Matrix3<f64>) -> Self {
        let shift = e.trace() / 3.0;
        let a = e - Matrix3::identity() * shift;
        let minor = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
        let p = minor(0, 1) + minor(0, 2) + minor(1, 2);
        let q = -a.determinant();
        Self { shift, p, q }
    }

    /// `−(4p³ + 27q²)`; positive for three distinct real roots.
    pub fn discriminant(&self) -> f64 {
        -(4.0 * self.p.powi(3) + 27.0 * self.q * self.q)
    }

    fn eval(&self, t: C64) -> C64 {
        t * t * t + t * self.p + self.q
    }

    fn polish(&self, t: C64) -> C64 {
        let mut t = t;
        let mut ft = self.eval(t).norm();
        for _ in 0..4 {
            if ft == 0.0 {
                break;
            }
            let d = t * t * 3.0 + self.p;
            if d.norm() == 0.0 {
                break;
            }
            let next = t - self.eval(t) / d;
            let fn_ = self.eval(next).norm();
            if fn_ < ft {
                t = next;
                ft = fn_;
            } else {
                break;
            }
        }
        t
    }

    /// Roots of the depressed cubic; a complex pair is returned as exact conjugates.
    pub fn roots(&self) -> [C64; 3] {
        let (p, q) = (self.p, self.q);
        if p == 0.0 && q == 0.0 {
            return [c(0.0, 0.0); 3];
        }
        if self.discriminant() >= 0.0 && p < 0.0 {
            let r = 2.0 * (-p / 3.0).sqrt();
            let arg = (1.5 * q / p * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
            let phi = arg.acos() / 3.0;
            return std::array::from_fn(|k| {
                let t = r * (phi - 2.0 * PI * k as f64 / 3.0).cos();
                c(self.polish(c(t, 0.0)).re, 0.0)
            });
        }
        let d = q * q / 4.0 + p.powi(3) / 27.0;
        let sign = if q >= 0.0 { 1.0 } else { -1.0 };
        let u = (-q / 2.0 - sign * d.max(0.0).sqrt()).cbrt();
        let tr = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        let tr = self.polish(c(tr, 0.0)).re;
        let rad = -3.0 * tr * tr - 4.0 * p;
        if rad >= 0.0 {
            let s = rad.sqrt();
            let a = self.polish(c((-tr + s) / 2.0, 0.0)).re;
            let b = self.polish(c((-tr - s) / 2.0, 0.0)).re;
            [c(tr, 0.0), c(a, 0.0), c(b, 0.0)]
        } else {
            let z = self.polish(c(-tr / 2.0, (-rad).sqrt() / 2.0));
            let im = z.im.abs();
            [c(tr, 0.0), c(z.re, im), c(z.re, -im)]
        }
    }
}

/// Lexicographic order on (Re, Im).
pub fn sort_eigenvalues(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Eigenvalues of a real 3×3 matrix sorted by real then imaginary part.
pub fn eigenvalues(e: &Matrix3<f64>) -> Result<[C64; 3]> {
    if e.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }
    let cubic = DepressedCubic::of(e);
    let mut out = cubic.roots().map(|t| t + cubic.shift);
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver("cubic solve produced non-finite roots".into()));
    }
    snap_semisimple(e, &mut out);
    sort_eigenvalues(&mut out);
    Ok(out)
}

/// The cubic only resolves a double root to about `√ε`. When the matrix is
/// numerically diagonalizable there (rank drop of 2 or 3), the cluster is
/// replaced by the value implied by the trace, which is accurate to `ε`.
fn snap_semisimple(e: &Matrix3<f64>, ev: &mut [C64; 3]) {
    let scale = e.norm().max(1.0);
    let near = 1e-6 * scale;
    let flat = 1e-11 * scale;
    let tr = e.trace();
    let sv = |lam: f64| {
        let mut s: Vec<f64> = (e - Matrix3::identity() * lam).singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        s
    };
    let close = |i: usize, j: usize| (ev[i] - ev[j]).norm() <= near;
    if close(0, 1) && close(0, 2) && close(1, 2) {
        let lam = tr / 3.0;
        if sv(lam)[2] <= flat {
            *ev = [c(lam, 0.0); 3];
            return;
        }
    }
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        if close(i, j) && !close(i, k) && ev[k].im == 0.0 {
            let lam = (tr - ev[k].re) / 2.0;
            if sv(lam)[1] <= flat {
                ev[i] = c(lam, 0.0);
                ev[j] = c(lam, 0.0);
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_roots(e: &Matrix3<f64>, expected: [C64; 3], tol: f64) {
        let got = eigenvalues(e).unwrap();
        let mut exp = expected;
        sort_eigenvalues(&mut exp);
        for (g, x) in got.iter().zip(exp.iter()) {
            assert!((g - x).norm() <= tol, "{got:?} vs {exp:?}");
        }
    }

    #[test]
    fn diagonal_matrices() {
        let e = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.5, -0.25, 0.1));
        check_roots(&e, [c(0.5, 0.0), c(-0.25, 0.0), c(0.1, 0.0)], 1e-15);
    }

    #[test]
    fn rotation_has_unit_modulus_pair() {
        let t: f64 = 0.7;
        let e = Matrix3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0);
        check_roots(
            &e,
            [c(1.0, 0.0), c(t.cos(), t.sin()), c(t.cos(), -t.sin())],
            1e-14,
        );
    }

    #[test]
    fn triple_root() {
        check_roots(&(Matrix3::identity() * 0.3), [c(0.3, 0.0); 3], 0.0);
        // Nilpotent plus shift: a single Jordan block.
        let j = Matrix3::new(0.2, 1.0, 0.0, 0.0, 0.2, 1.0, 0.0, 0.0, 0.2);
        check_roots(&j, [c(0.2, 0.0); 3], 1e-15);
    }

    #[test]
    fn double_real_root() {
        let e = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.4, 0.4, -0.1));
        check_roots(&e, [c(0.4, 0.0), c(0.4, 0.0), c(-0.1, 0.0)], 1e-15);
        // Same spectrum in a rotated basis.
        let r = crate::channel::rodrigues(&nalgebra::Vector3::new(0.6, 0.0, 0.8), 0.9);
        check_roots(&(r * e * r.transpose()), [c(0.4, 0.0), c(0.4, 0.0), c(-0.1, 0.0)], 1e-14);
    }

    #[test]
    fn agrees_with_general_solver_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let e = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let mut reference: Vec<C64> = e.complex_eigenvalues().iter().copied().collect();
            sort_eigenvalues(&mut reference);
            let got = eigenvalues(&e).unwrap();
            for (g, r) in got.iter().zip(reference.iter()) {
                assert!((g - r).norm() < 1e-9, "{got:?} vs {reference:?}");
            }
        }
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let mut e = Matrix3::identity();
        e[(1, 2)] = f64::NAN;
        assert!(eigenvalues(&e).is_err());
    }
}
