//! Small fixed-size linear-algebra helpers shared by the channel, spectral
//! and tomography code.

use nalgebra::{Complex, DMatrix, Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3};

pub type C64 = Complex<f64>;
pub type CMatrix2 = Matrix2<C64>;
pub type CMatrix3 = Matrix3<C64>;
pub type CMatrix4 = Matrix4<C64>;
pub type CVector3 = Vector3<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Pauli matrix `σ_k` for `k ∈ {0, 1, 2, 3}` (identity, X, Y, Z).
pub fn pauli(k: usize) -> CMatrix2 {
    let z = cr(0.0);
    let one = cr(1.0);
    match k {
        0 => CMatrix2::identity(),
        1 => CMatrix2::new(z, one, one, z),
        2 => CMatrix2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        3 => CMatrix2::new(one, z, z, -one),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// Principal square root of a 2×2 matrix with no eigenvalues on the
/// closed negative real axis.
///
/// Uses `√A = (A + s·I) / t` with `s = √det A` and `t = √(tr A + 2s)`,
/// both on the principal branch.
pub fn sqrtm2(a: &CMatrix2) -> CMatrix2 {
    let s = a.determinant().sqrt();
    let t = (a.trace() + s * 2.0).sqrt();
    (a + CMatrix2::identity() * s) / t
}

/// Real matrix promoted to complex entries.
pub fn complexify3(m: &Matrix3<f64>) -> CMatrix3 {
    m.map(cr)
}

pub fn max_abs<const R: usize, const C: usize>(
    m: &nalgebra::SMatrix<C64, R, C>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian part `(A + A†)/2`.
pub fn hermitian_part4(a: &CMatrix4) -> CMatrix4 {
    (a + a.adjoint()) * cr(0.5)
}

/// Eigen-decomposition of a Hermitian 4×4 matrix (the Hermitian part is used).
pub fn eigh4(a: &CMatrix4) -> SymmetricEigen<C64, nalgebra::U4> {
    SymmetricEigen::new(hermitian_part4(a))
}

/// Apply `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_map4(a: &CMatrix4, f: impl Fn(f64) -> f64) -> CMatrix4 {
    let eig = eigh4(a);
    let d = CMatrix4::from_diagonal(&eig.eigenvalues.map(|x| cr(f(x))));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Partial trace over the second (output) tensor factor of a 2⊗2 operator.
pub fn ptrace_second(a: &CMatrix4) -> CMatrix2 {
    let mut out = CMatrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = a[(2 * i, 2 * j)] + a[(2 * i + 1, 2 * j + 1)];
        }
    }
    out
}

/// Partial trace over the first tensor factor of a 2⊗2 operator.
pub fn ptrace_first(a: &CMatrix4) -> CMatrix2 {
    let mut out = CMatrix2::zeros();
    for k in 0..2 {
        for l in 0..2 {
            out[(k, l)] = a[(k, l)] + a[(2 + k, 2 + l)];
        }
    }
    out
}

pub fn kron2(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    let mut out = CMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Singular triplets of a 3×3 complex matrix sorted by ascending singular value.
///
/// Returns `(σ_k, v_k)` with `v_k` the right singular vector; the vectors of
/// the smallest singular values span the numerical null space.
pub fn right_singular_ascending(m: &CMatrix3) -> Vec<(f64, CVector3)> {
    let svd = m.svd(false, true);
    let v = svd.v_t.expect("v_t requested").adjoint();
    let mut out: Vec<(f64, CVector3)> = (0..3)
        .map(|k| (svd.singular_values[k], v.column(k).into_owned()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Singular values of a 3×3 complex matrix, ascending.
pub fn singular_values_ascending(m: &CMatrix3) -> [f64; 3] {
    let sv = m.singular_values();
    let mut s = [sv[0], sv[1], sv[2]];
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Hermitian inner product `⟨a, b⟩ = a† b`.
pub fn hdot3(a: &CVector3, b: &CVector3) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Bilinear product `aᵀ b` (no conjugation).
pub fn bdot3(a: &CVector3, b: &CVector3) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Sine of the angle between two complex lines (0 for parallel vectors).
pub fn line_sine(a: &CVector3, b: &CVector3) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let ua = a / C64::new(na, 0.0);
    let ub = b / C64::new(nb, 0.0);
    let perp = ub - ua * hdot3(&ua, &ub);
    perp.norm().min(1.0)
}

/// Dense complex SVD for small pairing problems.
pub fn dense_svd(m: DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    (u, svd.singular_values.iter().copied().collect(), v_t)
}
