//! Kraus, superoperator, affine-Bloch and Choi representations of a qubit map.
//!
//! Density matrices are vectorized column by column, i.e. in the order
//! `(ρ11, ρ21, ρ12, ρ22)`, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. The affine
//! (Pauli-transfer) form uses the coordinates `(tr ρ, r_x, r_y, r_z)` with
//! `r_k = tr(ρ σ_k)`; in those coordinates every trace-preserving,
//! Hermiticity-preserving map is a real matrix with first row `(1, 0, 0, 0)`.

use nalgebra::{Matrix3, Matrix4, Vector3};

use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c, cr, CMatrix2, CMatrix4, C64};

/// Tolerance on the first affine row for the trace-preservation precondition.
pub const TP_TOL: f64 = 1e-10;
/// Largest imaginary residual accepted when reading off the real affine form.
pub const REALNESS_TOL: f64 = 1e-9;

/// Column-stacking vectorization of a 2×2 matrix.
pub fn vec2(m: &CMatrix2) -> nalgebra::Vector4<C64> {
    nalgebra::Vector4::new(m[(0, 0)], m[(1, 0)], m[(0, 1)], m[(1, 1)])
}

pub fn unvec2(v: &nalgebra::Vector4<C64>) -> CMatrix2 {
    CMatrix2::new(v[0], v[2], v[1], v[3])
}

/// Basis change from `vec(ρ)` to `(tr ρ, r_x, r_y, r_z)`.
fn to_pauli_coords() -> CMatrix4 {
    let (o, z, i) = (cr(1.0), cr(0.0), c(0.0, 1.0));
    CMatrix4::new(
        o, z, z, o, //
        z, o, o, z, //
        z, -i, i, z, //
        o, z, z, -o,
    )
}

fn from_pauli_coords() -> CMatrix4 {
    let (h, z, i) = (cr(0.5), cr(0.0), c(0.0, 0.5));
    CMatrix4::new(
        h, z, z, h, //
        z, h, i, z, //
        z, h, -i, z, //
        h, z, z, -h,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<CMatrix2>,
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix2>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::EmptyKraus);
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[CMatrix2] {
        &self.operators
    }

    /// Largest entry of `Σ K†K − I`.
    pub fn completeness_residual(&self) -> f64 {
        let sum: CMatrix2 = self
            .operators
            .iter()
            .fold(CMatrix2::zeros(), |acc, k| acc + k.adjoint() * k);
        (sum - CMatrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_superop(&self) -> SuperOperator {
        let m = self.operators.iter().fold(CMatrix4::zeros(), |acc, k| {
            acc + k.map(|z| z.conj()).kronecker(k)
        });
        SuperOperator(m)
    }
}

/// `kraus_to_superop`; fails only for an empty set, which `KrausSet` already
/// rules out, so this is infallible on a constructed set.
pub fn kraus_to_superop(k: &KrausSet) -> SuperOperator {
    k.to_superop()
}

/// 4×4 matrix acting on `vec(ρ)` in the order `(ρ11, ρ21, ρ12, ρ22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperOperator(pub CMatrix4);

impl SuperOperator {
    pub fn identity() -> Self {
        Self(CMatrix4::identity())
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.0
    }

    /// Action on an arbitrary 2×2 operator.
    pub fn apply_matrix(&self, x: &CMatrix2) -> CMatrix2 {
        unvec2(&(self.0 * vec2(x)))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_raw(self.apply_matrix(rho.matrix()))
    }

    /// Full 4×4 matrix in Pauli coordinates, complex before the realness check.
    pub fn pauli_transfer_complex(&self) -> CMatrix4 {
        to_pauli_coords() * self.0 * from_pauli_coords()
    }

    pub fn to_affine(&self) -> Result<AffineBlochRep> {
        superop_to_affine(self)
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi_of(self)
    }

    pub fn frobenius_distance(&self, other: &SuperOperator) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// Affine action on the Bloch vector: `r ↦ E r + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineBlochRep {
    pub shift: Vector3<f64>,
    pub distortion: Matrix3<f64>,
}

impl AffineBlochRep {
    pub fn new(distortion: Matrix3<f64>, shift: Vector3<f64>) -> Self {
        Self { shift, distortion }
    }

    pub fn unital(distortion: Matrix3<f64>) -> Self {
        Self::new(distortion, Vector3::zeros())
    }

    /// The implied real 4×4 matrix with first row `(1, 0, 0, 0)`.
    pub fn full_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for i in 0..3 {
            m[(i + 1, 0)] = self.shift[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] = self.distortion[(i, j)];
            }
        }
        m
    }

    pub fn from_full_matrix(m: &Matrix4<f64>) -> Self {
        Self {
            shift: Vector3::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]),
            distortion: m.fixed_view::<3, 3>(1, 1).into_owned(),
        }
    }

    pub fn to_superop(&self) -> SuperOperator {
        affine_to_superop(self)
    }
}

pub fn superop_to_affine(s: &SuperOperator) -> Result<AffineBlochRep> {
    let t = s.pauli_transfer_complex();
    let first_row = [t[(0, 0)] - cr(1.0), t[(0, 1)], t[(0, 2)], t[(0, 3)]];
    let tp_residual = first_row.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if tp_residual > TP_TOL {
        return Err(Error::NotTracePreserving {
            residual: tp_residual,
        });
    }
    let imag = t.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > REALNESS_TOL {
        return Err(Error::NonRealAffine { residual: imag });
    }
    Ok(AffineBlochRep::from_full_matrix(&t.map(|z| z.re)))
}

pub fn affine_to_superop(a: &AffineBlochRep) -> SuperOperator {
    let t = a.full_matrix().map(cr);
    SuperOperator(from_pauli_coords() * t * to_pauli_coords())
}

/// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|)` (input ⊗ output);
/// its trace is 2 for a trace-preserving map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix(pub CMatrix4);

impl ChoiMatrix {
    pub fn matrix(&self) -> &CMatrix4 {
        &self.0
    }

    /// Recovers the superoperator via `S(X) = Tr_in[(Xᵀ ⊗ I) J]`.
    pub fn to_superop(&self) -> SuperOperator {
        let mut m = CMatrix4::zeros();
        for col in 0..4 {
            let mut unit = nalgebra::Vector4::<C64>::zeros();
            unit[col] = cr(1.0);
            let x = unvec2(&unit);
            let y = choi_action(&self.0, &x);
            m.set_column(col, &vec2(&y));
        }
        SuperOperator(m)
    }

    /// Choi state `J / tr J`.
    pub fn normalized(&self) -> CMatrix4 {
        let tr = self.0.trace();
        self.0 / tr
    }
}

/// `Tr_in[(Xᵀ ⊗ I) J]`.
pub(crate) fn choi_action(j: &CMatrix4, x: &CMatrix2) -> CMatrix2 {
    let mut out = CMatrix2::zeros();
    for i in 0..2 {
        for jj in 0..2 {
            // X_ij weights the block S(|i⟩⟨j|).
            let w = x[(i, jj)];
            if w == cr(0.0) {
                continue;
            }
            for k in 0..2 {
                for l in 0..2 {
                    out[(k, l)] += w * j[(2 * i + k, 2 * jj + l)];
                }
            }
        }
    }
    out
}

pub fn choi_of(s: &SuperOperator) -> ChoiMatrix {
    let mut j = CMatrix4::zeros();
    for i in 0..2 {
        for jj in 0..2 {
            let mut unit = CMatrix2::zeros();
            unit[(i, jj)] = cr(1.0);
            let block = s.apply_matrix(&unit);
            for k in 0..2 {
                for l in 0..2 {
                    j[(2 * i + k, 2 * jj + l)] = block[(k, l)];
                }
            }
        }
    }
    ChoiMatrix(j)
}

/// Convex combination `Σ w_i S_i`.
pub fn mix(channels: &[SuperOperator], weights: &[f64]) -> Result<SuperOperator> {
    if channels.is_empty() {
        return Err(Error::InvalidWeights("empty mixture".into()));
    }
    if channels.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} channels but {} weights",
            channels.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("negative or NaN weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let m = channels
        .iter()
        .zip(weights)
        .fold(CMatrix4::zeros(), |acc, (s, &w)| acc + s.0 * cr(w));
    Ok(SuperOperator(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, sqrtm2};

    fn approx_m3(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    /// Brute-force affine form: apply the Kraus map to each Pauli and read off
    /// Bloch components. Independent of the vectorization convention.
    fn affine_by_pauli_expansion(k: &KrausSet) -> (Matrix3<f64>, Vector3<f64>) {
        let act = |x: &CMatrix2| -> CMatrix2 {
            k.operators()
                .iter()
                .fold(CMatrix2::zeros(), |acc, kk| acc + kk * x * kk.adjoint())
        };
        let mut e = Matrix3::zeros();
        let mut s = Vector3::zeros();
        let id_out = act(&(pauli(0) * cr(0.5)));
        for i in 0..3 {
            s[i] = (pauli(i + 1) * id_out).trace().re;
            for j in 0..3 {
                let out = act(&(pauli(j + 1) * cr(0.5)));
                e[(i, j)] = (pauli(i + 1) * out).trace().re;
            }
        }
        (e, s)
    }

    fn e1_kraus() -> KrausSet {
        let root = sqrtm2(&pauli(1)) * cr(0.5f64.sqrt());
        KrausSet::new(vec![root, pauli(2) * cr(0.5), pauli(3) * cr(0.5)]).unwrap()
    }

    fn e2_kraus() -> KrausSet {
        KrausSet::new(vec![
            pauli(0) * cr(0.5),
            pauli(1) * cr(0.5),
            pauli(2) * cr(0.5f64.sqrt()),
        ])
        .unwrap()
    }

    #[test]
    fn identity_kraus_gives_identity_superop() {
        let s = KrausSet::new(vec![CMatrix2::identity()]).unwrap().to_superop();
        assert!((s.0 - CMatrix4::identity()).norm() < 1e-15);
    }

    #[test]
    fn empty_kraus_is_rejected() {
        assert!(matches!(KrausSet::new(vec![]), Err(Error::EmptyKraus)));
    }

    #[test]
    fn e1_kraus_matches_pauli_expansion_oracle() {
        let k = e1_kraus();
        assert!(k.completeness_residual() < 1e-15);
        let (e_oracle, s_oracle) = affine_by_pauli_expansion(&k);
        let expected = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.5, 0.0);
        assert!(approx_m3(&e_oracle, &expected, 1e-15));
        assert!(s_oracle.norm() < 1e-15);
        let a = k.to_superop().to_affine().unwrap();
        assert!(approx_m3(&a.distortion, &expected, 1e-15));
        assert!(a.shift.norm() < 1e-15);
    }

    #[test]
    fn e2_kraus_gives_diagonal_distortion() {
        let a = e2_kraus().to_superop().to_affine().unwrap();
        assert!(approx_m3(
            &a.distortion,
            &Matrix3::from_diagonal(&Vector3::new(0.0, 0.5, -0.5)),
            1e-15
        ));
        assert!(a.shift.norm() < 1e-15);
    }

    #[test]
    fn reset_channel_affine_form() {
        // ρ ↦ |0⟩⟨0|: Kraus |0⟩⟨0| and |0⟩⟨1|.
        let k0 = CMatrix2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0));
        let k1 = CMatrix2::new(cr(0.0), cr(1.0), cr(0.0), cr(0.0));
        let a = KrausSet::new(vec![k0, k1])
            .unwrap()
            .to_superop()
            .to_affine()
            .unwrap();
        assert!(a.distortion.abs().max() < 1e-15);
        assert!((a.shift - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn affine_identity_round_trip() {
        let s = AffineBlochRep::unital(Matrix3::identity()).to_superop();
        assert!((s.0 - CMatrix4::identity()).norm() < 1e-15);
        let back = s.to_affine().unwrap();
        assert!(approx_m3(&back.distortion, &Matrix3::identity(), 1e-15));
    }

    #[test]
    fn non_tp_map_is_rejected() {
        let s = SuperOperator(CMatrix4::identity() * cr(0.5));
        assert!(matches!(
            superop_to_affine(&s),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn non_hermiticity_preserving_map_is_rejected() {
        // ρ ↦ e^{iθ} ρ scaled on the coherences only keeps TP but makes E complex.
        let mut m = CMatrix4::identity();
        m[(1, 1)] = c(0.0, 1.0);
        m[(2, 2)] = c(0.0, 1.0);
        assert!(matches!(
            superop_to_affine(&SuperOperator(m)),
            Err(Error::NonRealAffine { .. })
        ));
    }

    #[test]
    fn choi_of_identity_is_bell_projector() {
        let j = choi_of(&SuperOperator::identity());
        let eig = crate::linalg::eigh4(&j.0);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        assert!((ev[0] - 2.0).abs() < 1e-14);
        assert!(ev[1..].iter().all(|x| x.abs() < 1e-14));
        assert!((j.0.trace() - cr(2.0)).norm() < 1e-15);
    }

    #[test]
    fn choi_round_trip() {
        let s = e1_kraus().to_superop();
        let back = choi_of(&s).to_superop();
        assert!((back.0 - s.0).norm() < 1e-14);
    }

    #[test]
    fn e2_choi_spectrum() {
        // Kraus weights {1/4, 1/4, 1/2} on orthogonal Paulis, times tr = 2.
        let j = choi_of(&e2_kraus().to_superop());
        let eig = crate::linalg::eigh4(&j.0);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        let expected = [0.0, 0.5, 0.5, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn mix_validates_weights() {
        let id = SuperOperator::identity();
        assert!(mix(&[], &[]).is_err());
        assert!(mix(&[id, id], &[0.5]).is_err());
        assert!(mix(&[id, id], &[1.5, -0.5]).is_err());
        assert!(mix(&[id, id], &[0.5, 0.6]).is_err());
        assert!(mix(&[id, id], &[1.0, 0.0]).is_ok());
        let single = mix(&[id], &[1.0]).unwrap();
        assert_eq!(single, id);
    }

    #[test]
    fn apply_e2_to_ground_state() {
        let s = e2_kraus().to_superop();
        let out = s.apply(&DensityMatrix::zero());
        let r = out.bloch();
        assert!((r.0 - Vector3::new(0.0, 0.0, -0.5)).norm() < 1e-15);
        assert!((out.trace() - cr(1.0)).norm() < 1e-15);
    }
}
