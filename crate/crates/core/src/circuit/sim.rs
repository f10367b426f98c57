use crate::channel::repr::{kraus_to_superop, vec2, KrausSet, SuperOperator};
use crate::channel::DensityMatrix;
use crate::linalg::{cr, ptrace_second, CMatrix2, CMatrix4};

use super::gate::Circuit;

/// `Tr_anc[U (ρ ⊗ |0⟩⟨0|) U†]`.
pub fn simulate(c: &Circuit, rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_raw(evolve(&c.unitary(), rho.matrix()))
}

fn evolve(u: &CMatrix4, x: &CMatrix2) -> CMatrix2 {
    let zero = CMatrix2::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0));
    let full = crate::linalg::kron2(x, &zero);
    ptrace_second(&(u * full * u.adjoint()))
}

/// Superoperator assembled column by column from the action on the matrix units `|i⟩⟨j|`.
pub fn induced_channel(c: &Circuit) -> SuperOperator {
    let u = c.unitary();
    let mut s = CMatrix4::zeros();
    for j in 0..2 {
        for i in 0..2 {
            let mut unit = CMatrix2::zeros();
            unit[(i, j)] = cr(1.0);
            s.set_column(i + 2 * j, &vec2(&evolve(&u, &unit)));
        }
    }
    SuperOperator(s)
}

/// Same channel through the circuit's two Kraus operators; cheaper than [`induced_channel`].
pub(crate) fn induced_channel_kraus(c: &Circuit) -> SuperOperator {
    let k = KrausSet::new(c.kraus().to_vec()).expect("two operators");
    kraus_to_superop(&k)
}
