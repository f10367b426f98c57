//! Two-qubit (signal + ancilla) circuits and channel compilation.

pub mod decompose;
pub mod gate;
pub mod sim;

pub use decompose::{decompose, decompose_with, template, verify_decomposition, DecomposeOptions, Decomposition, Verification};
pub use gate::{u3_matrix, Circuit, Gate, ANCILLA, SIGNAL};
pub use sim::{induced_channel, simulate};
