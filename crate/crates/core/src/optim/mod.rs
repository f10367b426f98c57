//! Small derivative-free and least-squares minimizers.

mod lm;
mod nelder_mead;

pub use lm::{levenberg_marquardt, LmOptions, LmResult};
pub use nelder_mead::{nelder_mead, Minimum, NelderMeadOptions};
