//! Synthetic process tomography: Pauli preps and measurements, shot noise,
//! linear inversion, CPTP maximum likelihood and process fidelity.

pub mod experiment;
pub mod fidelity;
pub mod inversion;
pub mod mle;
pub mod pipeline;

pub use experiment::{simulate_experiment, Basis, CountsTable, Observations, PrepLabel, PrepSetting};
pub use fidelity::{process_fidelity, state_fidelity};
pub use inversion::linear_inversion;
pub use mle::{mle_cptp_fit, MleOptions, ReconstructionResult};
pub use pipeline::{full_pipeline, PipelineOptions, PipelineResult, ShotMode};
