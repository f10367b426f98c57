//! Single-qubit channels: representations, validation, fixtures and files.

pub mod cptp;
pub mod file;
pub mod fixtures;
pub mod repr;
pub mod state;

pub use cptp::{check_cptp, CptpReport, DEFAULT_CPTP_TOL};
pub use file::{ChannelFile, ReprKind};
pub use fixtures::{builtin, random_cptp, rodrigues, Fixture};
pub use repr::{
    affine_to_superop, choi_of, kraus_to_superop, mix, superop_to_affine, AffineBlochRep,
    ChoiMatrix, KrausSet, SuperOperator,
};
pub use state::{BlochVector, DensityMatrix};
