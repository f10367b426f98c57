pub mod channel;
pub mod circuit;
pub mod error;
pub mod linalg;
pub mod optim;
pub mod serde_util;
pub mod simplex;
pub mod spectral;
pub mod tomography;

pub use error::{Error, ErrorClass, Result};
