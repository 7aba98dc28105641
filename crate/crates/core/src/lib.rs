pub mod audio;
pub mod error;
pub mod hlc;
pub mod ins;
pub mod seed;
pub mod spectral;
pub mod surrogate;

pub use error::{Error, Result};
