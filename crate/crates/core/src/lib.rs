pub mod constructions;
pub mod error;
pub mod harness;
pub mod io;
pub mod laws;
pub mod matrix;
pub mod spectral;

pub use error::{Error, Result};
