pub mod classical;
pub mod cli;
pub mod coherent;
mod dd;
pub mod error;
pub mod evolution;
pub mod params;
pub mod qseries;
pub mod semiclassics;
pub mod quad;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
