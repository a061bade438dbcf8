pub mod cli;
pub mod constants;
pub mod error;
pub mod frobenius;
pub mod fuchsian;
pub mod guess;
pub mod ising;
pub mod kernel;
pub mod monodromy;
pub mod recognize;
pub mod transport;

pub use error::{Error, Result};
