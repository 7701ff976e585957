pub mod constitutive;
pub mod error;
pub mod field;
pub mod harness;
pub mod nfunc;
pub mod oscillation;
pub mod solver;

pub use error::{Error, Result};
