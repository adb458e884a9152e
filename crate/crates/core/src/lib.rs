pub mod error;
pub mod gauge;
pub mod geodesics;
pub mod harness;
pub mod induced;
pub mod line;
pub mod maps;
pub mod measures;
pub mod seed;

pub use error::{Error, Result};
