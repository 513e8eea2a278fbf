pub mod arith;
pub mod cli;
pub mod compose;
pub mod domain;
pub mod error;
pub mod harness;
pub mod interval;
pub mod reduce;
pub mod serde_util;
pub mod specialize;

pub use error::{Error, Result};
