pub mod association;
pub mod channel;
pub mod coverage;
mod error;
pub mod geometry;
pub mod harness;
pub mod numerics;
pub mod sim;

pub use error::{Error, Result};
