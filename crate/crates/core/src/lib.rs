pub mod analysis;
pub mod behavior;
pub mod cli;
pub mod error;
mod exact;
pub mod polytope;
pub mod quantum;
pub mod scenario;
pub mod seesaw;

pub use error::{Error, Result};
