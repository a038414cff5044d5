//! Construction and verification of high-girth Steiner systems and the gadgets used to
//! complete them: boosters, omni-absorbers, treasuries and concentration experiments.

pub mod absorbers;
pub mod boosters;
pub mod cli;
pub mod concentration;
pub mod config_hypergraphs;
pub mod configurations;
pub mod error;
pub mod generator;
pub mod hypergraph;
mod search;

pub use error::{Error, Result};
