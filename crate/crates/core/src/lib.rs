//! Multipath entanglement purification on statistical quantum networks.

pub mod cli;
pub mod error;
pub mod network;
pub mod quantum;
pub mod simulator;
pub mod stats;

pub use error::{Error, Result};
