//! Two-firm consumer search market with costly product returns.
//!
//! The prominent firm is inspected first. Consumers buy, learn their match
//! value, and may buy the second product as well and send back whichever
//! they do not keep. Return costs hurt the prominent firm more, since it is
//! refunded against by every consumer who searches on.

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod oracle;
pub mod verify;
pub mod welfare;

pub use error::{ModelError, Result};
