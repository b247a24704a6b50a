//! Private linear and polynomial computation from coded distributed storage.
//!
//! The crate simulates the whole retrieval loop: messages are encoded with
//! (systematic) Lagrange Reed-Solomon codes or an arbitrary linear code,
//! query sets are generated from a rate matrix, databases answer, and the
//! user decodes the evaluation of one out of several candidate functions.
//! Closed-form rates and converse bounds live in [`analysis`].

pub mod analysis;
pub mod codes;
pub mod cli;
pub mod config;
pub mod error;
pub mod field;
pub mod functions;
pub mod linalg;
pub mod matrices;
pub mod protocol;
pub mod querygen;

pub use error::{Error, Result};
