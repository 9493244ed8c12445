//! Single-iteration bit-flipping decoding of LDPC/MDPC codes with certified
//! failure-rate bounds.

pub mod binom;
pub mod bounds;
pub mod code;
pub mod decoder;
pub mod montecarlo;
pub mod pipeline;
pub mod error;
pub mod keysearch;
pub mod subset;

pub use error::{Error, Result};
