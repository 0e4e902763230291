//! Graph message prompting engine.
//!
//! Message passing over CSR graphs with per-edge message matrices, the five
//! graph-data-prompt families, their translation to additive message prompts,
//! low-rank message prompt tuning through a frozen backbone, and a randomized
//! harness that certifies the prompt-family/message-prompt equivalences.

pub mod backbone;
pub mod dense;
pub mod equiv;
pub mod error;
pub mod fixture;
pub mod gmp;
pub mod graph;
pub mod message;
pub mod prompt;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
