//! Secure OFDM waveform design for satellite downlinks.
//!
//! The crate is organized bottom-up:
//!
//! - [`sigproc`]: complex vectors/matrices, unitary DFT, cyclic convolution,
//!   QPSK mapping — the numeric substrate.
//! - [`channel`]: satellite-to-ground channel realizations (path loss, beam
//!   gain, rain fade, Rician multipath) for the legitimate and wiretap links.
//! - [`waveform`]: secure coding applied to source symbols, reception, and
//!   per-subcarrier SINR / SER / secrecy-rate metrics.
//! - [`cmlp`]: complex-valued MLP that maps channel state to a secure coding
//!   matrix, with manual backpropagation and Adam.
//! - [`power`]: bisection search for per-subcarrier power factors under an
//!   eavesdropper SER constraint.
//! - [`joint`]: alternation of coding optimization and power allocation, plus
//!   the one-shot inference path.
//! - [`exec`]: data-parallel fan-out for Monte Carlo work, with a sequential
//!   fallback when the `parallel` feature is disabled.

pub mod channel;
pub mod cmlp;
pub mod erf;
pub mod exec;
pub mod joint;
pub mod power;
pub mod sigproc;
pub mod waveform;

mod bessel;

pub use crate::error::Error;

mod error {
    use thiserror::Error;

    /// Errors shared across the crate's numeric layers.
    #[derive(Debug, Error)]
    pub enum Error {
        #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
        DimensionMismatch {
            context: &'static str,
            expected: usize,
            actual: usize,
        },
        #[error("invalid argument for {context}: {reason}")]
        InvalidArgument {
            context: &'static str,
            reason: String,
        },
        #[error("non-finite value encountered in {0}")]
        NonFinite(&'static str),
        #[error("checkpoint I/O failed: {0}")]
        Io(#[from] std::io::Error),
        #[error("checkpoint encoding failed: {0}")]
        Encoding(#[from] serde_json::Error),
        #[error("checkpoint version {found} is not supported (expected {expected})")]
        CheckpointVersion { found: u32, expected: u32 },
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
