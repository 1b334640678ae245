//! Experiment harness: scenario configuration, Monte Carlo sweeps over the
//! power cap / SER target / subcarrier count, unencrypted and MRT baselines,
//! and CSV/JSON plot-data emission.

pub mod config;
pub mod emit;
pub mod runner;

pub use crate::error::HarnessError;

mod error {
    use thiserror::Error;

    #[derive(Debug, Error)]
    pub enum HarnessError {
        #[error("configuration error: {0}")]
        Config(String),
        #[error("I/O error on {path}: {source}")]
        Io {
            path: String,
            source: std::io::Error,
        },
        #[error(transparent)]
        Core(#[from] secwave::Error),
        #[error("JSON encoding failed: {0}")]
        Json(#[from] serde_json::Error),
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
