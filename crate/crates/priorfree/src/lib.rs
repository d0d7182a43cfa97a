//! Prior-free digital-goods auctions with ordered bidders.
//!
//! The crate provides the pricing primitives (bid profiles, price vectors,
//! the extension rule), exact revenue benchmarks for uniform and monotone
//! price ladders, truthful mechanisms including a sample-and-price hybrid
//! auction, the level/triple machinery used to audit its revenue guarantee,
//! and a seeded Monte Carlo harness with a CLI.

pub mod analysis;
pub mod benchmarks;
pub mod harness;
pub mod mechanisms;
pub mod types;

pub use types::{BidProfile, Money, Outcome, PriceVector};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("price grid must be strictly increasing and contain 0")]
    BadGrid,
    #[error("grid price {0} exceeds the second-highest-bid cap {1}")]
    GridAboveCap(Money, Money),
    #[error("brute-force guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("delta must lie in (0,1), got {0}")]
    BadDelta(f64),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
