//! Bid-file serialization: a JSON array of nonnegative integers, or
//! newline-delimited integers. The same formats everywhere.

use std::fs;
use std::path::Path;

use crate::types::{BidProfile, Money};
use crate::{Error, Result};

/// Parses either a JSON array (`[1, 3, 5]`) or newline-delimited integers.
pub fn parse_bids(text: &str) -> Result<BidProfile> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let bids: Vec<Money> = serde_json::from_str(trimmed)?;
        return Ok(BidProfile::new(bids));
    }
    let mut bids = Vec::new();
    for (lineno, line) in trimmed.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        bids.push(line.parse::<Money>().map_err(|e| {
            Error::InvalidParam(format!("bid file line {}: {e}", lineno + 1))
        })?);
    }
    Ok(BidProfile::new(bids))
}

pub fn read_bids(path: &Path) -> Result<BidProfile> {
    parse_bids(&fs::read_to_string(path)?)
}

pub fn write_bids(path: &Path, profile: &BidProfile) -> Result<()> {
    fs::write(path, serde_json::to_string(profile.bids())?)?;
    Ok(())
}
