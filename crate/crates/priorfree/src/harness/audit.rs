//! Derandomized truthfulness auditing: at a fixed seed, exhaustively
//! replay every (true value, deviation) pair over a value grid and report
//! any case where deviating beats honesty or honesty goes negative.

use serde::{Deserialize, Serialize};

use crate::types::{BidProfile, Money, Outcome};

/// A recorded truthfulness failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub seed: u64,
    pub bidder: usize,
    pub true_value: Money,
    pub deviation: Money,
    pub truthful_utility: i64,
    pub deviating_utility: i64,
}

/// Audits a single bidder of one profile. `run` must be a deterministic
/// function of `(profile, seed)`. For every seed and every pair of grid
/// values `(v, b')`, the outcome when bidding `v` truthfully must give at
/// least the utility of bidding `b'`, and never a negative one.
pub fn audit_truthfulness<F>(
    run: F,
    profile: &BidProfile,
    bidder: usize,
    value_grid: &[Money],
    seeds: &[u64],
) -> Vec<Violation>
where
    F: Fn(&BidProfile, u64) -> Outcome,
{
    assert!(!value_grid.is_empty(), "value grid must be nonempty");
    let mut violations = Vec::new();
    let mut bids = profile.bids().to_vec();
    for &seed in seeds {
        // outcome as seen by this bidder, per reported bid
        let offers: Vec<(bool, Money)> = value_grid
            .iter()
            .map(|&report| {
                bids[bidder] = report;
                let out = run(&BidProfile::new(bids.clone()), seed);
                (out.allocated(bidder), out.payment(bidder))
            })
            .collect();
        for (vi, &true_value) in value_grid.iter().enumerate() {
            let utility = |&(allocated, payment): &(bool, Money)| -> i64 {
                if allocated {
                    true_value as i64 - payment as i64
                } else {
                    0
                }
            };
            let truthful = utility(&offers[vi]);
            if truthful < 0 {
                violations.push(Violation {
                    seed,
                    bidder,
                    true_value,
                    deviation: true_value,
                    truthful_utility: truthful,
                    deviating_utility: truthful,
                });
            }
            for (ri, offer) in offers.iter().enumerate() {
                let deviating = utility(offer);
                if deviating > truthful {
                    violations.push(Violation {
                        seed,
                        bidder,
                        true_value,
                        deviation: value_grid[ri],
                        truthful_utility: truthful,
                        deviating_utility: deviating,
                    });
                }
            }
        }
    }
    bids[bidder] = profile.bid(bidder);
    violations
}

/// Audits every bidder of the profile.
pub fn audit_mechanism<F>(
    run: F,
    profile: &BidProfile,
    value_grid: &[Money],
    seeds: &[u64],
) -> Vec<Violation>
where
    F: Fn(&BidProfile, u64) -> Outcome,
{
    (0..profile.len())
        .flat_map(|bidder| audit_truthfulness(&run, profile, bidder, value_grid, seeds))
        .collect()
}

/// Deliberately non-truthful canary for the auditor: offers every bidder
/// her own bid minus one, so underbidding to 0 always pays off.
pub fn broken_posted_price(profile: &BidProfile, _seed: u64) -> Outcome {
    let n = profile.len();
    let mut allocations = vec![false; n];
    let mut payments = vec![0; n];
    for i in 0..n {
        let price = profile.bid(i).saturating_sub(1);
        allocations[i] = true;
        payments[i] = price;
    }
    Outcome::new(allocations, payments)
}
