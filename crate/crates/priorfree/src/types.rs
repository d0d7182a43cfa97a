//! Domain types and deterministic pricing primitives: bid profiles, price
//! vectors, revenue, second-highest bid, and the extension rule.
//!
//! All money amounts are exact nonnegative integers; every operation here is
//! a pure function of its inputs.

use serde::{Deserialize, Serialize};

/// Abstract currency units. Integer arithmetic throughout, no rounding.
pub type Money = u64;

/// An ordered vector of nonnegative integer bids. The index order encodes
/// the known reserve-price ordering: bidder `i` comes before bidder `j`
/// iff `i < j` (0-based indices everywhere).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BidProfile {
    bids: Vec<Money>,
}

impl BidProfile {
    pub fn new(bids: Vec<Money>) -> Self {
        BidProfile { bids }
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn bid(&self, i: usize) -> Money {
        self.bids[i]
    }

    pub fn bids(&self) -> &[Money] {
        &self.bids
    }

    /// Every bidder index, in order.
    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.bids.len()).collect()
    }

    /// Sum of all bids (an upper bound on any revenue).
    pub fn total(&self) -> u128 {
        self.bids.iter().map(|&b| b as u128).sum()
    }

    /// The second-largest value of the multiset `{b_i : i in subset}`.
    /// Ties count separately: for bids {5,5} the answer is 5. `None` when
    /// the subset has fewer than two members; callers must treat the
    /// corresponding benchmark as 0.
    pub fn second_highest(&self, subset: &[usize]) -> Option<Money> {
        if subset.len() < 2 {
            return None;
        }
        let (mut first, mut second) = (Money::MIN, Money::MIN);
        for &i in subset {
            let b = self.bids[i];
            if b >= first {
                second = first;
                first = b;
            } else if b > second {
                second = b;
            }
        }
        Some(second)
    }
}

impl From<Vec<Money>> for BidProfile {
    fn from(bids: Vec<Money>) -> Self {
        BidProfile::new(bids)
    }
}

impl<const N: usize> From<[Money; N]> for BidProfile {
    fn from(bids: [Money; N]) -> Self {
        BidProfile::new(bids.to_vec())
    }
}

/// A price vector over a subset of bidders: each member index carries
/// exactly one nonnegative price. Entries are kept sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceVector {
    entries: Vec<(usize, Money)>,
}

impl PriceVector {
    /// Build from parallel subset/price slices. Panics on length mismatch
    /// or duplicate indices.
    pub fn new(subset: &[usize], prices: &[Money]) -> Self {
        assert_eq!(subset.len(), prices.len(), "one price per subset index");
        let mut entries: Vec<(usize, Money)> =
            subset.iter().copied().zip(prices.iter().copied()).collect();
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate index {} in price vector", w[0].0);
        }
        PriceVector { entries }
    }

    pub fn empty() -> Self {
        PriceVector { entries: Vec::new() }
    }

    /// The same price `q` for every member of `subset`.
    pub fn uniform(subset: &[usize], q: Money) -> Self {
        Self::new(subset, &vec![q; subset.len()])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Member indices in increasing order.
    pub fn subset(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    /// Prices in index order.
    pub fn prices(&self) -> Vec<Money> {
        self.entries.iter().map(|&(_, p)| p).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Money)> + '_ {
        self.entries.iter().copied()
    }

    pub fn price(&self, i: usize) -> Option<Money> {
        self.entries
            .binary_search_by_key(&i, |&(j, _)| j)
            .ok()
            .map(|k| self.entries[k].1)
    }

    pub fn max_price(&self) -> Money {
        self.entries.iter().map(|&(_, p)| p).max().unwrap_or(0)
    }

    /// Revenue collected by posting these prices: the sum of `P(i)` over
    /// exactly those members with `b_i >= P(i)`. A price of 0 is always
    /// accepted and contributes 0.
    pub fn revenue(&self, profile: &BidProfile) -> Money {
        self.entries
            .iter()
            .filter(|&&(i, p)| profile.bid(i) >= p)
            .map(|&(_, p)| p)
            .sum()
    }

    /// True iff all prices equal a common `q` and `q` does not exceed the
    /// second-highest bid in the subset. A positive common price over fewer
    /// than two members fails; an all-zero vector always passes.
    pub fn is_uniform(&self, profile: &BidProfile) -> bool {
        let q = match self.entries.first() {
            None => return true,
            Some(&(_, p)) => p,
        };
        if self.entries.iter().any(|&(_, p)| p != q) {
            return false;
        }
        if q == 0 {
            return true;
        }
        match profile.second_highest(&self.subset()) {
            Some(cap) => q <= cap,
            None => false,
        }
    }

    /// True iff prices are nondecreasing in bidder index within the subset
    /// and the maximum price does not exceed the second-highest bid there.
    pub fn is_monotone(&self, profile: &BidProfile) -> bool {
        if self
            .entries
            .windows(2)
            .any(|w| w[0].1 > w[1].1)
        {
            return false;
        }
        let max = self.max_price();
        if max == 0 {
            return true;
        }
        match profile.second_highest(&self.subset()) {
            Some(cap) => max <= cap,
            None => false,
        }
    }

    /// Extension rule: given this vector over a sample set `A` inside a
    /// universe of `universe_n` bidders, price each bidder of the
    /// complement `B` at the largest sample price among earlier-indexed
    /// members of `A`, or 0 when no member of `A` precedes her. When this
    /// vector is nondecreasing the output is nondecreasing as well (the
    /// second-highest cap is the caller's concern).
    pub fn extend(&self, universe_n: usize) -> PriceVector {
        let mut in_a = vec![false; universe_n];
        for &(i, _) in &self.entries {
            assert!(i < universe_n, "sample index {i} outside universe of {universe_n}");
            in_a[i] = true;
        }
        let mut entries = Vec::with_capacity(universe_n - self.entries.len());
        let mut running_max = 0;
        let mut next_a = 0;
        for i in 0..universe_n {
            while next_a < self.entries.len() && self.entries[next_a].0 < i {
                running_max = running_max.max(self.entries[next_a].1);
                next_a += 1;
            }
            if !in_a[i] {
                entries.push((i, running_max));
            }
        }
        PriceVector { entries }
    }
}

/// Result of running a mechanism: a 0/1 allocation and a payment per
/// bidder. A bidder without the item pays nothing, and no bidder ever pays
/// more than she bid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    allocations: Vec<bool>,
    payments: Vec<Money>,
}

impl Outcome {
    pub fn new(allocations: Vec<bool>, payments: Vec<Money>) -> Self {
        assert_eq!(allocations.len(), payments.len());
        for (alloc, &pay) in allocations.iter().zip(&payments) {
            assert!(*alloc || pay == 0, "payment without allocation");
        }
        Outcome { allocations, payments }
    }

    pub fn zero(n: usize) -> Self {
        Outcome { allocations: vec![false; n], payments: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.allocations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allocations.is_empty()
    }

    pub fn allocated(&self, i: usize) -> bool {
        self.allocations[i]
    }

    pub fn payment(&self, i: usize) -> Money {
        self.payments[i]
    }

    pub fn allocations(&self) -> &[bool] {
        &self.allocations
    }

    pub fn payments(&self) -> &[Money] {
        &self.payments
    }

    pub fn revenue(&self) -> Money {
        self.payments.iter().sum()
    }

    /// `v_i * X_i - p_i` as a signed quantity.
    pub fn utility(&self, i: usize, true_value: Money) -> i64 {
        if self.allocations[i] {
            true_value as i64 - self.payments[i] as i64
        } else {
            0
        }
    }
}
