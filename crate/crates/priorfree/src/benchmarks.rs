//! Exact revenue benchmarks: the best uniform price, the best monotone
//! price ladder, and its power-of-two discretization, all over integer
//! price grids and cross-checkable against a brute-force oracle.

use serde::{Deserialize, Serialize};

use crate::types::{BidProfile, Money, PriceVector};
use crate::{Error, Result};

/// Guard limits for [`brute_force_ladder`].
const BRUTE_MAX_SUBSET: usize = 10;
const BRUTE_MAX_GRID: usize = 8;

/// A sorted set of candidate prices, always containing 0. Nonzero entries
/// never exceed the second-highest-bid cap of the subset the grid was
/// built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceGrid {
    candidates: Vec<Money>,
}

impl PriceGrid {
    /// Validates and wraps an explicit candidate list.
    pub fn from_candidates(mut candidates: Vec<Money>) -> Result<Self> {
        if !candidates.contains(&0) {
            candidates.push(0);
        }
        candidates.sort_unstable();
        candidates.dedup();
        Ok(PriceGrid { candidates })
    }

    /// The grid `{0} ∪ {distinct bid values in subset, ≤ b2 cap}`. Rounding
    /// any monotone ladder's prices up to the nearest such value keeps
    /// every winner and never loses revenue, so this grid suffices for the
    /// exact monotone benchmark.
    pub fn bid_values(profile: &BidProfile, subset: &[usize]) -> Self {
        let mut candidates = vec![0];
        if let Some(cap) = profile.second_highest(subset) {
            for &i in subset {
                let b = profile.bid(i);
                if b > 0 && b <= cap {
                    candidates.push(b);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        PriceGrid { candidates }
    }

    /// The grid `{0} ∪ {2^t : t ≥ 0, 2^t ≤ b2 cap}`. Negative exponents are
    /// dropped: with integer bids a price in (0,1) can be raised to 1
    /// without losing a single winner.
    pub fn powers_of_two(profile: &BidProfile, subset: &[usize]) -> Self {
        let mut candidates = vec![0];
        if let Some(cap) = profile.second_highest(subset) {
            let mut p: Money = 1;
            while p <= cap {
                candidates.push(p);
                match p.checked_mul(2) {
                    Some(next) => p = next,
                    None => break,
                }
            }
        }
        PriceGrid { candidates }
    }

    pub fn candidates(&self) -> &[Money] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    fn validate_for(&self, profile: &BidProfile, subset: &[usize]) -> Result<()> {
        if self.candidates.first() != Some(&0)
            || self.candidates.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::BadGrid);
        }
        let max = *self.candidates.last().unwrap();
        if max > 0 {
            match profile.second_highest(subset) {
                Some(cap) if max <= cap => {}
                Some(cap) => return Err(Error::GridAboveCap(max, cap)),
                None => return Err(Error::GridAboveCap(max, 0)),
            }
        }
        Ok(())
    }
}

/// A monotone price ladder together with the revenue it collects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderSolution {
    pub vector: PriceVector,
    pub value: Money,
}

impl LadderSolution {
    fn zero(subset: &[usize]) -> Self {
        LadderSolution { vector: PriceVector::uniform(subset, 0), value: 0 }
    }
}

/// Uniform-price benchmark: the maximum of `q * |{i in subset : b_i >= q}|`
/// over prices `q` not exceeding the subset's second-highest bid. 0 when
/// the subset has fewer than two members or no positive candidate exists.
pub fn f2(profile: &BidProfile, subset: &[usize]) -> Money {
    let cap = match profile.second_highest(subset) {
        Some(c) => c,
        None => return 0,
    };
    let mut best = 0;
    let mut values: Vec<Money> = subset
        .iter()
        .map(|&i| profile.bid(i))
        .filter(|&b| b > 0 && b <= cap)
        .collect();
    values.sort_unstable();
    values.dedup();
    for q in values {
        let takers = subset.iter().filter(|&&i| profile.bid(i) >= q).count() as Money;
        best = best.max(q * takers);
    }
    best
}

/// Exact monotone-price benchmark: the maximum-revenue nondecreasing
/// ladder over the subset, capped at its second-highest bid.
pub fn m2_exact(profile: &BidProfile, subset: &[usize]) -> LadderSolution {
    let grid = PriceGrid::bid_values(profile, subset);
    ladder_dp(profile, subset, &grid).expect("bid-value grid is always valid")
}

/// Discretized monotone benchmark: best nondecreasing ladder whose nonzero
/// prices are powers of two. Always worth at least half of [`m2_exact`]:
/// rounding each optimal price down to a power of two keeps every winner
/// and at least half of each payment.
pub fn m2_discretized(profile: &BidProfile, subset: &[usize]) -> LadderSolution {
    let grid = PriceGrid::powers_of_two(profile, subset);
    ladder_dp(profile, subset, &grid).expect("powers-of-two grid is always valid")
}

/// Shared DP engine: maximizes revenue over nondecreasing ladders drawn
/// from `grid`, in `O(|subset| * |grid|)`. Among equal-revenue ladders it
/// returns the lexicographically smallest (lower prices at earlier
/// indices), which pins down a deterministic answer for seeded runs.
pub fn ladder_dp(
    profile: &BidProfile,
    subset: &[usize],
    grid: &PriceGrid,
) -> Result<LadderSolution> {
    grid.validate_for(profile, subset)?;
    let k = subset.len();
    if k == 0 {
        return Ok(LadderSolution::zero(subset));
    }
    let g = grid.candidates();
    let m = g.len();
    let contribution = |pos: usize, ci: usize| -> Money {
        if profile.bid(subset[pos]) >= g[ci] {
            g[ci]
        } else {
            0
        }
    };

    // best[pos][ci]: max revenue from positions pos.. with all prices >= g[ci]
    let mut best = vec![vec![0 as Money; m]; k + 1];
    for pos in (0..k).rev() {
        for ci in (0..m).rev() {
            let take = contribution(pos, ci) + best[pos + 1][ci];
            let bump = if ci + 1 < m { best[pos][ci + 1] } else { 0 };
            best[pos][ci] = take.max(bump);
        }
    }

    // Reconstruct front-to-back, picking the smallest price that still
    // attains the optimum at every step.
    let mut prices = Vec::with_capacity(k);
    let mut ci = 0;
    for pos in 0..k {
        let target = best[pos][ci];
        while contribution(pos, ci) + best[pos + 1][ci] != target {
            ci += 1;
        }
        prices.push(g[ci]);
    }

    let vector = PriceVector::new(subset, &prices);
    let value = best[0][0];
    debug_assert_eq!(vector.revenue(profile), value);
    Ok(LadderSolution { vector, value })
}

/// Verification oracle: exhaustively enumerates every nondecreasing grid
/// ladder. Refuses inputs beyond a small combinatorial guard. Must agree
/// with [`ladder_dp`] on all guarded inputs, ladder and value both.
pub fn brute_force_ladder(
    profile: &BidProfile,
    subset: &[usize],
    grid: &PriceGrid,
) -> Result<LadderSolution> {
    if subset.len() > BRUTE_MAX_SUBSET {
        return Err(Error::GuardExceeded(format!(
            "subset size {} > {BRUTE_MAX_SUBSET}",
            subset.len()
        )));
    }
    if grid.len() > BRUTE_MAX_GRID {
        return Err(Error::GuardExceeded(format!(
            "grid size {} > {BRUTE_MAX_GRID}",
            grid.len()
        )));
    }
    grid.validate_for(profile, subset)?;
    if subset.is_empty() {
        return Ok(LadderSolution::zero(subset));
    }

    let g = grid.candidates();
    let mut ladder = vec![0usize; subset.len()];
    let mut best_prices: Vec<Money> = vec![g[0]; subset.len()];
    let mut best_value: Money = {
        // all prices g[0] = 0 collect nothing
        0
    };
    // Enumerate nondecreasing index ladders in lexicographic order; only a
    // strict improvement replaces the incumbent, so ties resolve to the
    // lexicographically smallest ladder, matching the DP's tie-break.
    loop {
        let value: Money = subset
            .iter()
            .zip(&ladder)
            .map(|(&i, &ci)| if profile.bid(i) >= g[ci] { g[ci] } else { 0 })
            .sum();
        if value > best_value {
            best_value = value;
            best_prices = ladder.iter().map(|&ci| g[ci]).collect();
        }
        // next nondecreasing ladder
        let mut pos = ladder.len();
        loop {
            if pos == 0 {
                return Ok(LadderSolution {
                    vector: PriceVector::new(subset, &best_prices),
                    value: best_value,
                });
            }
            pos -= 1;
            if ladder[pos] + 1 < g.len() {
                let v = ladder[pos] + 1;
                for slot in ladder[pos..].iter_mut() {
                    *slot = v;
                }
                break;
            }
        }
    }
}
