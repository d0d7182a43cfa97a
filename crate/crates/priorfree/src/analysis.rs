//! Executable checks behind the hybrid auction's revenue guarantee:
//! level prices, triples of bidders clearing them, winning sets,
//! balanced/large classification, the events E1/E2, the per-level revenue
//! decomposition with good/bad levels, and the Chernoff tail bound.
//!
//! Everything revenue-related stays in exact integer arithmetic; the only
//! floating-point computation in the crate is [`chernoff_tail`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{m2_discretized, m2_exact};
use crate::mechanisms::{mix, Partition, Randomness};
use crate::types::{BidProfile, Money, PriceVector};
use crate::{Error, Result};

/// The fixed constants of the revenue guarantee. Single source of truth
/// for every check in this module and for the acceptance gates.
/// Probabilities and fractions are exact rationals `(numerator, denominator)`.
pub mod constants {
    /// Levels below this floor are never "good".
    pub const LEVEL_FLOOR: u32 = 24;
    /// A level-l triple is large iff it has at least `LARGE_FACTOR * l` winners.
    pub const LARGE_FACTOR: u64 = 288;
    /// Balance band for a triple: `[|W|/3, 2|W|/3]`.
    pub const BALANCE_BAND: (u64, u64, u64) = (1, 2, 3);
    /// E1 holds iff the sample ladder's revenue is at least m2 / this.
    pub const E1_REV_DIVISOR: u64 = 6;
    /// Guaranteed floor on Pr[E1].
    pub const E1_PROB: (u64, u64) = (1, 16);
    /// Guaranteed floor on Pr[E2].
    pub const E2_PROB: (u64, u64) = (31, 32);
    /// Guaranteed floor on Pr[E1 and E2].
    pub const JOINT_PROB: (u64, u64) = (1, 32);
    /// Bad levels at or above the floor contribute at most m2 / this.
    pub const BAD_LEVEL_DIVISOR: u64 = 18;
    /// Case split of the guarantee: uniform benchmark within this factor of m2.
    pub const CASE_SPLIT_FACTOR: u64 = 432;
    /// Expected-revenue floor in the uniform-dominated case: m2 / this.
    pub const CASE1_DIVISOR: u64 = 2700;
    /// Overall expected-revenue floor of the hybrid auction: m2 / this.
    pub const COMPETITIVE_DIVISOR: u64 = 2304;
    /// The discretized ladder keeps at least this fraction of the exact one.
    pub const DISCRETIZATION_HALF: (u64, u64) = (1, 2);
    /// Conditional floor on the offer-set revenue: m2 / this.
    pub const OFFER_REVENUE_DIVISOR: u64 = 36;
}

use constants::*;

/// A pair of bidders `i < j` both clearing the level-`level` price, with
/// that price attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub i: u32,
    pub j: u32,
    pub level: u32,
    pub price: Money,
}

/// The unique power of two `q` with `m2 / 2^(l+1) < q <= m2 / 2^l`, or
/// `None` when no integer power >= 1 lies in that interval.
pub fn level_price(m2: Money, l: u32) -> Option<Money> {
    let shifted = m2.checked_shr(l).unwrap_or(0);
    if shifted == 0 {
        return None;
    }
    // largest power of two <= floor(m2 / 2^l); this always clears the
    // interval's open lower end as well
    let q = 1u64 << (63 - shifted.leading_zeros());
    debug_assert!((q as u128) << (l + 1) > m2 as u128);
    Some(q)
}

/// Levels whose price exists, in increasing order. Finite because the
/// price halves with every level.
pub fn levels(m2: Money) -> impl Iterator<Item = (u32, Money)> {
    (0..u32::MAX)
        .map(move |l| (l, level_price(m2, l)))
        .take_while(|(_, q)| q.is_some())
        .map(|(l, q)| (l, q.unwrap()))
}

/// Exactly the indices in `[i, j]` whose bid is at least `q`.
pub fn winning_set(profile: &BidProfile, i: usize, j: usize, q: Money) -> Vec<usize> {
    assert!(i <= j);
    (i..=j.min(profile.len().saturating_sub(1)))
        .filter(|&k| profile.bid(k) >= q)
        .collect()
}

/// All level-`l` triples: ordered pairs `i < j` with both bids at least
/// the level-`l` price. Panics (the guarantee's counting claim) if the
/// count ever exceeds `2^(2l+2)`.
pub fn enumerate_triples(profile: &BidProfile, m2: Money, l: u32) -> Vec<Triple> {
    let q = match level_price(m2, l) {
        Some(q) => q,
        None => return Vec::new(),
    };
    let winners: Vec<u32> = (0..profile.len())
        .filter(|&k| profile.bid(k) >= q)
        .map(|k| k as u32)
        .collect();
    let count = winners.len() as u128 * (winners.len() as u128).saturating_sub(1) / 2;
    let bound = 1u128 << (2 * l as u128 + 2).min(127);
    assert!(
        count <= bound,
        "level-{l} triple count {count} exceeds the 2^(2l+2) bound {bound}"
    );
    let mut triples = Vec::with_capacity(count as usize);
    for (a, &i) in winners.iter().enumerate() {
        for &j in &winners[a + 1..] {
            triples.push(Triple { i, j, level: l, price: q });
        }
    }
    triples
}

/// True iff the winners split `[|W|/3, 2|W|/3]` into the sample set, by
/// exact rational comparison. Vacuously true for an empty winning set.
pub fn is_balanced(w: &[usize], partition: &Partition) -> bool {
    let total = w.len() as u64;
    let in_a = w.iter().filter(|&&k| partition.in_sample(k)).count() as u64;
    let (lo, hi, den) = BALANCE_BAND;
    den * in_a >= lo * total && den * in_a <= hi * total
}

/// True iff the winning set has at least `288 * l` members.
pub fn is_large(w: &[usize], l: u32) -> bool {
    w.len() as u64 >= LARGE_FACTOR * l as u64
}

/// Event E1: the sample ladder collects at least `m2 / 6`, by integer
/// cross-multiplication.
pub fn event_e1(rev_pa: Money, m2: Money) -> bool {
    E1_REV_DIVISOR as u128 * rev_pa as u128 >= m2 as u128
}

/// Event E2: at every level at or above the floor, every large triple is
/// balanced. Vacuously true when no such level exists (always the case
/// for `m2 < 2^24` in integer money).
pub fn event_e2(profile: &BidProfile, m2: Money, partition: &Partition) -> bool {
    for (l, q) in levels(m2) {
        if l < LEVEL_FLOOR {
            continue;
        }
        // winner positions and a prefix count of sample-set members let
        // every triple's balance be read off in O(1)
        let winners: Vec<usize> = (0..profile.len()).filter(|&k| profile.bid(k) >= q).collect();
        let mut prefix_a = vec![0u64; winners.len() + 1];
        for (pos, &k) in winners.iter().enumerate() {
            prefix_a[pos + 1] = prefix_a[pos] + partition.in_sample(k) as u64;
        }
        let min_span = (LARGE_FACTOR * l as u64) as usize;
        let (lo, hi, den) = BALANCE_BAND;
        for a_pos in 0..winners.len() {
            let start = a_pos + min_span.max(1) - 1;
            for b_pos in start..winners.len() {
                let span = (b_pos - a_pos + 1) as u64;
                let in_a = prefix_a[b_pos + 1] - prefix_a[a_pos];
                if den * in_a < lo * span || den * in_a > hi * span {
                    return false;
                }
            }
        }
    }
    true
}

/// The bidders of the sample ladder who take the item at exactly the
/// level-`l` price, and their revenue contribution `count * q_l`.
///
/// Asserts the contiguity property: within the ladder's members whose
/// bids clear `q_l`, the level-`l` takers form one contiguous run.
pub fn level_revenue(
    pa: &PriceVector,
    profile: &BidProfile,
    m2: Money,
    l: u32,
) -> (usize, Money) {
    let q = match level_price(m2, l) {
        Some(q) => q,
        None => return (0, 0),
    };
    let mut count = 0usize;
    let mut eligible_run: Vec<bool> = Vec::new();
    for (i, price) in pa.iter() {
        let bid = profile.bid(i);
        if bid >= q {
            let taker = bid >= price && price == q;
            eligible_run.push(taker);
            count += taker as usize;
        }
    }
    let first = eligible_run.iter().position(|&t| t);
    let last = eligible_run.iter().rposition(|&t| t);
    if let (Some(first), Some(last)) = (first, last) {
        assert!(
            eligible_run[first..=last].iter().all(|&t| t),
            "level-{l} takers are not contiguous among eligible ladder members"
        );
    }
    (count, count as Money * q)
}

/// A level's classification with respect to a realized sample ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelClass {
    Good,
    Bad,
}

/// Good iff the level is at or above the floor and has at least
/// `288 * l` takers.
pub fn classify_level(l: u32, taker_count: usize) -> LevelClass {
    if l >= LEVEL_FLOOR && taker_count as u64 >= LARGE_FACTOR * l as u64 {
        LevelClass::Good
    } else {
        LevelClass::Bad
    }
}

/// True iff the realized bad levels at or above the floor contribute at
/// most `m2 / 18` of the sample ladder's revenue. Expected to hold on
/// every run; it is a proved bound.
pub fn bad_level_bound_check(pa: &PriceVector, profile: &BidProfile, m2: Money) -> bool {
    let mut bad_sum: u128 = 0;
    for (l, _) in levels(m2) {
        if l < LEVEL_FLOOR {
            continue;
        }
        let (count, money) = level_revenue(pa, profile, m2, l);
        if classify_level(l, count) == LevelClass::Bad {
            bad_sum += money as u128;
        }
    }
    BAD_LEVEL_DIVISOR as u128 * bad_sum <= m2 as u128
}

/// Two-sided Chernoff failure bound `2 * exp(-mu * delta^2 / 4)` for a sum
/// of i.i.d. 0/1 variables with mean `mu` to land outside
/// `[(1-delta) mu, (1+delta) mu]`.
pub fn chernoff_tail(mu: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadDelta(delta));
    }
    if mu <= 0.0 {
        return Err(Error::InvalidParam(format!("mu must be positive, got {mu}")));
    }
    Ok(2.0 * (-mu * delta * delta / 4.0).exp())
}

/// Sum of `m` fair coins, drawn as popcounts of random 64-bit blocks.
pub fn sample_fair_binomial(m: u64, rng: &mut impl Rng) -> u64 {
    let mut sum = 0u64;
    let mut remaining = m;
    while remaining >= 64 {
        sum += rng.gen::<u64>().count_ones() as u64;
        remaining -= 64;
    }
    if remaining > 0 {
        let mask = (1u64 << remaining) - 1;
        sum += (rng.gen::<u64>() & mask).count_ones() as u64;
    }
    sum
}

/// Empirical frequencies of E1, E2, and their intersection over sampled
/// partitions, plus the realized distribution of the sample ladder's
/// revenue relative to the monotone benchmark. Deterministic given `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventFrequencies {
    pub trials: u64,
    pub m2: Money,
    pub count_e1: u64,
    pub count_e2: u64,
    pub count_joint: u64,
    pub freq_e1: f64,
    pub freq_e2: f64,
    pub freq_joint: f64,
    /// Mean / min / max of `Rev(P_A) / m2` over the sampled partitions
    /// (all 1.0 when the benchmark is 0).
    pub mean_rev_ratio: f64,
    pub min_rev_ratio: f64,
    pub max_rev_ratio: f64,
    /// True when no level at or above the floor exists for this instance,
    /// which makes E2 vacuously true on every partition.
    pub e2_vacuous: bool,
}

impl EventFrequencies {
    /// `freq >= floor - 3 * sqrt(p0 (1 - p0) / trials)` for a guaranteed
    /// floor probability `p0 = num/den`: the statistical slack makes sure
    /// noise cannot fake a failure of a proved bound.
    pub fn meets_floor(freq: f64, p0: (u64, u64), trials: u64) -> bool {
        let p = p0.0 as f64 / p0.1 as f64;
        let slack = 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
        freq >= p - slack
    }

    pub fn e1_floor_ok(&self) -> bool {
        Self::meets_floor(self.freq_e1, E1_PROB, self.trials)
    }

    pub fn e2_floor_ok(&self) -> bool {
        Self::meets_floor(self.freq_e2, E2_PROB, self.trials)
    }

    pub fn joint_floor_ok(&self) -> bool {
        Self::meets_floor(self.freq_joint, JOINT_PROB, self.trials)
    }
}

pub fn estimate_event_frequencies(
    profile: &BidProfile,
    trials: u64,
    seed: u64,
) -> EventFrequencies {
    assert!(trials >= 1, "at least one trial required");
    let n = profile.len();
    let m2 = m2_exact(profile, &profile.all_indices()).value;
    let e2_vacuous = level_price(m2, LEVEL_FLOOR).is_none();

    // (e1 count, e2 count, joint count, sum/min/max of Rev(P_A))
    let identity = (0u64, 0u64, 0u64, 0u128, Money::MAX, Money::MIN);
    let (count_e1, count_e2, count_joint, rev_sum, rev_min, rev_max) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let partition = Randomness::new(mix(seed, t)).partition(n);
            let pa = m2_discretized(profile, &partition.sample());
            let e1 = event_e1(pa.value, m2);
            let e2 = e2_vacuous || event_e2(profile, m2, &partition);
            (
                e1 as u64,
                e2 as u64,
                (e1 && e2) as u64,
                pa.value as u128,
                pa.value,
                pa.value,
            )
        })
        .reduce(
            || identity,
            |a, b| {
                (
                    a.0 + b.0,
                    a.1 + b.1,
                    a.2 + b.2,
                    a.3 + b.3,
                    a.4.min(b.4),
                    a.5.max(b.5),
                )
            },
        );

    let ratio = |rev: u128| {
        if m2 == 0 {
            1.0
        } else {
            rev as f64 / m2 as f64
        }
    };
    EventFrequencies {
        trials,
        m2,
        count_e1,
        count_e2,
        count_joint,
        freq_e1: count_e1 as f64 / trials as f64,
        freq_e2: count_e2 as f64 / trials as f64,
        freq_joint: count_joint as f64 / trials as f64,
        mean_rev_ratio: if m2 == 0 { 1.0 } else { rev_sum as f64 / (trials as f64 * m2 as f64) },
        min_rev_ratio: ratio(rev_min as u128),
        max_rev_ratio: ratio(rev_max as u128),
        e2_vacuous,
    }
}

/// Deterministic RNG for synthetic draws in tests and the acceptance
/// suite.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
