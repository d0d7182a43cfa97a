//! Seeded bid-profile generators. Every family is deterministic given its
//! seed; the ordered-reserves family honors the ordering assumption by
//! construction and checks it at build time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mechanisms::mix;
use crate::types::{BidProfile, Money};
use crate::{Error, Result};

const SALT_GENERATE: u64 = 0x4745_4E45;

/// An instance family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Each bid i.i.d. uniform on `[lo, hi]`.
    IidUniform { n: usize, lo: Money, hi: Money },
    /// Each bid i.i.d. `2^G` with `G` geometric(1/2), capped at
    /// `2^max_exponent`.
    IidGeometric { n: usize, max_exponent: u32 },
    /// Bidder `i` uniform on `[1, lo + i * step]`: the per-index reserve
    /// prices are nondecreasing in index.
    OrderedReserves { n: usize, lo: Money, step: Money },
    /// Bids `scale * L / k` for `k = 1..n` with `L = lcm(1..n)`, so every
    /// uniform price collects the same revenue.
    EqualRevenue { n: usize, scale: Money },
    /// One huge bid behind `n - 1` small ones: the uniform benchmark's
    /// worst shape.
    AdversarialSpike { n: usize, base: Money, spike: Money },
    /// A profile whose monotone benchmark places its level-`level` price
    /// at 1, with as many winners at that level as the level admits
    /// (at least `288 * level` when that many can exist).
    SyntheticLevel { level: u32 },
}

/// A family plus the seed that makes it a concrete, reproducible instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceGenerator {
    pub family: GeneratorSpec,
    pub seed: u64,
}

impl InstanceGenerator {
    pub fn new(family: GeneratorSpec, seed: u64) -> Self {
        InstanceGenerator { family, seed }
    }

    pub fn generate(&self) -> Result<BidProfile> {
        generate_instance(&self.family, self.seed)
    }
}

/// The revenue-maximizing posted price against `uniform{1..k}`, used to
/// verify the ordered-reserves invariant.
fn uniform_reserve(k: Money) -> Money {
    (1..=k).max_by_key(|&q| (q * (k - q + 1), std::cmp::Reverse(q))).unwrap_or(0)
}

fn lcm_upto(n: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=n.max(1)).fold(1u64, |acc, k| acc / gcd(acc, k) * k)
}

pub fn generate_instance(spec: &GeneratorSpec, seed: u64) -> Result<BidProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, SALT_GENERATE));
    let bids = match *spec {
        GeneratorSpec::IidUniform { n, lo, hi } => {
            if lo > hi {
                return Err(Error::InvalidParam(format!(
                    "iid-uniform needs lo <= hi, got [{lo}, {hi}]"
                )));
            }
            (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
        }
        GeneratorSpec::IidGeometric { n, max_exponent } => {
            if max_exponent > 40 {
                return Err(Error::InvalidParam(format!(
                    "iid-geometric max_exponent {max_exponent} > 40"
                )));
            }
            (0..n)
                .map(|_| {
                    let mut exp = 0;
                    while exp < max_exponent && rng.gen::<bool>() {
                        exp += 1;
                    }
                    1u64 << exp
                })
                .collect()
        }
        GeneratorSpec::OrderedReserves { n, lo, step } => {
            if lo < 1 {
                return Err(Error::InvalidParam("ordered-reserves needs lo >= 1".into()));
            }
            // reserves of uniform{1..k} grow with k; verify anyway
            let highs: Vec<Money> = (0..n as u64).map(|i| lo + i * step).collect();
            let reserves: Vec<Money> = highs.iter().map(|&k| uniform_reserve(k)).collect();
            if reserves.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidParam(
                    "ordered-reserves produced decreasing reserves".into(),
                ));
            }
            highs.iter().map(|&k| rng.gen_range(1..=k)).collect()
        }
        GeneratorSpec::EqualRevenue { n, scale } => {
            if n > 20 {
                return Err(Error::InvalidParam("equal-revenue needs n <= 20".into()));
            }
            if scale < 1 {
                return Err(Error::InvalidParam("equal-revenue needs scale >= 1".into()));
            }
            let total = scale * lcm_upto(n as u64);
            let bids: Vec<Money> = (1..=n as u64).map(|k| total / k).collect();
            // every bid-value price must collect the same revenue
            for (k, &q) in bids.iter().enumerate() {
                let takers = bids.iter().filter(|&&b| b >= q).count() as u64;
                debug_assert_eq!(q * takers, total, "price rank {k} breaks equal revenue");
            }
            bids
        }
        GeneratorSpec::AdversarialSpike { n, base, spike } => {
            if n < 1 {
                return Err(Error::InvalidParam("adversarial-spike needs n >= 1".into()));
            }
            let mut bids = vec![base; n - 1];
            bids.push(spike);
            bids
        }
        GeneratorSpec::SyntheticLevel { level } => synthetic_level_bids(level)?,
    };
    Ok(BidProfile::new(bids))
}

/// Winners bid 1 and two trailing spike bidders pump the monotone
/// benchmark into `[2^level, 2^(level+1))`, which pins the level-`level`
/// price at exactly 1.
fn synthetic_level_bids(level: u32) -> Result<Vec<Money>> {
    if level > 32 {
        return Err(Error::InvalidParam(format!("synthetic-level level {level} > 32")));
    }
    match level {
        0 => Ok(vec![1, 1]),
        1 => Ok(vec![1, 1, 1]),
        l => {
            // any triple at level l has fewer than 2^(l+1) winners, so a
            // large one (288 l winners) only exists once 288 l < 2^(l+1)
            let want = 288u64 * l as u64;
            let ceiling = (1u64 << l) - 1;
            let k = want.min(ceiling);
            let spike = 1u64 << (l - 1);
            let mut bids = vec![1u64; k as usize];
            bids.push(spike);
            bids.push(spike);
            Ok(bids)
        }
    }
}
