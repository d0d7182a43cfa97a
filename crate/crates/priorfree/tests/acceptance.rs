//! Acceptance gates: every guarantee of the library checked at its stated
//! tolerance, one printed pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use priorfree::analysis::{
    bad_level_bound_check, chernoff_tail, constants, enumerate_triples,
    estimate_event_frequencies, sample_fair_binomial, EventFrequencies,
};
use priorfree::benchmarks::{
    brute_force_ladder, f2, ladder_dp, m2_discretized, m2_exact, PriceGrid,
};
use priorfree::harness::{
    audit_mechanism, broken_posted_price, generate_instance, run_experiment,
    ExperimentConfig, GeneratorSpec,
};
use priorfree::mechanisms::{
    hybrid_auction, mix, rsop, run_auction, Mechanism, Randomness,
};
use priorfree::types::{BidProfile, Money};

fn gate(criterion: &str, pass: bool) {
    println!("criterion {criterion}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed");
}

fn random_profile(rng: &mut ChaCha8Rng, max_n: usize, max_bid: Money) -> BidProfile {
    let n = rng.gen_range(0..=max_n);
    BidProfile::new((0..n).map(|_| rng.gen_range(0..=max_bid)).collect())
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    for _ in 0..1_000 {
        let profile = random_profile(&mut rng, 7, 16);
        let subset = profile.all_indices();
        for grid in [
            PriceGrid::bid_values(&profile, &subset),
            PriceGrid::powers_of_two(&profile, &subset),
        ] {
            let dp = ladder_dp(&profile, &subset, &grid).unwrap();
            let brute = brute_force_ladder(&profile, &subset, &grid).unwrap();
            assert_eq!(dp, brute, "oracle mismatch on bids {:?}", profile.bids());
        }
    }
    let elapsed = start.elapsed();
    gate(
        "1 (ladder_dp == brute_force_ladder, 1000 instances, both grids)",
        elapsed.as_secs() < 60,
    );
}

#[test]
fn criterion_02_benchmark_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    for _ in 0..10_000 {
        let profile = random_profile(&mut rng, 64, 1 << 16);
        let subset = profile.all_indices();
        let uniform = f2(&profile, &subset);
        let exact = m2_exact(&profile, &subset).value;
        let disc = m2_discretized(&profile, &subset).value;
        assert!(uniform <= exact, "f2 > m2 on {:?}", profile.bids());
        assert!(exact <= 2 * disc, "m2 > 2 * m2_discretized on {:?}", profile.bids());
    }
    gate("2 (f2 <= m2 <= 2 * m2_discretized, 10000 instances)", true);
}

#[test]
fn criterion_03_truthfulness() {
    let grid: Vec<Money> = (0..=16).collect();
    let seeds: Vec<u64> = (0..32).collect();
    let profiles: Vec<(BidProfile, Money)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
        (0..200)
            .map(|_| (random_profile(&mut rng, 8, 16), rng.gen_range(0..=16)))
            .collect()
    };
    let violations: usize = profiles
        .par_iter()
        .map(|(profile, fixed_price)| {
            let fixed = Mechanism::FixedPrice { price: *fixed_price };
            audit_mechanism(hybrid_auction, profile, &grid, &seeds).len()
                + audit_mechanism(rsop, profile, &grid, &seeds).len()
                + audit_mechanism(|p, s| run_auction(&fixed, p, s), profile, &grid, &seeds)
                    .len()
        })
        .sum();
    let canary = audit_mechanism(
        broken_posted_price,
        &BidProfile::from([5, 3, 8]),
        &grid,
        &seeds[..1],
    );
    gate(
        "3 (zero violations for hybrid/rsop/fixed over 200 profiles; canary caught)",
        violations == 0 && !canary.is_empty(),
    );
}

/// Criteria 4 and 5 share the 50-instance, 100k-partition protocol.
#[test]
fn criterion_04_05_event_floors() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let reports: Vec<EventFrequencies> = (0..50)
        .map(|i| {
            let n = rng.gen_range(2..=32);
            let profile =
                BidProfile::new((0..n).map(|_| rng.gen_range(0..=1024u64)).collect());
            estimate_event_frequencies(&profile, 100_000, mix(0xACCE_0004, i))
        })
        .collect();

    let e1_ok = reports.iter().all(|r| r.e1_floor_ok());
    gate("4 (freq(E1) >= 1/16 - 3 sigma on 50 instances x 1e5 partitions)", e1_ok);

    let joint_ok = reports.iter().all(|r| r.joint_floor_ok());
    let all_vacuous = reports.iter().all(|r| r.e2_vacuous);
    // at desk scale no level reaches the floor, so E2 is vacuously true
    // and the joint floor reduces to the E1 floor
    println!(
        "  note: E2 vacuous on all 50 instances: {all_vacuous} (m2 below 2^{})",
        constants::LEVEL_FLOOR
    );
    gate(
        "5 (freq(E1 and E2) >= 1/32 - 3 sigma, vacuity reported)",
        joint_ok && all_vacuous,
    );
}

#[test]
fn criterion_06_competitive_floor() {
    let families = [
        GeneratorSpec::IidUniform { n: 32, lo: 1, hi: 512 },
        GeneratorSpec::IidGeometric { n: 48, max_exponent: 12 },
        GeneratorSpec::OrderedReserves { n: 40, lo: 4, step: 7 },
        GeneratorSpec::EqualRevenue { n: 12, scale: 3 },
        GeneratorSpec::AdversarialSpike { n: 24, base: 2, spike: 1 << 16 },
        GeneratorSpec::SyntheticLevel { level: 3 },
    ];
    let mut all_pass = true;
    for (fi, family) in families.into_iter().enumerate() {
        let config = ExperimentConfig {
            generator: family,
            mechanism: Mechanism::Hybrid,
            instances: 2,
            trials: 100_000,
            seed: 0xACCE_0006 + fi as u64,
            output: None,
        };
        let report = run_experiment(&config).unwrap();
        all_pass &= report.aggregate.all_meet_floor;
        println!(
            "  family {:?}: min ratio {:.4} (floor 1/{} = {:.6})",
            report.config.generator,
            report.aggregate.min_ratio,
            constants::COMPETITIVE_DIVISOR,
            1.0 / constants::COMPETITIVE_DIVISOR as f64
        );
    }
    gate("6 (hybrid mean revenue >= m2/2304 - 3 sigma on every family)", all_pass);
}

#[test]
fn criterion_07_triple_count_assertion() {
    // the 2^(2l+2) counting assertion lives inside enumerate_triples and
    // panics if violated; exercise it on synthetic instances at the named
    // levels and on random profiles across all their levels
    for level in [0u32, 1, 24] {
        let profile =
            generate_instance(&GeneratorSpec::SyntheticLevel { level }, 0).unwrap();
        let m2 = m2_exact(&profile, &profile.all_indices()).value;
        let triples = enumerate_triples(&profile, m2, level);
        if level == 24 {
            assert!(!triples.is_empty(), "synthetic level-24 instance has no triples");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    for _ in 0..200 {
        let profile = random_profile(&mut rng, 32, 1 << 16);
        let m2 = m2_exact(&profile, &profile.all_indices()).value;
        let mut l = 0;
        while priorfree::analysis::level_price(m2, l).is_some() {
            let _ = enumerate_triples(&profile, m2, l);
            l += 1;
        }
    }
    gate("7 (triple count <= 2^(2l+2) assertion never fires, l in {0,1,24})", true);
}

#[test]
fn criterion_08_bad_level_bound() {
    // realized sample ladders across 10^4 hybrid partition draws
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0008);
    let mut profiles: Vec<BidProfile> =
        (0..19).map(|_| random_profile(&mut rng, 48, 1 << 20)).collect();
    profiles
        .push(generate_instance(&GeneratorSpec::SyntheticLevel { level: 24 }, 0).unwrap());

    let ok = profiles.par_iter().enumerate().all(|(pi, profile)| {
        let m2 = m2_exact(profile, &profile.all_indices()).value;
        (0..500u64).all(|t| {
            let partition =
                Randomness::new(mix(0xACCE_0008 + pi as u64, t)).partition(profile.len());
            let pa = m2_discretized(profile, &partition.sample());
            bad_level_bound_check(&pa.vector, profile, m2)
        })
    });
    gate("8 (bad-level revenue <= m2/18 on every realized sample ladder)", ok);
}

#[test]
fn criterion_09_chernoff_sanity() {
    let draws = 1_000_000u64;
    let mut pass = true;
    for m in [144u64, 1024, 6912] {
        let out_of_band: u64 = (0..draws)
            .into_par_iter()
            .map(|d| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(0xACCE_0009 + m, d));
                let t = sample_fair_binomial(m, &mut rng);
                // outside [m/3, 2m/3], exact rational comparison
                (3 * t < m || 3 * t > 2 * m) as u64
            })
            .sum();
        let freq = out_of_band as f64 / draws as f64;
        let bound = chernoff_tail(m as f64 / 2.0, 1.0 / 3.0).unwrap();
        let slack = 3.0 * (bound * (1.0 - bound) / draws as f64).sqrt();
        println!("  m = {m}: out-of-band {freq:.6} vs bound {bound:.6} + slack {slack:.6}");
        pass &= freq <= bound + slack;
    }
    gate("9 (Bernoulli sums stay within the Chernoff band)", pass);
}

#[test]
fn criterion_10_simulate_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    let config = ExperimentConfig {
        generator: GeneratorSpec::IidUniform { n: 16, lo: 1, hi: 64 },
        mechanism: Mechanism::Hybrid,
        instances: 4,
        trials: 2_000,
        seed: 99,
        output: None,
    };
    std::fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();

    let run_once = |out: &str| {
        let out_path = dir.path().join(out);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_priorfree"))
            .args([
                "simulate",
                "--config",
                config_path.to_str().unwrap(),
                "--output",
                out_path.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out_path).unwrap()
    };
    let first = run_once("a.json");
    let second = run_once("b.json");
    gate("10 (two simulate runs are byte-identical)", first == second);
}
