//! Command-line lab for prior-free auctions with ordered bidders.
//!
//! Exit codes: 0 success, 1 validation failure, 2 check failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use priorfree::analysis::estimate_event_frequencies;
use priorfree::benchmarks::{f2, m2_discretized, m2_exact};
use priorfree::harness::{
    audit_mechanism, generate_instance, read_bids, run_experiment, ExperimentConfig,
    GeneratorSpec,
};
use priorfree::mechanisms::{run_auction, Mechanism};
use priorfree::types::Money;

#[derive(Parser)]
#[command(name = "priorfree", version, about = "Prior-free auction simulator and benchmark lab")]
struct Cli {
    /// Worker threads for Monte Carlo runs (overrides PRIORFREE_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact benchmarks for a bid profile.
    Benchmark {
        #[arg(long)]
        bids: PathBuf,
    },
    /// One seeded mechanism run.
    Run {
        /// hybrid | rsop | fixed:<price>
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        bids: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Config-driven Monte Carlo experiment with a JSON report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write a CSV flattening of the per-instance rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Empirical event frequencies against their guaranteed floors.
    VerifyLemmas {
        #[arg(long)]
        bids: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exhaustive deviation audit over a value grid.
    AuditTruthfulness {
        /// hybrid | rsop | fixed:<price>
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        bids: PathBuf,
        /// Audit values 0..=grid-max.
        #[arg(long, default_value_t = 16)]
        grid_max: Money,
        #[arg(long, default_value_t = 32)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a bid profile from a named instance family.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// iid-uniform | iid-geometric | ordered-reserves | equal-revenue |
    /// adversarial-spike | synthetic-level
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    lo: Money,
    #[arg(long, default_value_t = 16)]
    hi: Money,
    #[arg(long, default_value_t = 2)]
    step: Money,
    #[arg(long, default_value_t = 1)]
    scale: Money,
    #[arg(long, default_value_t = 1)]
    base: Money,
    #[arg(long, default_value_t = 1 << 20)]
    spike: Money,
    #[arg(long, default_value_t = 10)]
    max_exponent: u32,
    #[arg(long, default_value_t = 24)]
    level: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to a file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl GenerateArgs {
    fn spec(&self) -> Result<GeneratorSpec, String> {
        Ok(match self.family.as_str() {
            "iid-uniform" => GeneratorSpec::IidUniform { n: self.n, lo: self.lo, hi: self.hi },
            "iid-geometric" => {
                GeneratorSpec::IidGeometric { n: self.n, max_exponent: self.max_exponent }
            }
            "ordered-reserves" => {
                GeneratorSpec::OrderedReserves { n: self.n, lo: self.lo, step: self.step }
            }
            "equal-revenue" => GeneratorSpec::EqualRevenue { n: self.n, scale: self.scale },
            "adversarial-spike" => {
                GeneratorSpec::AdversarialSpike { n: self.n, base: self.base, spike: self.spike }
            }
            "synthetic-level" => GeneratorSpec::SyntheticLevel { level: self.level },
            other => return Err(format!("unknown family '{other}'")),
        })
    }
}

fn parse_mechanism(s: &str) -> Result<Mechanism, String> {
    Mechanism::parse(s)
        .ok_or_else(|| format!("unknown mechanism '{s}' (want hybrid, rsop, or fixed:<price>)"))
}

fn configure_workers(flag: Option<usize>) {
    let workers = flag.or_else(|| {
        std::env::var("PRIORFREE_WORKERS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(workers) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    configure_workers(cli.workers);
    match cli.command {
        Command::Benchmark { bids } => {
            let profile = read_bids(&bids).map_err(|e| e.to_string())?;
            let all = profile.all_indices();
            let exact = m2_exact(&profile, &all);
            let disc = m2_discretized(&profile, &all);
            let out = json!({
                "f2": f2(&profile, &all),
                "m2": exact.value,
                "m2_discretized": disc.value,
                "ladder": exact.vector.prices(),
                "ladder_discretized": disc.vector.prices(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(0)
        }
        Command::Run { mechanism, bids, seed } => {
            let mech = parse_mechanism(&mechanism)?;
            let profile = read_bids(&bids).map_err(|e| e.to_string())?;
            let outcome = run_auction(&mech, &profile, seed);
            let out = json!({
                "mechanism": mech.to_string(),
                "seed": seed,
                "allocations": outcome.allocations(),
                "payments": outcome.payments(),
                "revenue": outcome.revenue(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(0)
        }
        Command::Simulate { config, output, csv } => {
            let text = std::fs::read_to_string(&config).map_err(|e| e.to_string())?;
            let mut config: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| e.to_string())?;
            if let Some(output) = output {
                config.output = Some(output);
            }
            let report = run_experiment(&config).map_err(|e| e.to_string())?;
            if let Some(csv) = csv {
                std::fs::write(&csv, report.to_csv()).map_err(|e| e.to_string())?;
            }
            match &config.output {
                Some(path) => eprintln!("report written to {}", path.display()),
                None => println!("{}", report.to_json()),
            }
            Ok(if report.aggregate.all_meet_floor { 0 } else { 2 })
        }
        Command::VerifyLemmas { bids, trials, seed } => {
            if trials == 0 {
                return Err("trials must be >= 1".into());
            }
            let profile = read_bids(&bids).map_err(|e| e.to_string())?;
            let report = estimate_event_frequencies(&profile, trials, seed);
            let pass = report.e1_floor_ok() && report.e2_floor_ok() && report.joint_floor_ok();
            let out = json!({
                "report": report,
                "checks": {
                    "e1_floor": report.e1_floor_ok(),
                    "e2_floor": report.e2_floor_ok(),
                    "joint_floor": report.joint_floor_ok(),
                },
                "pass": pass,
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(if pass { 0 } else { 2 })
        }
        Command::AuditTruthfulness { mechanism, bids, grid_max, seeds, seed } => {
            let mech = parse_mechanism(&mechanism)?;
            let profile = read_bids(&bids).map_err(|e| e.to_string())?;
            let grid: Vec<Money> = (0..=grid_max).collect();
            let seed_list: Vec<u64> = (0..seeds).map(|i| seed.wrapping_add(i)).collect();
            let violations = audit_mechanism(
                |p, s| run_auction(&mech, p, s),
                &profile,
                &grid,
                &seed_list,
            );
            let out = json!({
                "mechanism": mech.to_string(),
                "violations": violations,
                "pass": violations.is_empty(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(if violations.is_empty() { 0 } else { 2 })
        }
        Command::Generate(args) => {
            let spec = args.spec()?;
            let profile = generate_instance(&spec, args.seed).map_err(|e| e.to_string())?;
            let text = serde_json::to_string(profile.bids()).unwrap();
            match &args.output {
                Some(path) => std::fs::write(path, text).map_err(|e| e.to_string())?,
                None => println!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
