//! The supporting lab around the library: instance generation, Monte
//! Carlo experiment orchestration, truthfulness auditing, and bid-file
//! serialization.

mod audit;
mod experiment;
mod generate;
mod io;

pub use audit::{audit_mechanism, audit_truthfulness, broken_posted_price, Violation};
pub use experiment::{
    run_experiment, Aggregate, Check, ExperimentConfig, ExperimentReport, InstanceResult,
    REPORT_SCHEMA_VERSION,
};
pub use generate::{generate_instance, GeneratorSpec, InstanceGenerator};
pub use io::{parse_bids, read_bids, write_bids};
