//! Python bindings for the priorfree auction library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use priorfree::analysis::estimate_event_frequencies;
use priorfree::benchmarks;
use priorfree::harness::audit_mechanism;
use priorfree::mechanisms::{run_auction, Mechanism};
use priorfree::types::{BidProfile, Money, Outcome};

fn parse_mechanism(name: &str) -> PyResult<Mechanism> {
    Mechanism::parse(name).ok_or_else(|| {
        PyValueError::new_err(format!(
            "unknown mechanism '{name}' (want hybrid, rsop, or fixed:<price>)"
        ))
    })
}

fn outcome_dict<'py>(py: Python<'py>, outcome: &Outcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("allocations", outcome.allocations().to_vec())?;
    d.set_item("payments", outcome.payments().to_vec())?;
    d.set_item("revenue", outcome.revenue())?;
    Ok(d)
}

/// Uniform-price benchmark of a bid profile.
#[pyfunction]
fn f2(bids: Vec<Money>) -> Money {
    let profile = BidProfile::new(bids);
    benchmarks::f2(&profile, &profile.all_indices())
}

/// Exact monotone-price benchmark: `(value, ladder)`.
#[pyfunction]
fn m2(bids: Vec<Money>) -> (Money, Vec<Money>) {
    let profile = BidProfile::new(bids);
    let sol = benchmarks::m2_exact(&profile, &profile.all_indices());
    (sol.value, sol.vector.prices())
}

/// Power-of-two discretized monotone benchmark: `(value, ladder)`.
#[pyfunction]
fn m2_discretized(bids: Vec<Money>) -> (Money, Vec<Money>) {
    let profile = BidProfile::new(bids);
    let sol = benchmarks::m2_discretized(&profile, &profile.all_indices());
    (sol.value, sol.vector.prices())
}

/// One seeded auction run. `mechanism` is `hybrid`, `rsop`, or
/// `fixed:<price>`.
#[pyfunction]
fn run<'py>(
    py: Python<'py>,
    mechanism: &str,
    bids: Vec<Money>,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mech = parse_mechanism(mechanism)?;
    let profile = BidProfile::new(bids);
    outcome_dict(py, &run_auction(&mech, &profile, seed))
}

/// Empirical frequencies of the guarantee's events over sampled
/// partitions.
#[pyfunction]
fn event_frequencies<'py>(
    py: Python<'py>,
    bids: Vec<Money>,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    if trials == 0 {
        return Err(PyValueError::new_err("trials must be >= 1"));
    }
    let profile = BidProfile::new(bids);
    let report = estimate_event_frequencies(&profile, trials, seed);
    let d = PyDict::new_bound(py);
    d.set_item("trials", report.trials)?;
    d.set_item("m2", report.m2)?;
    d.set_item("freq_e1", report.freq_e1)?;
    d.set_item("freq_e2", report.freq_e2)?;
    d.set_item("freq_joint", report.freq_joint)?;
    d.set_item("mean_rev_ratio", report.mean_rev_ratio)?;
    d.set_item("e2_vacuous", report.e2_vacuous)?;
    d.set_item("e1_floor_ok", report.e1_floor_ok())?;
    d.set_item("joint_floor_ok", report.joint_floor_ok())?;
    Ok(d)
}

/// Exhaustive deviation audit; returns the number of violations found.
#[pyfunction]
fn audit(mechanism: &str, bids: Vec<Money>, grid_max: Money, num_seeds: u64) -> PyResult<usize> {
    let mech = parse_mechanism(mechanism)?;
    let profile = BidProfile::new(bids);
    let grid: Vec<Money> = (0..=grid_max).collect();
    let seeds: Vec<u64> = (0..num_seeds).collect();
    Ok(audit_mechanism(|p, s| run_auction(&mech, p, s), &profile, &grid, &seeds).len())
}

#[pymodule]
fn priorfree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(f2, m)?)?;
    m.add_function(wrap_pyfunction!(m2, m)?)?;
    m.add_function(wrap_pyfunction!(m2_discretized, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(event_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
