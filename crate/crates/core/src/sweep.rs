//! Positivity and boundedness of a scenario across step sizes.

use rayon::prelude::*;
use serde::Serialize;

use crate::data_io::Scenario;
use crate::error::{Error, Result};
use crate::trajectory::{Scheme, Trajectory};

/// Relative slack on N ≤ Λ/μ for floating-point round-off.
pub const BOUND_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: f64,
    pub scheme: Scheme,
    pub steps: usize,
    pub min_component: f64,
    pub max_population: f64,
    pub population_bound: f64,
    /// States with a negative compartment or N above the bound, plus one if
    /// the integration aborted.
    pub violations: usize,
    /// Integration error, if any.
    pub failure: Option<String>,
}

/// Counts states that leave the feasible region.
pub fn count_violations(traj: &Trajectory<f64>, bound: f64) -> usize {
    traj.states
        .iter()
        .filter(|s| {
            s.compartments().iter().any(|&x| x < 0.0) || s.population() > bound * (1.0 + BOUND_RTOL)
        })
        .count()
}

fn sweep_one(scenario: &Scenario, h: f64, scheme: Scheme, horizon: f64) -> SweepRow {
    let steps = ((horizon / h).ceil() as usize).max(1);
    let bound = scenario.params.population_bound();
    match scenario.run_with(scheme, h, steps) {
        Ok(traj) => SweepRow {
            h,
            scheme,
            steps,
            min_component: traj.min_component(),
            max_population: traj.max_population(),
            population_bound: bound,
            violations: count_violations(&traj, bound),
            failure: None,
        },
        Err(e) => SweepRow {
            h,
            scheme,
            steps,
            min_component: f64::NAN,
            max_population: f64::NAN,
            population_bound: bound,
            violations: 1,
            failure: Some(e.to_string()),
        },
    }
}

/// Runs every (h, scheme) pair over the scenario's time horizon
/// (`h · n_steps` days). Rows come back in input order.
pub fn run_sweep(scenario: &Scenario, h_list: &[f64], schemes: &[Scheme]) -> Result<Vec<SweepRow>> {
    if h_list.is_empty() {
        return Err(Error::Validation("empty step-size list".into()));
    }
    for &h in h_list {
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Invalid {
                field: "h",
                value: h,
                bound: "step size must be finite and > 0",
            });
        }
    }
    let horizon = scenario.h * scenario.n_steps as f64;
    let jobs: Vec<(f64, Scheme)> = h_list
        .iter()
        .flat_map(|&h| schemes.iter().map(move |&s| (h, s)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(h, s)| sweep_one(scenario, h, s, horizon))
        .collect())
}
