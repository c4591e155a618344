//! Discrete Lyapunov function for the disease-free equilibrium and the
//! checks built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dfe, endemic_equilibrium, force_of_infection, reproduction_number, Parameters, State};
use crate::nsfd::psi;
use crate::scalar::{sup_norm, Real};
use crate::trajectory::Trajectory;

/// Width of the band around R0 = 1 reported as [`Classification::Threshold`].
pub const THRESHOLD_BAND: f64 = 1e-12;

/// Allowed relative increase of L per step before it counts as a violation.
pub const DESCENT_TOLERANCE: f64 = 1e-10;

/// Relative disagreement between recorded and recomputed λ that marks a
/// trajectory as belonging to other parameters.
pub const DIAGNOSTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// R0 < 1
    DfeGloballyStable,
    /// |R0 − 1| within [`THRESHOLD_BAND`]
    Threshold,
    /// R0 > 1
    EndemicExists,
}

pub fn classify_r0<T: Real>(r0: T) -> Classification {
    let gap = r0 - T::one();
    if gap.abs() <= T::lit(THRESHOLD_BAND) {
        Classification::Threshold
    } else if gap < T::zero() {
        Classification::DfeGloballyStable
    } else {
        Classification::EndemicExists
    }
}

pub fn classify<T: Real>(params: &Parameters<T>) -> Result<Classification> {
    Ok(classify_r0(reproduction_number(params)?))
}

/// G(x) = x − ln x − 1, written in terms of u = x − 1.
fn g_shifted<T: Real>(u: T) -> T {
    u - u.ln_1p()
}

/// `reference · G(value / reference)`; the `reference → 0` limit is `value`.
fn weighted_g<T: Real>(value: T, reference: T) -> Option<T> {
    if reference == T::zero() {
        return Some(value);
    }
    if !(value > T::zero()) {
        return None;
    }
    Some(reference * g_shifted((value - reference) / reference))
}

/// Lyapunov value of `state` relative to the disease-free point.
///
/// `None` when the logarithm is undefined (S ≤ 0, or Q ≤ 0 while the
/// disease-free Q is positive).
pub fn lyapunov<T: Real>(params: &Parameters<T>, state: &State<T>, h: T) -> Result<Option<T>> {
    let e0 = dfe(params)?.state;
    Ok(lyapunov_with(state, &e0, psi(params, h)))
}

fn lyapunov_with<T: Real>(state: &State<T>, e0: &State<T>, psi: T) -> Option<T> {
    let s_term = weighted_g(state.susceptible, e0.susceptible)?;
    let q_term = weighted_g(state.quarantined, e0.quarantined)?;
    let linear = state.asymptomatic + state.infected + state.hospitalized + state.icu;
    Some((s_term + q_term + linear).max(T::zero()) / psi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<T> {
    pub r0: T,
    pub classification: Classification,
    /// L at each stored state; `null` where undefined.
    pub lyapunov_series: Vec<Option<T>>,
    pub descent_violations: usize,
    /// Sup-norm distance of each state to the equilibrium the classification
    /// points at (disease-free unless R0 > 1).
    pub distance_to_target: Vec<T>,
    /// Set when R0 < 1 and L never increased beyond tolerance.
    pub verified: bool,
}

impl<T: Real> StabilityReport<T> {
    /// First index from which the distance to the target never increases.
    pub fn settling_index(&self) -> usize {
        let d = &self.distance_to_target;
        (1..d.len())
            .rev()
            .find(|&k| d[k] > d[k - 1])
            .unwrap_or(0)
    }

    pub fn first_defined(&self) -> Option<usize> {
        self.lyapunov_series.iter().position(Option::is_some)
    }
}

fn close<T: Real>(a: T, b: T) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= T::lit(DIAGNOSTIC_TOLERANCE) * scale
}

/// Evaluates L along `traj`, counts increases, and measures convergence.
pub fn verify_descent<T: Real>(
    params: &Parameters<T>,
    traj: &Trajectory<T>,
) -> Result<StabilityReport<T>> {
    let r0 = reproduction_number(params)?;
    let classification = classify_r0(r0);

    for (n, (state, diag)) in traj.states.iter().zip(&traj.diagnostics).enumerate() {
        let lambda = force_of_infection(params, state)?;
        if !close(lambda, diag.force_of_infection) || !close(state.population(), diag.population)
        {
            return Err(Error::Mismatch(format!(
                "step {n}: recorded lambda {} vs recomputed {}",
                diag.force_of_infection, lambda
            )));
        }
    }

    let e0 = dfe(params)?.state;
    let target = match classification {
        Classification::EndemicExists => endemic_equilibrium(params)?.state,
        _ => e0,
    };
    let ps = psi(params, traj.h);
    let lyapunov_series: Vec<Option<T>> = traj
        .states
        .iter()
        .map(|s| lyapunov_with(s, &e0, ps))
        .collect();

    let tol = T::lit(DESCENT_TOLERANCE);
    let descent_violations = lyapunov_series
        .windows(2)
        .filter(|w| match (w[0], w[1]) {
            (Some(prev), Some(next)) => next - prev > tol * T::one().max(prev),
            _ => false,
        })
        .count();

    let target_x = target.compartments();
    let distance_to_target = traj
        .states
        .iter()
        .map(|s| {
            let diff: Vec<T> = s
                .compartments()
                .iter()
                .zip(target_x)
                .map(|(a, b)| *a - b)
                .collect();
            sup_norm(&diff)
        })
        .collect();

    Ok(StabilityReport {
        r0,
        classification,
        verified: classification == Classification::DfeGloballyStable && descent_violations == 0,
        lyapunov_series,
        descent_violations,
        distance_to_target,
    })
}
