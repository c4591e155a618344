use serde::{Deserialize, Serialize};

use super::observed::ObservedSeries;
use crate::error::{Error, Result};
use crate::model::State;
use crate::scalar::Real;
use crate::trajectory::Trajectory;

/// Which model compartments are compared against the observed counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mapping {
    #[serde(rename = "I_only")]
    IOnly,
    #[serde(rename = "I_plus_H_plus_Hbar")]
    IPlusHPlusHbar,
}

impl Mapping {
    pub fn project<T: Real>(&self, s: &State<T>) -> f64 {
        match self {
            Mapping::IOnly => s.infected.as_f64(),
            Mapping::IPlusHPlusHbar => (s.infected + s.hospitalized + s.icu).as_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub mapping: Mapping,
    pub rmse: f64,
    pub mae: f64,
    pub max_abs_error: f64,
    pub n_points: usize,
}

/// Number of stored steps per day, if the step size divides one day.
fn steps_per_day<T: Real>(h: T) -> Option<usize> {
    let per_day = 1.0 / h.as_f64();
    let rounded = per_day.round();
    (rounded >= 1.0 && (per_day - rounded).abs() <= 1e-9 * per_day).then_some(rounded as usize)
}

/// Model series sampled at the observed dates that fall inside the trajectory.
pub fn aligned_pairs<T: Real>(
    traj: &Trajectory<T>,
    obs: &ObservedSeries,
    mapping: Mapping,
) -> Result<Vec<(f64, f64)>> {
    let start = traj
        .start_date
        .ok_or_else(|| Error::Validation("trajectory has no start date".into()))?;
    let per_day = steps_per_day(traj.h).ok_or_else(|| {
        Error::Validation(format!(
            "trajectory step {} does not divide one day",
            traj.h
        ))
    })?;
    Ok(obs
        .dates
        .iter()
        .zip(&obs.active_cases)
        .filter_map(|(date, &count)| {
            let day = usize::try_from((*date - start).num_days()).ok()?;
            let state = traj.states.get(day.checked_mul(per_day)?)?;
            Some((mapping.project(state), count as f64))
        })
        .collect())
}

pub fn compare<T: Real>(
    traj: &Trajectory<T>,
    obs: &ObservedSeries,
    mapping: Mapping,
) -> Result<FitReport> {
    let pairs = aligned_pairs(traj, obs, mapping)?;
    if pairs.is_empty() {
        return Err(Error::NoOverlap);
    }
    let n = pairs.len() as f64;
    let (sq, abs, max) = pairs.iter().fold((0.0, 0.0, 0.0f64), |(sq, abs, max), (m, o)| {
        let e = (m - o).abs();
        (sq + e * e, abs + e, max.max(e))
    });
    Ok(FitReport {
        mapping,
        rmse: (sq / n).sqrt(),
        mae: abs / n,
        max_abs_error: max,
        n_points: pairs.len(),
    })
}
