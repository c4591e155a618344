use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::State;
use crate::scalar::Real;

/// Integration scheme that produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Nsfd,
    Rk4,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Nsfd => "nsfd",
            Scheme::Rk4 => "rk4",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "nsfd" => Ok(Scheme::Nsfd),
            "rk4" => Ok(Scheme::Rk4),
            other => Err(format!("unknown scheme `{other}` (expected nsfd or rk4)")),
        }
    }
}

/// Quantities recorded alongside each state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics<T> {
    /// N at this state.
    pub population: T,
    /// λ evaluated at this state.
    pub force_of_infection: T,
    /// Relative residual of the linear solve that produced this state
    /// (zero for the initial state and for explicit schemes).
    pub solve_residual: T,
}

/// States at t = 0, h, 2h, … with index-aligned diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub scheme: Scheme,
    pub h: T,
    /// Calendar date of t = 0, when known.
    pub start_date: Option<NaiveDate>,
    pub states: Vec<State<T>>,
    pub diagnostics: Vec<StepDiagnostics<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, step: usize) -> T {
        T::lit(step as f64) * self.h
    }

    pub fn last(&self) -> &State<T> {
        self.states.last().expect("trajectory holds at least one state")
    }

    /// Smallest compartment value over the whole trajectory.
    pub fn min_component(&self) -> T {
        self.states
            .iter()
            .flat_map(|s| s.compartments())
            .fold(T::infinity(), T::min)
    }

    pub fn max_population(&self) -> T {
        self.diagnostics
            .iter()
            .map(|d| d.population)
            .fold(T::neg_infinity(), T::max)
    }
}
