//! Scenario files, observed case data, trajectory export and model-vs-data
//! metrics.

mod compare;
mod export;
mod observed;
mod scenario;

pub use compare::{aligned_pairs, compare, FitReport, Mapping};
pub use export::{
    read_trajectory, write_report, write_trajectory, write_trajectory_to, TRAJECTORY_HEADER,
};
pub use observed::{load_observed, parse_observed, ObservedSeries};
pub use scenario::{load_scenario, write_scenario, Scenario, BUNDLED_SCENARIO, SCENARIO_KEYS};

/// Portugal active cases, 2 March – 4 May 2020.
pub const BUNDLED_OBSERVED: &str = include_str!("../../data/portugal_active_cases.csv");
