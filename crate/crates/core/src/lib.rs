//! Discrete-time SAIQH epidemic model built with a nonstandard
//! finite-difference (NSFD) scheme.
//!
//! The crate covers the model algebra (composite rates, R0, equilibria),
//! the NSFD map and a Runge–Kutta reference for the continuous flow, a
//! discrete Lyapunov check for the disease-free equilibrium, and the file
//! formats used to exchange scenarios, trajectories and reports.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom of this file name the double-precision instantiations.

pub mod data_io;
pub mod error;
pub mod linalg;
pub mod model;
pub mod nsfd;
pub mod ode;
mod scalar;
pub mod stability;
pub mod sweep;
pub mod trajectory;

pub use error::{Error, ErrorKind, Result};
pub use model::{
    critical_beta, derived_constants, dfe, endemic_equilibrium, endemic_lambda,
    force_of_infection, reproduction_number, reproduction_number_expanded, DerivedConstants,
    EquilibriumKind, EquilibriumPoint, Parameters, State,
};
pub use nsfd::{fixed_point_residual, nsfd_step, psi, simulate, StepConfig};
pub use ode::{rhs, rk4_integrate, DerivativeVector};
pub use scalar::Real;
pub use stability::{classify, lyapunov, verify_descent, Classification, StabilityReport};
pub use trajectory::{Scheme, StepDiagnostics, Trajectory};

pub type Parameters64 = Parameters<f64>;
pub type State64 = State<f64>;
pub type DerivedConstants64 = DerivedConstants<f64>;
pub type EquilibriumPoint64 = EquilibriumPoint<f64>;
pub type StepConfig64 = StepConfig<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type StabilityReport64 = StabilityReport<f64>;

pub type Parameters32 = Parameters<f32>;
pub type State32 = State<f32>;
pub type Trajectory32 = Trajectory<f32>;
