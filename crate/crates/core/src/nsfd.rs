//! Nonstandard finite-difference map of the SAIQH system.
//!
//! Each step solves the six update equations simultaneously. λ is frozen at
//! its value on the input state, so the step is linear in the unknowns:
//!
//! ```text
//! (I + ψB) x_{n+1} = x_n + ψ (Λ, 0, 0, 0, 0, 0)
//! ```
//!
//! B has nonnegative diagonal, nonpositive off-diagonal entries and column
//! sums of at least μ, so `I + ψB` is a nonsingular M-matrix and the update
//! is nonnegative for any step size.

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{force_of_infection, Parameters, State, COMPARTMENT_NAMES};
use crate::scalar::{sup_norm, Real};
use crate::trajectory::{Scheme, StepDiagnostics, Trajectory};

pub const DEFAULT_POSITIVITY_TOLERANCE: f64 = 1e-12;

/// Denominator function ψ(h) = (e^{μh} − 1)/μ.
pub fn psi<T: Real>(params: &Parameters<T>, h: T) -> T {
    (params.mu * h).exp_m1() / params.mu
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig<T> {
    pub h: T,
    /// Negative outputs down to `-positivity_tolerance · N` are clamped to
    /// zero; anything below is an error.
    pub positivity_tolerance: T,
}

impl<T: Real> StepConfig<T> {
    pub fn new(h: T) -> Result<Self> {
        Self::with_tolerance(h, T::lit(DEFAULT_POSITIVITY_TOLERANCE))
    }

    pub fn with_tolerance(h: T, positivity_tolerance: T) -> Result<Self> {
        if !h.is_finite() || h <= T::zero() {
            return Err(Error::Invalid {
                field: "h",
                value: h.as_f64(),
                bound: "step size must be finite and > 0",
            });
        }
        if !(positivity_tolerance >= T::zero()) {
            return Err(Error::Invalid {
                field: "positivity_tolerance",
                value: positivity_tolerance.as_f64(),
                bound: "must be >= 0",
            });
        }
        Ok(Self {
            h,
            positivity_tolerance,
        })
    }
}

/// Assembles `I + ψB` and `x_n + ψc` for one step.
pub fn step_system<T: Real>(
    params: &Parameters<T>,
    state: &State<T>,
    psi: T,
    lambda: T,
) -> ([[T; 6]; 6], [T; 6]) {
    let one = T::one();
    let zero = T::zero();
    let Parameters {
        mu,
        phi,
        nu,
        delta1,
        delta2,
        eta,
        omega,
        alpha1,
        alpha2,
        p,
        q,
        f1,
        f2,
        f3,
        kappa,
        m,
        ..
    } = *params;
    let infection = lambda * (one - p);
    let to_home = delta2 * (one - f2 - f3);
    let icu_recovery = eta * (one - kappa);

    // rows/cols: S, A, I, Q, H, H̄
    let b = [
        [infection + phi * p + mu, zero, zero, -omega * m, zero, zero],
        [-infection, q * nu + mu, zero, zero, zero, zero],
        [zero, -q * nu, delta1 + mu, zero, zero, zero],
        [-phi * p, zero, -delta1 * f1, omega * m + mu, -to_home, zero],
        [
            zero,
            zero,
            -delta1 * (one - f1),
            zero,
            to_home + delta2 * f2 + alpha1 * f3 + mu,
            -icu_recovery,
        ],
        [
            zero,
            zero,
            zero,
            zero,
            -delta2 * f2,
            icu_recovery + alpha2 * kappa + mu,
        ],
    ];
    let mut matrix = b;
    for (r, row) in matrix.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = if r == c { one + psi * *v } else { psi * *v };
        }
    }
    let mut rhs = state.compartments();
    rhs[0] = rhs[0] + psi * params.recruitment;
    (matrix, rhs)
}

/// One step plus the relative residual of its linear solve.
pub fn nsfd_step_with_residual<T: Real>(
    params: &Parameters<T>,
    state: &State<T>,
    cfg: &StepConfig<T>,
) -> Result<(State<T>, T)> {
    let psi = psi(params, cfg.h);
    let lambda = force_of_infection(params, state)?;
    let (matrix, rhs) = step_system(params, state, psi, lambda);
    let mut next = linalg::solve(matrix, rhs).ok_or(Error::NonFinite("NSFD linear solve"))?;
    let residual = linalg::relative_residual(&matrix, &next, &rhs);

    let floor = -cfg.positivity_tolerance * state.population();
    for (x, name) in next.iter_mut().zip(COMPARTMENT_NAMES) {
        if *x < floor {
            return Err(Error::PositivityViolated {
                compartment: name,
                value: x.as_f64(),
                population: state.population().as_f64(),
            });
        }
        if *x < T::zero() {
            *x = T::zero();
        }
    }
    let deaths = state.deaths
        + psi * (params.alpha1 * params.f3 * next[4] + params.alpha2 * params.kappa * next[5]);
    Ok((State::from_compartments(next, deaths), residual))
}

pub fn nsfd_step<T: Real>(
    params: &Parameters<T>,
    state: &State<T>,
    cfg: &StepConfig<T>,
) -> Result<State<T>> {
    nsfd_step_with_residual(params, state, cfg).map(|(s, _)| s)
}

pub(crate) fn diagnostics<T: Real>(
    params: &Parameters<T>,
    state: &State<T>,
    solve_residual: T,
) -> Result<StepDiagnostics<T>> {
    Ok(StepDiagnostics {
        population: state.population(),
        force_of_infection: force_of_infection(params, state)?,
        solve_residual,
    })
}

/// Runs `n_steps` NSFD steps from `init`; the result holds `n_steps + 1` states.
pub fn simulate<T: Real>(
    params: &Parameters<T>,
    init: &State<T>,
    cfg: &StepConfig<T>,
    n_steps: usize,
) -> Result<Trajectory<T>> {
    params.validate()?;
    init.validate()?;
    if n_steps == 0 {
        return Err(Error::Invalid {
            field: "n_steps",
            value: 0.0,
            bound: "must be >= 1",
        });
    }
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut diags = Vec::with_capacity(n_steps + 1);
    diags.push(diagnostics(params, init, T::zero())?);
    states.push(*init);
    let mut current = *init;
    for index in 1..=n_steps {
        let wrap = |e: Error| Error::Step {
            index,
            source: Box::new(e),
        };
        let (next, residual) = nsfd_step_with_residual(params, &current, cfg).map_err(wrap)?;
        diags.push(diagnostics(params, &next, residual).map_err(wrap)?);
        states.push(next);
        current = next;
    }
    Ok(Trajectory {
        scheme: Scheme::Nsfd,
        h: cfg.h,
        start_date: None,
        states,
        diagnostics: diags,
    })
}

/// ‖step(x) − x‖∞ / max(1, ‖x‖∞) over the six living compartments.
pub fn fixed_point_residual<T: Real>(
    params: &Parameters<T>,
    point: &State<T>,
    cfg: &StepConfig<T>,
) -> Result<T> {
    let next = nsfd_step(params, point, cfg)?;
    let x = point.compartments();
    let diff: Vec<T> = next
        .compartments()
        .iter()
        .zip(x)
        .map(|(a, b)| *a - b)
        .collect();
    Ok(sup_norm(&diff) / T::one().max(sup_norm(&x)))
}
