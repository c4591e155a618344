//! Continuous SAIQH flow and a fixed-step classical Runge–Kutta integrator,
//! used as the reference the discrete map is compared against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{force_of_infection, Parameters, State, COMPARTMENT_NAMES};
use crate::nsfd::{diagnostics, DEFAULT_POSITIVITY_TOLERANCE};
use crate::scalar::Real;
use crate::trajectory::{Scheme, Trajectory};

pub const DEFAULT_RK4_STEP: f64 = 0.01;

/// Number of times a failing step is retried with half the substep.
pub const MAX_HALVINGS: u32 = 4;

/// Time derivatives in persons per day.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DerivativeVector<T> {
    pub d_s: T,
    pub d_a: T,
    pub d_i: T,
    pub d_q: T,
    pub d_h: T,
    pub d_hbar: T,
    pub d_d: T,
}

impl<T: Real> DerivativeVector<T> {
    fn as_array(&self) -> [T; 7] {
        [
            self.d_s,
            self.d_a,
            self.d_i,
            self.d_q,
            self.d_h,
            self.d_hbar,
            self.d_d,
        ]
    }

    /// dN/dt, the sum over the living compartments.
    pub fn population_rate(&self) -> T {
        self.as_array()[..6]
            .iter()
            .fold(T::zero(), |acc, &x| acc + x)
    }
}

pub fn rhs<T: Real>(params: &Parameters<T>, state: &State<T>) -> Result<DerivativeVector<T>> {
    let lambda = force_of_infection(params, state)?;
    let one = T::one();
    let Parameters {
        recruitment,
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
    let State {
        susceptible: s,
        asymptomatic: a,
        infected: i,
        quarantined: qq,
        hospitalized: h,
        icu,
        ..
    } = *state;
    let infection = lambda * (one - p) * s;
    let to_home = delta2 * (one - f2 - f3);
    let icu_recovery = eta * (one - kappa);
    Ok(DerivativeVector {
        d_s: recruitment + omega * m * qq - (phi * p + mu) * s - infection,
        d_a: infection - (q * nu + mu) * a,
        d_i: q * nu * a - (delta1 + mu) * i,
        d_q: phi * p * s + delta1 * f1 * i + to_home * h - (omega * m + mu) * qq,
        d_h: delta1 * (one - f1) * i + icu_recovery * icu
            - (to_home + delta2 * f2 + alpha1 * f3 + mu) * h,
        d_hbar: delta2 * f2 * h - (icu_recovery + alpha2 * kappa + mu) * icu,
        d_d: alpha1 * f3 * h + alpha2 * kappa * icu,
    })
}

fn as_vec<T: Real>(s: &State<T>) -> [T; 7] {
    let c = s.compartments();
    [c[0], c[1], c[2], c[3], c[4], c[5], s.deaths]
}

fn from_vec<T: Real>(v: [T; 7]) -> State<T> {
    State::from_compartments([v[0], v[1], v[2], v[3], v[4], v[5]], v[6])
}

fn axpy<T: Real>(x: &[T; 7], a: T, y: &[T; 7]) -> State<T> {
    let mut out = *x;
    for (o, v) in out.iter_mut().zip(y) {
        *o = *o + a * *v;
    }
    from_vec(out)
}

fn rk4_step<T: Real>(params: &Parameters<T>, state: &State<T>, h: T) -> Result<State<T>> {
    let two = T::lit(2.0);
    let half = h / two;
    let x = as_vec(state);
    let k1 = rhs(params, state)?.as_array();
    let k2 = rhs(params, &axpy(&x, half, &k1))?.as_array();
    let k3 = rhs(params, &axpy(&x, half, &k2))?.as_array();
    let k4 = rhs(params, &axpy(&x, h, &k3))?.as_array();
    let sixth = h / T::lit(6.0);
    let mut next = x;
    for j in 0..7 {
        next[j] = next[j] + sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
    }
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("RK4 step"));
    }
    Ok(from_vec(next))
}

/// Clamps round-off negatives; larger negatives are reported.
fn enforce_sign<T: Real>(state: &mut State<T>, reference_population: T) -> Result<()> {
    let floor = -T::lit(DEFAULT_POSITIVITY_TOLERANCE) * reference_population;
    let mut x = state.compartments();
    for (v, name) in x.iter_mut().zip(COMPARTMENT_NAMES) {
        if *v < floor {
            return Err(Error::PositivityViolated {
                compartment: name,
                value: v.as_f64(),
                population: reference_population.as_f64(),
            });
        }
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    *state = State::from_compartments(x, state.deaths);
    Ok(())
}

/// Advances one output step of size `h`, splitting it into 2^k substeps
/// (k ≤ [`MAX_HALVINGS`]) if a substep leaves the nonnegative orthant.
fn advance<T: Real>(params: &Parameters<T>, state: &State<T>, h: T) -> Result<State<T>> {
    let mut last_err = None;
    for halvings in 0..=MAX_HALVINGS {
        let pieces = 1usize << halvings;
        let sub = h / T::lit(pieces as f64);
        let attempt = (0..pieces).try_fold(*state, |s, _| {
            let mut next = rk4_step(params, &s, sub)?;
            enforce_sign(&mut next, s.population())?;
            Ok(next)
        });
        match attempt {
            Ok(next) => return Ok(next),
            Err(e @ Error::PositivityViolated { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

pub fn rk4_integrate<T: Real>(
    params: &Parameters<T>,
    init: &State<T>,
    h: T,
    n_steps: usize,
) -> Result<Trajectory<T>> {
    params.validate()?;
    init.validate()?;
    if !h.is_finite() || h <= T::zero() {
        return Err(Error::Invalid {
            field: "h",
            value: h.as_f64(),
            bound: "step size must be finite and > 0",
        });
    }
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
        let next = advance(params, &current, h).map_err(wrap)?;
        diags.push(diagnostics(params, &next, T::zero()).map_err(wrap)?);
        states.push(next);
        current = next;
    }
    Ok(Trajectory {
        scheme: Scheme::Rk4,
        h,
        start_date: None,
        states,
        diagnostics: diags,
    })
}
