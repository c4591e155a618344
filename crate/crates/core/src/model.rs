//! Model parameters, state, composite rates, reproduction number and the two
//! equilibrium points of the SAIQH system.
//!
//! The discrete map and the continuous flow share their equilibria, so every
//! quantity here is scheme-independent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rates (per day) and fractions of the SAIQH model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters<T> {
    /// Recruitment into S, persons per day (Λ).
    pub recruitment: T,
    /// Natural death rate.
    pub mu: T,
    /// Human-to-human transmission rate.
    pub beta: T,
    /// Relative transmissibility of A.
    pub l_a: T,
    /// Relative transmissibility of H.
    pub l_h: T,
    /// S → Q rate.
    pub phi: T,
    /// A → I rate.
    pub nu: T,
    /// I → Q/H rate.
    pub delta1: T,
    /// H → Q/H̄ rate.
    pub delta2: T,
    /// H̄ → H rate.
    pub eta: T,
    /// Q → S rate.
    pub omega: T,
    /// Disease death rate in H.
    pub alpha1: T,
    /// Disease death rate in H̄.
    pub alpha2: T,
    /// Fraction of S put in quarantine.
    pub p: T,
    /// Fraction of A developing severe symptoms.
    pub q: T,
    /// Fraction of I treated at home.
    pub f1: T,
    /// Fraction of H moved to intensive care.
    pub f2: T,
    /// Fraction of H dying.
    pub f3: T,
    /// Fraction of H̄ dying.
    pub kappa: T,
    /// Fraction of Q returning to S.
    pub m: T,
}

impl<T: Real> Parameters<T> {
    /// Checks every bound; the first violation is reported.
    ///
    /// μ and Λ must be strictly positive. The remaining rates may be zero,
    /// which switches the corresponding flow off.
    pub fn validate(&self) -> Result<()> {
        let positive = [("Lambda", self.recruitment), ("mu", self.mu)];
        for (field, v) in positive {
            if !v.is_finite() || v <= T::zero() {
                return Err(invalid(field, v, "must be finite and > 0"));
            }
        }
        let rates = [
            ("beta", self.beta),
            ("lA", self.l_a),
            ("lH", self.l_h),
            ("phi", self.phi),
            ("nu", self.nu),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("eta", self.eta),
            ("omega", self.omega),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
        ];
        for (field, v) in rates {
            if !v.is_finite() || v < T::zero() {
                return Err(invalid(field, v, "must be finite and >= 0"));
            }
        }
        let fractions = [
            ("p", self.p),
            ("q", self.q),
            ("f1", self.f1),
            ("f2", self.f2),
            ("f3", self.f3),
            ("kappa", self.kappa),
            ("m", self.m),
        ];
        for (field, v) in fractions {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(invalid(field, v, "must lie in [0, 1]"));
            }
        }
        if self.f2 + self.f3 > T::one() {
            return Err(invalid("f2+f3", self.f2 + self.f3, "must be <= 1"));
        }
        Ok(())
    }

    /// Carrying level Λ/μ of the total population.
    pub fn population_bound(&self) -> T {
        self.recruitment / self.mu
    }

    pub fn cast<U: Real>(&self) -> Parameters<U> {
        let c = |x: T| U::lit(x.as_f64());
        Parameters {
            recruitment: c(self.recruitment),
            mu: c(self.mu),
            beta: c(self.beta),
            l_a: c(self.l_a),
            l_h: c(self.l_h),
            phi: c(self.phi),
            nu: c(self.nu),
            delta1: c(self.delta1),
            delta2: c(self.delta2),
            eta: c(self.eta),
            omega: c(self.omega),
            alpha1: c(self.alpha1),
            alpha2: c(self.alpha2),
            p: c(self.p),
            q: c(self.q),
            f1: c(self.f1),
            f2: c(self.f2),
            f3: c(self.f3),
            kappa: c(self.kappa),
            m: c(self.m),
        }
    }
}

fn invalid<T: Real>(field: &'static str, value: T, bound: &'static str) -> Error {
    Error::Invalid {
        field,
        value: value.as_f64(),
        bound,
    }
}

/// Compartment sizes (persons) plus the cumulative death tally.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State<T> {
    pub susceptible: T,
    pub asymptomatic: T,
    pub infected: T,
    pub quarantined: T,
    pub hospitalized: T,
    /// Hospitalized in intensive care (H̄).
    pub icu: T,
    /// Cumulative disease deaths; not part of the living population.
    pub deaths: T,
}

pub const COMPARTMENT_NAMES: [&str; 6] = ["S", "A", "I", "Q", "H", "Hbar"];

impl<T: Real> State<T> {
    pub fn new(s: T, a: T, i: T, q: T, h: T, icu: T) -> Self {
        Self::from_compartments([s, a, i, q, h, icu], T::zero())
    }

    /// Living compartments in (S, A, I, Q, H, H̄) order.
    pub fn compartments(&self) -> [T; 6] {
        [
            self.susceptible,
            self.asymptomatic,
            self.infected,
            self.quarantined,
            self.hospitalized,
            self.icu,
        ]
    }

    pub fn from_compartments(x: [T; 6], deaths: T) -> Self {
        Self {
            susceptible: x[0],
            asymptomatic: x[1],
            infected: x[2],
            quarantined: x[3],
            hospitalized: x[4],
            icu: x[5],
            deaths,
        }
    }

    /// Living population N.
    pub fn population(&self) -> T {
        self.compartments()
            .iter()
            .fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in COMPARTMENT_NAMES.iter().zip(self.compartments()) {
            if !v.is_finite() || v < T::zero() {
                return Err(invalid(name, v, "compartment must be finite and >= 0"));
            }
        }
        if !self.deaths.is_finite() || self.deaths < T::zero() {
            return Err(invalid("D", self.deaths, "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> State<U> {
        let c = |x: T| U::lit(x.as_f64());
        State {
            susceptible: c(self.susceptible),
            asymptomatic: c(self.asymptomatic),
            infected: c(self.infected),
            quarantined: c(self.quarantined),
            hospitalized: c(self.hospitalized),
            icu: c(self.icu),
            deaths: c(self.deaths),
        }
    }
}

/// Composite rates used throughout the equilibrium and threshold formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants<T> {
    /// qν + μ
    pub a0: T,
    /// δ₁ + μ
    pub a1: T,
    /// mω + μ
    pub a2: T,
    /// total exit rate from H
    pub a3: T,
    /// δ₂(1 − f₂ − f₃)
    pub a4: T,
    /// pφ + μ
    pub a5: T,
    /// δ₁(1 − f₁)
    pub a6: T,
    /// α₂κ + η_k + μ
    pub a7: T,
    /// η(1 − κ)
    pub eta_k: T,
    /// a₃a₇ − δ₂η_k f₂
    pub chi: T,
    /// Numerator of R0.
    pub cal_n: T,
    /// Denominator of R0.
    pub cal_d: T,
}

pub fn derived_constants<T: Real>(params: &Parameters<T>) -> Result<DerivedConstants<T>> {
    params.validate()?;
    let one = T::one();
    let Parameters {
        mu,
        beta,
        l_a,
        l_h,
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

    let qnu = q * nu;
    let a0 = qnu + mu;
    let a1 = delta1 + mu;
    let a2 = m * omega + mu;
    let a4 = delta2 * (one - f2 - f3);
    let a3 = a4 + delta2 * f2 + alpha1 * f3 + mu;
    let a5 = p * phi + mu;
    let a6 = delta1 * (one - f1);
    let eta_k = eta * (one - kappa);
    let a7 = alpha2 * kappa + eta_k + mu;
    let chi = a3 * a7 - delta2 * eta_k * f2;

    // l_A weights the direct A-route; the closed form with l_A = 1 is the
    // usual published expression.
    let cal_n = beta * a2 * (one - p) * (l_h * a6 * a7 * qnu + (l_a * a1 + qnu) * chi);
    let cal_d = a0 * a1 * chi * (p * phi + a2);

    Ok(DerivedConstants {
        a0,
        a1,
        a2,
        a3,
        a4,
        a5,
        a6,
        a7,
        eta_k,
        chi,
        cal_n,
        cal_d,
    })
}

/// λ = β(l_A A + I + l_H H)/N. H̄ does not transmit.
pub fn force_of_infection<T: Real>(params: &Parameters<T>, state: &State<T>) -> Result<T> {
    let n = state.population();
    if !(n > T::zero()) {
        return Err(Error::Domain(format!(
            "force of infection needs N > 0, got {n}"
        )));
    }
    Ok(params.beta
        * (params.l_a * state.asymptomatic + state.infected + params.l_h * state.hospitalized)
        / n)
}

/// R0 = 𝒩/𝒟.
pub fn reproduction_number<T: Real>(params: &Parameters<T>) -> Result<T> {
    let dc = derived_constants(params)?;
    Ok(dc.cal_n / dc.cal_d)
}

/// R0 evaluated in the expanded form, before χ is factored out of the
/// numerator. Agrees with [`reproduction_number`] up to round-off.
pub fn reproduction_number_expanded<T: Real>(params: &Parameters<T>) -> Result<T> {
    let dc = derived_constants(params)?;
    let qnu = params.q * params.nu;
    let direct = params.l_a * dc.a1 + qnu;
    let bracket = (params.l_h * dc.a6 * qnu + direct * dc.a3) * dc.a7
        - params.delta2 * dc.eta_k * params.f2 * direct;
    let num = params.beta * dc.a2 * (T::one() - params.p) * bracket;
    let den = dc.a0 * dc.a1 * dc.chi * (params.p * params.phi + dc.a2);
    Ok(num / den)
}

/// Transmission rate at which R0 = 1, all other parameters fixed.
///
/// Returns `None` when R0 cannot reach 1 (p = 1 or no infectious route).
pub fn critical_beta<T: Real>(params: &Parameters<T>) -> Result<Option<T>> {
    let unit = Parameters {
        beta: T::one(),
        ..*params
    };
    let dc = derived_constants(&unit)?;
    if dc.cal_n > T::zero() {
        Ok(Some(dc.cal_d / dc.cal_n))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum EquilibriumKind {
    Dfe,
    Ee,
}

/// An equilibrium of the map; `state.deaths` is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint<T> {
    pub kind: EquilibriumKind,
    pub state: State<T>,
    pub lambda_star: T,
}

/// Disease-free equilibrium: S₀ = Λa₂/(μ(pφ+a₂)), Q₀ = Λpφ/(μ(pφ+a₂)).
pub fn dfe<T: Real>(params: &Parameters<T>) -> Result<EquilibriumPoint<T>> {
    let dc = derived_constants(params)?;
    let inflow = params.p * params.phi;
    let denom = params.mu * (inflow + dc.a2);
    let zero = T::zero();
    let state = State::new(
        params.recruitment * dc.a2 / denom,
        zero,
        zero,
        params.recruitment * inflow / denom,
        zero,
        zero,
    );
    Ok(EquilibriumPoint {
        kind: EquilibriumKind::Dfe,
        state,
        lambda_star: zero,
    })
}

/// Per-unit weight of the endemic population in λ*(1−p).
fn endemic_weight<T: Real>(params: &Parameters<T>, dc: &DerivedConstants<T>) -> T {
    let qnu = params.q * params.nu;
    dc.a2 * ((dc.a1 + qnu) * dc.chi + dc.a6 * qnu * (dc.a7 + params.delta2 * params.f2))
        + qnu * (dc.chi * params.f1 * params.delta1 + dc.a4 * dc.a6 * dc.a7)
}

/// Force of infection at the endemic point, 𝒟(R0 − 1)/((1−p)·W).
///
/// Negative below threshold, zero at R0 = 1. The sign is the useful signal
/// there; the point itself only exists for R0 > 1.
pub fn endemic_lambda<T: Real>(params: &Parameters<T>) -> Result<T> {
    let dc = derived_constants(params)?;
    let susceptible_share = T::one() - params.p;
    if susceptible_share <= T::zero() {
        return Err(Error::Domain(
            "endemic force of infection undefined for p = 1".into(),
        ));
    }
    let weight = endemic_weight(params, &dc);
    if !(weight > T::zero()) {
        return Err(Error::Domain(
            "endemic force of infection undefined: no infectious pathway".into(),
        ));
    }
    Ok((dc.cal_n - dc.cal_d) / (susceptible_share * weight))
}

pub fn endemic_equilibrium<T: Real>(params: &Parameters<T>) -> Result<EquilibriumPoint<T>> {
    let dc = derived_constants(params)?;
    let r0 = dc.cal_n / dc.cal_d;
    if !(r0 > T::one()) {
        return Err(Error::NoEndemicEquilibrium { r0: r0.as_f64() });
    }
    let lambda_star = endemic_lambda(params)?;
    let x = lambda_star * (T::one() - params.p);
    let qnu = params.q * params.nu;
    let wm = params.omega * params.m;
    let big_lambda = params.recruitment;

    let d_a = params.mu * dc.cal_d
        + x * (dc.chi * (dc.a2 * dc.a1 * dc.a0 - params.f1 * params.delta1 * wm * qnu)
            - dc.a4 * dc.a6 * dc.a7 * qnu * wm);
    let k = big_lambda / d_a;

    let s = dc.a0 * dc.a1 * dc.a2 * dc.chi * k;
    let a = dc.a1 * dc.a2 * dc.chi * x * k;
    let i = dc.a2 * qnu * dc.chi * x * k;
    let q = (dc.a0 * dc.a1 * params.p * params.phi * dc.chi
        + x * qnu * (dc.chi * params.f1 * params.delta1 + dc.a4 * dc.a6 * dc.a7))
        * k;
    let h = dc.a2 * dc.a6 * dc.a7 * qnu * x * k;
    let icu = dc.a2 * dc.a6 * params.delta2 * params.f2 * qnu * x * k;

    Ok(EquilibriumPoint {
        kind: EquilibriumKind::Ee,
        state: State::new(s, a, i, q, h, icu),
        lambda_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_io::Scenario;
    use approx::assert_relative_eq;

    fn table2() -> Parameters<f64> {
        Scenario::bundled().params
    }

    #[test]
    fn a1_matches_table_values() {
        let p = table2();
        let dc = derived_constants(&p).unwrap();
        let mu = 111_793.0 / (365.0 * 10_286_300.0);
        assert_relative_eq!(p.mu, mu, max_relative = 1e-15);
        assert_relative_eq!(dc.a1, 1.0 / 3.0 + mu, max_relative = 1e-15);
    }

    #[test]
    fn kappa_one_removes_icu_recovery() {
        let p = Parameters {
            kappa: 1.0,
            ..table2()
        };
        let dc = derived_constants(&p).unwrap();
        assert_eq!(dc.eta_k, 0.0);
        assert_eq!(dc.chi, dc.a3 * dc.a7);
    }

    #[test]
    fn composite_rates_recompute() {
        let p = table2();
        let dc = derived_constants(&p).unwrap();
        assert_eq!(dc.a0, p.q * p.nu + p.mu);
        assert_eq!(dc.a2, p.m * p.omega + p.mu);
        assert_eq!(dc.a5, p.p * p.phi + p.mu);
        assert_eq!(dc.a6, p.delta1 * (1.0 - p.f1));
        assert_relative_eq!(
            dc.a3,
            p.delta2 * (1.0 - p.f2 - p.f3) + p.delta2 * p.f2 + p.alpha1 * p.f3 + p.mu,
            max_relative = 1e-15
        );
        assert!(dc.chi > 0.0);
    }

    #[test]
    fn validation_names_the_field() {
        let bad = Parameters {
            f2: 0.7,
            f3: 0.5,
            ..table2()
        };
        match bad.validate() {
            Err(Error::Invalid { field, .. }) => assert_eq!(field, "f2+f3"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = Parameters {
            mu: 0.0,
            ..table2()
        };
        assert!(matches!(
            derived_constants(&bad),
            Err(Error::Invalid { field: "mu", .. })
        ));
        let bad = Parameters {
            q: 1.5,
            ..table2()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn force_of_infection_examples() {
        let p = table2();
        let s = State::new(10_286_285.0, 13.0, 2.0, 0.0, 0.0, 0.0);
        let lam = force_of_infection(&p, &s).unwrap();
        assert_relative_eq!(lam, 1.93 * 15.0 / 10_286_300.0, max_relative = 1e-15);

        let empty = State::new(100.0, 0.0, 0.0, 5.0, 0.0, 7.0);
        assert_eq!(force_of_infection(&p, &empty).unwrap(), 0.0);

        let zero = State::<f64>::default();
        assert!(matches!(
            force_of_infection(&p, &zero),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn force_of_infection_is_scale_free() {
        let p = table2();
        let s = State::new(1000.0, 13.0, 2.0, 40.0, 3.0, 1.0);
        let c = 7.25;
        let scaled = State::from_compartments(s.compartments().map(|x| x * c), 0.0);
        assert_relative_eq!(
            force_of_infection(&p, &s).unwrap(),
            force_of_infection(&p, &scaled).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn r0_for_portugal() {
        let r0 = reproduction_number(&table2()).unwrap();
        assert!((r0 - 0.95).abs() <= 0.01, "R0 = {r0}");
    }

    #[test]
    fn r0_vanishes_without_transmission() {
        let p = Parameters {
            beta: 0.0,
            ..table2()
        };
        assert_eq!(reproduction_number(&p).unwrap(), 0.0);
        let p = Parameters { p: 1.0, ..table2() };
        assert_eq!(reproduction_number(&p).unwrap(), 0.0);
        assert_eq!(critical_beta(&p).unwrap(), None);
    }

    #[test]
    fn dfe_identities() {
        let p = table2();
        let e = dfe(&p).unwrap();
        assert_relative_eq!(
            e.state.susceptible + e.state.quarantined,
            p.population_bound(),
            max_relative = 1e-15
        );
        let no_q = Parameters { p: 0.0, ..p };
        let e = dfe(&no_q).unwrap();
        assert_eq!(e.state.quarantined, 0.0);
        assert_relative_eq!(e.state.susceptible, no_q.population_bound(), max_relative = 1e-15);
    }

    #[test]
    fn endemic_lambda_sign_and_threshold() {
        let p = table2();
        assert!(endemic_lambda(&p).unwrap() < 0.0);
        let bc = critical_beta(&p).unwrap().unwrap();
        let at = Parameters { beta: bc, ..p };
        assert!(endemic_lambda(&at).unwrap().abs() < 1e-15);
        let above = Parameters { beta: 3.86, ..p };
        assert!(endemic_lambda(&above).unwrap() > 0.0);
        let p1 = Parameters { p: 1.0, ..p };
        assert!(matches!(endemic_lambda(&p1), Err(Error::Domain(_))));
    }

    #[test]
    fn endemic_equilibrium_requires_r0_above_one() {
        match endemic_equilibrium(&table2()) {
            Err(Error::NoEndemicEquilibrium { r0 }) => assert!(r0 < 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn endemic_point_is_positive_and_bounded() {
        let p = Parameters {
            beta: 3.86,
            ..table2()
        };
        let ee = endemic_equilibrium(&p).unwrap();
        assert_eq!(ee.kind, EquilibriumKind::Ee);
        for x in ee.state.compartments() {
            assert!(x > 0.0);
        }
        assert!(ee.state.population() <= p.population_bound());
        assert_eq!(ee.state.deaths, 0.0);
    }

    #[test]
    fn endemic_point_approaches_dfe_at_threshold() {
        let p = table2();
        let bc = critical_beta(&p).unwrap().unwrap();
        let e0 = dfe(&p).unwrap().state.compartments();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let ee = endemic_equilibrium(&Parameters {
                beta: bc * (1.0 + eps),
                ..p
            })
            .unwrap();
            let gap = ee
                .state
                .compartments()
                .iter()
                .zip(e0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev / p.population_bound() < 1e-5);
    }
}
