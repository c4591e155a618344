#![allow(dead_code)]

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use saiqh::{critical_beta, Parameters, State};

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// A valid parameter set spread over several orders of magnitude.
pub fn random_params(rng: &mut impl Rng) -> Parameters<f64> {
    let f2 = rng.gen_range(0.0..1.0);
    let f3 = rng.gen_range(0.0..(1.0 - f2));
    Parameters {
        recruitment: log_uniform(rng, 1.0, 1e4),
        mu: log_uniform(rng, 1e-5, 1e-1),
        beta: log_uniform(rng, 1e-2, 5.0),
        l_a: rng.gen_range(0.0..1.5),
        l_h: rng.gen_range(0.0..1.0),
        phi: log_uniform(rng, 1e-3, 1.0),
        nu: log_uniform(rng, 1e-2, 1.0),
        delta1: log_uniform(rng, 1e-2, 1.0),
        delta2: log_uniform(rng, 1e-2, 1.0),
        eta: log_uniform(rng, 1e-2, 1.0),
        omega: log_uniform(rng, 1e-3, 1.0),
        alpha1: log_uniform(rng, 1e-3, 1.0),
        alpha2: log_uniform(rng, 1e-3, 1.0),
        p: rng.gen_range(0.0..1.0),
        q: rng.gen_range(0.0..1.0),
        f1: rng.gen_range(0.0..1.0),
        f2,
        f3,
        kappa: rng.gen_range(0.0..1.0),
        m: rng.gen_range(0.0..1.0),
    }
}

/// Random parameters rescaled in β so that R0 equals `r0`.
pub fn random_params_with_r0(rng: &mut impl Rng, r0: f64) -> Parameters<f64> {
    loop {
        let p = random_params(rng);
        if let Some(bc) = critical_beta(&p).unwrap() {
            return Parameters { beta: bc * r0, ..p };
        }
    }
}

/// Nonnegative initial state with 0 < N ≤ Λ/μ; some compartments may be
/// exactly zero.
pub fn random_init(rng: &mut impl Rng, p: &Parameters<f64>) -> State<f64> {
    loop {
        let weights: [f64; 6] = std::array::from_fn(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.0..1.0)
            }
        });
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let n0 = p.population_bound() * rng.gen_range(0.01..=1.0);
        let x = weights.map(|w| w / total * n0);
        return State::from_compartments(x, 0.0);
    }
}

fn dfe_susceptible_share(p: &Parameters<f64>) -> f64 {
    let back = p.m * p.omega + p.mu;
    back / (p.p * p.phi + back)
}

/// Spectral radius of the next-generation matrix F·V⁻¹ of (A, I, H, H̄) at
/// the disease-free state, by power iteration.
pub fn ngm_spectral_radius(p: &Parameters<f64>) -> f64 {
    let scale = p.beta * (1.0 - p.p) * dfe_susceptible_share(p);
    let f = Matrix4::new(
        scale * p.l_a, scale, scale * p.l_h, 0.0, //
        0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 0.0,
    );
    let exit_h = p.delta2 * (1.0 - p.f2 - p.f3) + p.delta2 * p.f2 + p.alpha1 * p.f3 + p.mu;
    let icu_back = p.eta * (1.0 - p.kappa);
    let v = Matrix4::new(
        p.q * p.nu + p.mu, 0.0, 0.0, 0.0, //
        -p.q * p.nu, p.delta1 + p.mu, 0.0, 0.0, //
        0.0, -p.delta1 * (1.0 - p.f1), exit_h, -icu_back, //
        0.0, 0.0, -p.delta2 * p.f2, icu_back + p.alpha2 * p.kappa + p.mu,
    );
    let k = f * v.try_inverse().expect("V invertible");
    let mut x = Vector4::from_element(1.0);
    let mut rho = 0.0;
    for _ in 0..200 {
        let y = k * x;
        let norm = y.amax();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / x.amax();
        x = y / norm;
        if (next - rho).abs() <= 1e-16 * next {
            return next;
        }
        rho = next;
    }
    rho
}

/// Sweeps the six assignment equations of the step in order, always using
/// the newest values, until nothing changes.
pub fn gauss_seidel_step(p: &Parameters<f64>, s: &State<f64>, h: f64) -> [f64; 6] {
    let psi = (p.mu * h).exp_m1() / p.mu;
    let n = s.population();
    let lambda = p.beta * (p.l_a * s.asymptomatic + s.infected + p.l_h * s.hospitalized) / n;
    let inf = lambda * (1.0 - p.p);
    let home = p.delta2 * (1.0 - p.f2 - p.f3);
    let icu_back = p.eta * (1.0 - p.kappa);
    let x0 = s.compartments();
    let mut x = x0;
    for _ in 0..2_000_000 {
        let prev = x;
        x[0] = (p.recruitment * psi + p.omega * p.m * psi * x[3] + x0[0])
            / (1.0 + (inf + p.phi * p.p + p.mu) * psi);
        x[1] = (x0[1] + inf * psi * x[0]) / (1.0 + (p.q * p.nu + p.mu) * psi);
        x[2] = (x0[2] + p.q * p.nu * psi * x[1]) / (1.0 + (p.delta1 + p.mu) * psi);
        x[3] = (x0[3] + psi * (p.phi * p.p * x[0] + p.delta1 * p.f1 * x[2] + home * x[4]))
            / (1.0 + (p.omega * p.m + p.mu) * psi);
        x[4] = (x0[4] + psi * (p.delta1 * (1.0 - p.f1) * x[2] + icu_back * x[5]))
            / (1.0 + (home + p.delta2 * p.f2 + p.alpha1 * p.f3 + p.mu) * psi);
        x[5] = (x0[5] + p.delta2 * p.f2 * psi * x[4])
            / (1.0 + (icu_back + p.alpha2 * p.kappa + p.mu) * psi);
        if x == prev {
            break;
        }
    }
    x
}

pub fn sup_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Largest gap between two trajectories sampled at matching indices, each
/// compartment scaled by its peak in `reference`.
pub fn peak_scaled_gap(
    a: &saiqh::Trajectory<f64>,
    a_stride: usize,
    reference: &saiqh::Trajectory<f64>,
    ref_stride: usize,
    samples: usize,
) -> f64 {
    let mut peaks = [0.0f64; 6];
    for s in &reference.states {
        for (pk, v) in peaks.iter_mut().zip(s.compartments()) {
            *pk = pk.max(v.abs());
        }
    }
    let mut worst = 0.0f64;
    for k in 0..=samples {
        let x = a.states[k * a_stride].compartments();
        let y = reference.states[k * ref_stride].compartments();
        for j in 0..6 {
            if peaks[j] > 0.0 {
                worst = worst.max((x[j] - y[j]).abs() / peaks[j]);
            }
        }
    }
    worst
}
