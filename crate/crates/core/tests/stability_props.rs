mod common;

use common::{gauss_seidel_step, ngm_spectral_radius, random_init, random_params_with_r0};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saiqh::data_io::Scenario;
use saiqh::stability::classify_r0;
use saiqh::{
    classify, dfe, lyapunov, simulate, verify_descent, Classification, Parameters, State,
    StepConfig,
};

#[test]
fn descent_on_random_subthreshold_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut failing = Vec::new();
    for draw in 0..100 {
        let r0 = rng.gen_range(0.05..0.99);
        let p = random_params_with_r0(&mut rng, r0);
        let init = random_init(&mut rng, &p);
        for h in [0.5, 1.0, 5.0] {
            let traj = simulate(&p, &init, &StepConfig::new(h).unwrap(), 2000).unwrap();
            let report = verify_descent(&p, &traj).unwrap();
            assert_eq!(report.classification, Classification::DfeGloballyStable);
            if report.descent_violations > 0 {
                failing.push((draw, h, report.descent_violations));
            }
        }
    }
    assert!(failing.is_empty(), "(draw, h, violations): {failing:?}");
}

#[test]
fn lyapunov_nonnegative_and_zero_at_dfe() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..500 {
        let r0 = rng.gen_range(0.1..3.0);
        let p = random_params_with_r0(&mut rng, r0);
        let s = random_init(&mut rng, &p);
        if let Some(l) = lyapunov(&p, &s, 1.0).unwrap() {
            assert!(l >= 0.0);
        }
        let e0 = dfe(&p).unwrap().state;
        assert_eq!(lyapunov(&p, &e0, 1.0).unwrap(), Some(0.0));
    }
}

#[test]
fn lyapunov_undefined_at_zero_susceptibles() {
    let p = Scenario::bundled().params;
    let s = State::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.0);
    assert_eq!(lyapunov(&p, &s, 1.0).unwrap(), None);
}

#[test]
fn classification_ignores_recruitment_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..500 {
        let r0 = rng.gen_range(0.2..2.0);
        let p = random_params_with_r0(&mut rng, r0);
        let c = rng.gen_range(1e-3..1e3);
        let scaled = Parameters {
            recruitment: p.recruitment * c,
            ..p
        };
        assert_eq!(classify(&p).unwrap(), classify(&scaled).unwrap());
    }
}

#[test]
fn threshold_band() {
    assert_eq!(classify_r0(1.0), Classification::Threshold);
    assert_eq!(classify_r0(1.0 + 1e-13), Classification::Threshold);
    assert_eq!(classify_r0(1.0 + 1e-9), Classification::EndemicExists);
    assert_eq!(classify_r0(1.0 - 1e-9), Classification::DfeGloballyStable);
}

#[test]
fn descent_survives_initial_scaling() {
    let sc = Scenario::bundled();
    for c in [1e-3, 0.1, 1.0] {
        let init = State::from_compartments(sc.init.compartments().map(|x| x * c), 0.0);
        let traj = simulate(&sc.params, &init, &StepConfig::new(1.0).unwrap(), 500).unwrap();
        let report = verify_descent(&sc.params, &traj).unwrap();
        assert_eq!(report.descent_violations, 0, "scale {c}");
    }
}

#[test]
fn portugal_run_descends() {
    let sc = Scenario::bundled();
    let traj = sc.run().unwrap();
    let report = verify_descent(&sc.params, &traj).unwrap();
    assert!(report.r0 < 1.0);
    assert_eq!(report.first_defined(), Some(1));
    assert_eq!(report.descent_violations, 0);
    assert!(report.verified);
    let last = *report.lyapunov_series.last().unwrap();
    assert!(last.unwrap() < report.lyapunov_series[1].unwrap());
}

#[test]
fn supercritical_run_approaches_endemic_point() {
    let sc = Scenario::bundled().with_override("beta", "3.86").unwrap();
    let traj = sc.run_with(sc.scheme, 1.0, 4000).unwrap();
    let report = verify_descent(&sc.params, &traj).unwrap();
    assert_eq!(report.classification, Classification::EndemicExists);
    assert!(!report.verified);
    let d = &report.distance_to_target;
    assert!(d[4000] < 0.02 * d[0], "final distance {}", d[4000]);
    assert!(report.settling_index() < 1000);
    assert!(d[1000..].windows(2).all(|w| w[1] <= w[0]));
}

/// Subthreshold draw on which L rises for hundreds of consecutive steps.
/// The increase is reproduced here without the library's step or L.
#[test]
fn subthreshold_increase_confirmed_by_oracle() {
    let p = Parameters {
        recruitment: 733.0928490275522,
        mu: 1.2131730890490054e-5,
        beta: 0.0211082849377647,
        l_a: 1.3995339234355,
        l_h: 0.3850952772212586,
        phi: 0.04893873352750155,
        nu: 0.3004904273616187,
        delta1: 0.1404204858837208,
        delta2: 0.024744435687406908,
        eta: 0.14866536501562788,
        omega: 0.17749057825276904,
        alpha1: 0.00983657129409023,
        alpha2: 0.3356333846187234,
        p: 0.09753111284260307,
        q: 0.7537190698131908,
        f1: 0.3575782235018772,
        f2: 0.8651416996948835,
        f3: 0.09861354398193292,
        kappa: 0.12464107858216189,
        m: 0.6279256188782352,
    };
    let init = State::new(
        13154426.14856547,
        0.0,
        0.0,
        20385790.75171916,
        18018775.340084802,
        754188.8827886719,
    );
    assert!(init.population() <= p.population_bound());
    assert!(ngm_spectral_radius(&p) < 0.9);

    let e0 = dfe(&p).unwrap().state;
    let g = |u: f64| u - u.ln() - 1.0;
    let psi = (p.mu).exp_m1() / p.mu;
    let l = |x: &[f64; 6]| {
        (e0.susceptible * g(x[0] / e0.susceptible)
            + x[1]
            + x[2]
            + e0.quarantined * g(x[3] / e0.quarantined)
            + x[4]
            + x[5])
            / psi
    };
    let mut x = init;
    let mut series = vec![l(&x.compartments())];
    for _ in 0..200 {
        let y = gauss_seidel_step(&p, &x, 1.0);
        series.push(l(&y));
        x = State::from_compartments(y, 0.0);
    }
    let rises = series.windows(2).filter(|w| w[1] > w[0] * (1.0 + 1e-10)).count();
    assert!(rises > 10, "{rises}");

    let traj = simulate(&p, &init, &StepConfig::new(1.0).unwrap(), 200).unwrap();
    let report = verify_descent(&p, &traj).unwrap();
    assert_eq!(report.descent_violations, rises);
    assert!(!report.verified);
}

#[test]
fn recorded_diagnostics_are_checked() {
    let sc = Scenario::bundled();
    let mut traj = sc.run_with(sc.scheme, 1.0, 10).unwrap();
    traj.diagnostics[5].force_of_infection *= 1.5;
    assert!(verify_descent(&sc.params, &traj).is_err());
}
