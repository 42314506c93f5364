use measure_lab::coexistence::Phase;
use measure_lab::drift::generator_value;
use measure_lab::{
    absorbing_diagnostic, coexistence_scan, invisibility_diagnostic, lyapunov_drift_check,
    occupation_measure, Axis, Binning, CoexistenceConfig, DriftOptions, GeneratorEstimate,
    InvisibilitySource, Lyapunov, LyapunovFunction, SampleBox,
};
use process_sim::quasi_feller::{transition_density, DENSITY_BOUND};
use process_sim::{simulate, Drift, Potential, ProcessSpec, SpinInit};

fn ou() -> ProcessSpec {
    ProcessSpec::EllipticDiffusion {
        drift: Drift::Linear { theta: 1.0 },
        sigma: vec![2f64.sqrt()],
        ellipticity: 1.0,
        step: 0.01,
        initial: vec![0.0],
    }
}

fn langevin() -> ProcessSpec {
    ProcessSpec::Langevin {
        potential: Potential::Quadratic { k: 1.0 },
        gamma: 1.0,
        sigma: 2f64.sqrt(),
        step: 0.01,
        initial_x: vec![0.0],
        initial_v: vec![0.0],
    }
}

fn demo() -> ProcessSpec {
    ProcessSpec::QuasiFellerDemo {
        discontinuity: 0.5,
        initial: 0.2,
    }
}

#[test]
fn ou_drift_report_passes() {
    let quad = LyapunovFunction::Quadratic;
    for x in [-3.0, 0.0, 0.5, 7.0] {
        let lv = generator_value(&ou(), &quad, &[x], &GeneratorEstimate::Analytic).unwrap();
        assert!((lv - (2.0 - 2.0 * x * x)).abs() < 1e-12);
    }
    let report = lyapunov_drift_check(&ou(), &quad, &SampleBox::cube(1, 10.0, 401), &DriftOptions::default())
        .unwrap();
    assert!(report.passing);
    assert!(report.c >= 0.9 && report.big_c <= 3.5, "{report:?}");
    assert_eq!(report.violations, 0);
}

#[test]
fn brownian_motion_fails() {
    let bm = ProcessSpec::EllipticDiffusion {
        drift: Drift::Zero,
        sigma: vec![2f64.sqrt()],
        ellipticity: 1.0,
        step: 0.01,
        initial: vec![0.0],
    };
    let report = lyapunov_drift_check(
        &bm,
        &LyapunovFunction::Quadratic,
        &SampleBox::cube(1, 10.0, 401),
        &DriftOptions::default(),
    )
    .unwrap();
    assert!(!report.passing && report.c <= 0.0);
}

#[test]
fn lyapunov_below_one_is_rejected() {
    let v = |x: &[f64]| x[0] * x[0];
    assert!(lyapunov_drift_check(&ou(), &v, &SampleBox::cube(1, 2.0, 11), &DriftOptions::default()).is_err());
}

#[test]
fn monte_carlo_generator_matches_hamiltonian_form() {
    // L H = γ(σ²d/(2γ) − |v|²) for H = U + |v|²/2.
    let h = LyapunovFunction::energy_for(&langevin(), 0.0).unwrap();
    for (k, z) in [[0.0, 0.0], [1.0, -1.5], [-2.0, 0.5], [0.3, 2.0]].iter().enumerate() {
        let exact = 1.0 - z[1] * z[1];
        let analytic = generator_value(&langevin(), &h, z, &GeneratorEstimate::Analytic).unwrap();
        assert!((analytic - exact).abs() < 1e-12);
        let mc = generator_value(
            &langevin(),
            &h,
            z,
            &GeneratorEstimate::MonteCarlo {
                h: 1e-3,
                replicas: 20_000,
                seed: k as u64,
            },
        )
        .unwrap();
        assert!((mc - exact).abs() < 0.1, "{z:?}: {mc} vs {exact}");
    }
}

#[test]
fn langevin_drift_needs_cross_term() {
    let sample = SampleBox::cube(2, 5.0, 41);
    let plain = LyapunovFunction::energy_for(&langevin(), 0.0).unwrap();
    let r = lyapunov_drift_check(&langevin(), &plain, &sample, &DriftOptions::default()).unwrap();
    assert!(!r.passing);
    let tilted = LyapunovFunction::energy_for(&langevin(), 0.5).unwrap();
    let r = lyapunov_drift_check(&langevin(), &tilted, &sample, &DriftOptions::default()).unwrap();
    assert!(r.passing && r.c > 0.3, "{r:?}");
    // here L V = 2 − V exactly, so the fitted constant is 2 − (1 − c)·min V
    assert!((r.big_c - (1.0 + r.c)).abs() < 1e-9, "{r:?}");
}

#[test]
fn mc_drift_check_agrees_with_analytic() {
    let opts = DriftOptions {
        generator: GeneratorEstimate::monte_carlo_default(3),
        outlier_budget: 0.05,
        ..DriftOptions::default()
    };
    let r = lyapunov_drift_check(&ou(), &LyapunovFunction::Quadratic, &SampleBox::cube(1, 10.0, 101), &opts)
        .unwrap();
    assert!(r.passing && r.c >= 0.9 && r.big_c <= 3.5, "{r:?}");
}

#[test]
fn closure_lyapunov_uses_finite_differences() {
    let v = |x: &[f64]| 1.0 + x[0] * x[0];
    let (g, h) = Lyapunov::derivatives(&v, &[3.0]);
    assert!((g[0] - 6.0).abs() < 1e-6 && (h[0] - 2.0).abs() < 1e-4);
}

#[test]
fn invisibility_examples() {
    let path = simulate(&demo(), 1e6, 21).unwrap();
    let paths = std::slice::from_ref(&path);
    let whole = invisibility_diagnostic(InvisibilitySource::Paths(paths), &[0.5], &[1.0], 1_000_000).unwrap();
    assert_eq!(whole.masses, vec![1.0]);

    let r = invisibility_diagnostic(InvisibilitySource::Paths(paths), &[0.5], &[0.1, 0.01], 1_000_000).unwrap();
    let ratio = r.masses[0] / r.masses[1];
    assert!((7.0..=13.0).contains(&ratio), "ratio {ratio}");
    for (m, d) in r.masses.iter().zip(&r.deltas) {
        assert!(*m < 2.0 * d * (DENSITY_BOUND + 0.2));
    }

    let outside = invisibility_diagnostic(InvisibilitySource::Paths(paths), &[2.0], &[0.5, 0.1], 1_000_000).unwrap();
    assert_eq!(outside.masses, vec![0.0, 0.0]);

    let spec = demo();
    let src = || InvisibilitySource::Spec { spec: &spec, seed: 1 };
    assert!(invisibility_diagnostic(src(), &[0.5], &[], 100).is_err());
    assert!(invisibility_diagnostic(src(), &[0.5], &[0.1, 0.2], 100).is_err());
}

#[test]
fn invisibility_masses_shrink_with_radius() {
    let r = invisibility_diagnostic(
        InvisibilitySource::Spec { spec: &demo(), seed: 5 },
        &[0.5],
        &[0.2, 0.1, 0.05, 0.02, 0.01, 0.005],
        200_000,
    )
    .unwrap();
    assert!(r.monotone_within(2.0), "{r:?}");
}

#[test]
fn time_averages_of_discontinuous_observable_converge() {
    // h = 1{x > 1/2} is discontinuous only on D_H; its time averages settle
    // and their spread across seeds shrinks like T^{-1/2}.
    let spread = |n: f64| {
        let avgs: Vec<f64> = (0..24)
            .map(|seed| {
                let p = simulate(&demo(), n, 100 + seed).unwrap();
                (0..p.len()).filter(|&i| p.point(i).unwrap()[0] > 0.5).count() as f64 / p.len() as f64
            })
            .collect();
        let mean = avgs.iter().sum::<f64>() / avgs.len() as f64;
        let sd = (avgs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (avgs.len() - 1) as f64).sqrt();
        (mean, sd)
    };
    let (m1, s1) = spread(1e4);
    let (m2, s2) = spread(4e4);
    assert!((m1 - m2).abs() < 3.0 * s1);
    let ratio = s1 / s2;
    assert!((1.3..=3.1).contains(&ratio), "sd ratio {ratio}");
}

#[test]
fn demo_time_average_is_nearly_invariant() {
    // Π K against Π on 20 bins, with K(x, B) integrated from the transition density.
    let path = simulate(&demo(), 1e6, 9).unwrap();
    let bins = Binning::grid(vec![Axis::new(0, 0.0, 1.0, 20).unwrap()]).unwrap();
    let pi = occupation_measure(&path, &bins).unwrap();
    let mut pushed = vec![0.0; 20];
    let sample: Vec<f64> = (0..path.len()).step_by(100).map(|i| path.point(i).unwrap()[0]).collect();
    for &x in &sample {
        for (b, acc) in pushed.iter_mut().enumerate() {
            let (lo, m) = (b as f64 / 20.0, 40);
            let h = 0.05 / m as f64;
            let mut s = transition_density(0.5, x, lo) + transition_density(0.5, x, lo + 0.05);
            for k in 1..m {
                s += transition_density(0.5, x, lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            *acc += s * h / 3.0 / sample.len() as f64;
        }
    }
    let tv: f64 = 0.5 * pi.weights.iter().zip(&pushed).map(|(a, b)| (a - b).abs()).sum::<f64>();
    assert!(tv < 0.02, "TV {tv}");
}

#[test]
fn coexistence_at_infinite_temperature() {
    let cfg = CoexistenceConfig {
        side: 8,
        betas: vec![0.0],
        horizon: 400.0,
        m_star: 0.5,
        seeds: vec![1, 2],
    };
    let rows = coexistence_scan(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(!r.separated);
        assert!(r.m_plus.abs() < 0.05 && r.m_minus.abs() < 0.05, "{r:?}");
    }
    assert_eq!(rows, coexistence_scan(&cfg).unwrap());
    assert!(coexistence_scan(&CoexistenceConfig { m_star: 1.0, ..cfg.clone() }).is_err());
    assert!(coexistence_scan(&CoexistenceConfig { horizon: 1.0, ..cfg.clone() }).is_err());
    assert!(coexistence_scan(&CoexistenceConfig { betas: vec![-1.0], ..cfg }).is_err());
}

#[test]
fn coexistence_across_the_transition() {
    let cfg = CoexistenceConfig {
        side: 16,
        betas: vec![0.2, 1.0],
        horizon: 1e4,
        m_star: 0.5,
        seeds: vec![7],
    };
    let rows = coexistence_scan(&cfg).unwrap();
    assert!(!rows[0].separated && rows[0].tv_distance < 0.05, "{:?}", rows[0]);
    assert!(rows[1].separated && rows[1].m_plus > 0.9 && rows[1].m_minus < -0.9, "{:?}", rows[1]);
    assert!(rows[1].tv_distance > 0.99);
}

#[test]
fn absorbing_diagnostic_examples() {
    let glauber = |beta| ProcessSpec::GlauberIsing {
        side: 16,
        beta,
        initial: SpinInit::Random,
    };
    let hot = absorbing_diagnostic(&glauber(0.0), 1.0, 0.005, 1000, &[1, 2]).unwrap();
    assert!((hot.escape_frequency - 0.5).abs() < 0.05, "{}", hot.escape_frequency);
    assert_eq!(hot.escaped_runs, 1.0);
    assert_eq!(hot.rows[1].start, Phase::Minus);

    let cold = absorbing_diagnostic(&glauber(1.0), 1.0, 0.5, 1000, &[1]).unwrap();
    assert_eq!(cold.escape_frequency, 0.0);
    assert!(cold.rows.iter().all(|r| r.first_exit.is_none()));

    assert!(absorbing_diagnostic(&glauber(1.0), 1.0, 1.0, 10, &[1]).is_err());
    assert!(absorbing_diagnostic(&demo(), 1.0, 0.5, 10, &[1]).is_err());
}
