//! Monte Carlo checks against independently known answers: symmetry of
//! neutral absorption, exact martingale means, Poisson mutation counts,
//! single-individual click probabilities, and an independent integration
//! of the noise-free flow.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use ratchet_core::diffusion::{moment_drift_check, simulate_path, IntegratorConfig};
use ratchet_core::discrete::{simulate_until_click, step_generation, DiscretePopulation};
use ratchet_core::dynamics::{deterministic_flow, moment_velocity, poisson_profile};
use ratchet_core::qsd::sample_qprocess;
use ratchet_core::stream::{SeedSpace, SequentialRunner};
use ratchet_core::{DiscreteParams, Params, Profile};

#[test]
fn neutral_two_class_absorption_is_symmetric() {
    // without selection or mutation the fittest-class frequency is a
    // martingale started at 1/2, so among absorbed paths clicks and
    // fixations are equally likely
    let p = Params::degenerate(0.0, 0.0, 1).unwrap();
    let x0 = Profile::new(vec![0.5, 0.5]).unwrap();
    let cfg = IntegratorConfig::new(2e-3, 6.0, 100).unwrap();
    let space = SeedSpace::new(101, 0);
    let n = 10_000;
    let mut clicked = 0u32;
    let mut interior = 0u32;
    for i in 0..n {
        let path = simulate_path(&x0, &p, &cfg, &mut space.rng(i, 0)).unwrap();
        if path.click.clicked() {
            clicked += 1;
        } else {
            let x0_final = path.last().get(0);
            if x0_final > 0.0 && x0_final < 1.0 {
                interior += 1;
            }
        }
    }
    let n = n as f64;
    let absorbed = n - interior as f64;
    assert!(
        interior as f64 / n < 0.05,
        "absorption incomplete: {interior} interior paths"
    );
    let frac = clicked as f64 / absorbed;
    let sigma = 0.5 / absorbed.sqrt();
    assert!(
        (frac - 0.5).abs() < 4.0 * sigma,
        "clicked fraction {frac} vs 1/2 (sigma {sigma:.4})"
    );
}

#[test]
fn neutral_mean_profile_follows_the_closed_form() {
    // with selection off the drift is linear, so the mean state solves the
    // mutation-flow ODE exactly; from an interior start over a short horizon
    // no coordinate comes near zero and clipping never fires.  with
    // x = (0.5, 0.3, 0.2) on three classes the solution is
    //   x0(t) = 0.5 e^{-lt},  x1(t) = (0.3 + 0.5 lt) e^{-lt}
    // and the rest of the mass sits in the saturated top class.
    let lambda = 0.5;
    let t = 0.02;
    let p = Params::degenerate(0.0, lambda, 2).unwrap();
    let x0 = Profile::new(vec![0.5, 0.3, 0.2]).unwrap();
    let cfg = IntegratorConfig::new(1e-4, t, 200).unwrap();
    let space = SeedSpace::new(102, 0);
    let n = 30_000;
    let (mut sum0, mut sum_m1, mut sumsq_m1) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let path = simulate_path(&x0, &p, &cfg, &mut space.rng(i, 0)).unwrap();
        let end = path.last();
        let m1 = end.moment(1);
        sum0 += end.get(0);
        sum_m1 += m1;
        sumsq_m1 += m1 * m1;
    }
    let nf = n as f64;
    let mean0 = sum0 / nf;
    let mean_m1 = sum_m1 / nf;
    let se_m1 = ((sumsq_m1 / nf - mean_m1 * mean_m1) / (nf - 1.0)).sqrt();

    let decay = (-lambda * t).exp();
    let exact0 = 0.5 * decay;
    let exact1 = (0.3 + 0.5 * lambda * t) * decay;
    let exact_m1 = 2.0 - decay * (1.3 + 0.5 * lambda * t);
    assert!((exact_m1 - (exact1 + 2.0 * (1.0 - exact0 - exact1))).abs() < 1e-12);

    assert!(
        (mean_m1 - exact_m1).abs() < 4.0 * se_m1,
        "mean load {mean_m1} vs {exact_m1} (se {se_m1:.6})"
    );
    // x0 noise is smaller than load noise, reuse its scale as a loose cap
    assert!(
        (mean0 - exact0).abs() < 4.0 * se_m1,
        "mean x0 {mean0} vs {exact0}"
    );
}

#[test]
fn one_step_moment_dynamics_match_their_densities() {
    let p = Params::new(1.3, 0.8, 3).unwrap();
    let states = [
        Profile::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap(),
        Profile::new(vec![0.7, 0.1, 0.1, 0.1]).unwrap(),
        Profile::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
    ];
    let space = SeedSpace::new(103, 0);
    for (s, x) in states.iter().enumerate() {
        for k in 1..=2u32 {
            let mut rng = space.rng(s as u64, k as u64);
            let report = moment_drift_check(x, &p, k, 20_000, 1e-3, &mut rng);
            assert!(
                report.max_sigma() < 5.0,
                "state {s}, k={k}: {:.2} sigma (drift {} vs {})",
                report.max_sigma(),
                report.empirical_drift,
                report.analytic_drift
            );
            assert!((report.analytic_drift - moment_velocity(x, &p, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn child_mutation_counts_are_poisson() {
    // one neutral generation from a mutation-free population realizes the
    // per-child Poisson mutation law exactly
    let lambda = 1.3;
    let n = 100_000u64;
    let p = DiscreteParams::degenerate(0.0, lambda, n, None).unwrap();
    let pop = DiscretePopulation::homogeneous(n, 0);
    let mut rng = SeedSpace::new(104, 0).rng(0, 0);
    let next = step_generation(&pop, &p, &mut rng);

    let law = Poisson::new(lambda).unwrap();
    let cut = 9usize; // classes 0..9 individually, the rest pooled
    let mut chi2 = 0.0;
    let mut tail_expected = n as f64;
    let mut tail_observed = n as f64;
    for j in 0..cut {
        let expected = n as f64 * law.pmf(j as u64);
        let observed = next.counts().get(j).copied().unwrap_or(0) as f64;
        chi2 += (observed - expected).powi(2) / expected;
        tail_expected -= expected;
        tail_observed -= observed;
    }
    chi2 += (tail_observed - tail_expected).powi(2) / tail_expected;
    let critical = ChiSquared::new(cut as f64).unwrap().inverse_cdf(0.999);
    assert!(chi2 < critical, "chi2 {chi2:.1} exceeds {critical:.1}");
}

#[test]
fn single_individual_clicks_with_the_mutation_probability() {
    // n = 1: the sole parent's child clicks iff it gains a mutation
    let lambda = 0.7f64;
    let p = DiscreteParams::degenerate(0.0, lambda, 1, None).unwrap();
    let pop = DiscretePopulation::homogeneous(1, 0);
    let space = SeedSpace::new(105, 0);
    let n = 4000;
    let clicked = (0..n)
        .filter(|&i| {
            let path = simulate_until_click(&pop, &p, 1, &mut space.rng(i, 0)).unwrap();
            path.click.clicked()
        })
        .count();
    let expect = 1.0 - (-lambda).exp();
    let frac = clicked as f64 / n as f64;
    let sigma = (expect * (1.0 - expect) / n as f64).sqrt();
    assert!(
        (frac - expect).abs() < 4.0 * sigma,
        "click fraction {frac} vs {expect} (sigma {sigma:.4})"
    );
}

#[test]
fn clicks_come_sooner_under_heavier_mutation() {
    let d = 5;
    let t = 2.0;
    let cfg = IntegratorConfig::new(1e-3, t, 2000).unwrap();
    let space = SeedSpace::new(106, 0);
    let frac_clicked = |lambda: f64, sub: u64| -> f64 {
        let p = Params::new(1.0, lambda, d).unwrap();
        let x0 = poisson_profile(&p);
        let n = 2000;
        let clicked = (0..n)
            .filter(|&i| {
                simulate_path(&x0, &p, &cfg, &mut space.derive(sub).rng(i, 0))
                    .unwrap()
                    .click
                    .clicked()
            })
            .count();
        clicked as f64 / n as f64
    };
    let light = frac_clicked(0.5, 0);
    let heavy = frac_clicked(2.0, 1);
    // separation far beyond binomial noise at 2000 paths
    assert!(
        heavy > light + 0.1,
        "click fractions: lambda=0.5 gives {light}, lambda=2 gives {heavy}"
    );
}

#[test]
fn noise_free_flow_matches_an_independent_integration() {
    let p = Params::new(1.0, 1.0, 2).unwrap();
    let x0 = Profile::delta(0, 2);
    let t = 1.0;
    let flow = deterministic_flow(&x0, &p, t, 1e-3).unwrap();

    // plain Euler at a much finer step, with the drift written out from
    // scratch rather than calling the library's field
    let mut y = vec![1.0, 0.0, 0.0];
    let h = 1e-6;
    let steps = (t / h).round() as usize;
    let (alpha, lambda) = (1.0, 1.0);
    for _ in 0..steps {
        let m1 = y[1] + 2.0 * y[2];
        let dy = [
            alpha * m1 * y[0] - lambda * y[0],
            alpha * (m1 - 1.0) * y[1] + lambda * (y[0] - y[1]),
            alpha * (m1 - 2.0) * y[2] + lambda * y[1],
        ];
        for (v, d) in y.iter_mut().zip(&dy) {
            *v += h * d;
        }
    }
    let end = flow.last();
    for i in 0..=2 {
        assert!(
            (end.get(i) - y[i]).abs() < 1e-6,
            "coordinate {i}: {} vs {}",
            end.get(i),
            y[i]
        );
    }
}

#[test]
fn qprocess_acceptance_agrees_with_direct_survival() {
    let p = Params::new(1.0, 3.0, 3).unwrap();
    let x0 = Profile::delta(0, 3);
    let t = 0.3;
    let cfg = IntegratorConfig::new(1e-3, t, 50).unwrap();
    let n = 3000;
    let sample = sample_qprocess(
        &x0,
        &p,
        t,
        0.0,
        &cfg,
        n,
        SeedSpace::new(107, 0),
        &SequentialRunner,
    )
    .unwrap();
    // the same survival probability, measured by independent paths
    let space = SeedSpace::new(108, 0);
    let survived = (0..n as u64)
        .filter(|&i| {
            !simulate_path(&x0, &p, &cfg, &mut space.rng(i, 0)).unwrap().click.clicked()
        })
        .count();
    let direct = survived as f64 / n as f64;
    let sigma = (direct * (1.0 - direct) / n as f64).sqrt();
    assert!(
        (sample.acceptance - direct).abs() < 5.0 * sigma * 2.0f64.sqrt(),
        "acceptance {} vs survival {direct} (sigma {sigma:.4})",
        sample.acceptance
    );
    for path in &sample.paths {
        assert!(path.times.iter().all(|&s| s <= t + 1e-12));
        assert!(!path.click.clicked());
    }
}

#[test]
fn replicate_streams_reproduce_and_separate() {
    let p = Params::new(1.0, 1.5, 4).unwrap();
    let x0 = poisson_profile(&p);
    let cfg = IntegratorConfig::new(1e-3, 0.5, 100).unwrap();
    let space = SeedSpace::new(109, 0);
    let a = simulate_path(&x0, &p, &cfg, &mut space.rng(7, 0)).unwrap();
    let b = simulate_path(&x0, &p, &cfg, &mut space.rng(7, 0)).unwrap();
    assert_eq!(a.times, b.times);
    assert_eq!(
        a.states.last().unwrap().freqs(),
        b.states.last().unwrap().freqs()
    );
    let c = simulate_path(&x0, &p, &cfg, &mut space.rng(8, 0)).unwrap();
    assert_ne!(
        a.states.last().unwrap().freqs(),
        c.states.last().unwrap().freqs()
    );
}
