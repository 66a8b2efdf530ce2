//! Ten go/no-go checks for the toolkit, run in a fixed order with pinned
//! seeds and tolerances, one printed line per criterion. The test fails
//! at the end if any criterion failed and lists which ones.
//!
//! Run `cargo test --test acceptance -- --nocapture` to watch the lines
//! appear; the full pass takes roughly fifteen minutes on one core.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use ratchet_core::diagnostics::{
    click_ks_against_rate, correlation_decay, discrete_vs_diffusion_compare, moment_tightness_scan,
    pi_k_autonomy_test, relaxation_rate_fit, run_fv_study, FvSettings,
};
use ratchet_core::diffusion::{
    euler_step_with_noise, moment_drift_check, simulate_path, IntegratorConfig,
};
use ratchet_core::dynamics::{deterministic_flow, drift_full, poisson_profile, wf_covariance};
use ratchet_core::qsd::{
    click_times_from_starts, estimate_rho0, qsd_pushforward_check, ParticleEnsemble, SurvivalCurve,
};
use ratchet_core::stats::mean_and_stderr;
use ratchet_core::stream::{ReplicateRunner, SeedSpace};
use ratchet_core::{ClickTime, Params, Profile};
use ratchet_qsd::config::{Experiment, RunConfig};
use ratchet_qsd::runner::RayonRunner;
use serde_json::json;
use std::time::Instant;

#[derive(Default)]
struct Verdicts {
    failed: Vec<usize>,
}

impl Verdicts {
    fn record(&mut self, n: usize, pass: bool, detail: String, t0: Instant) {
        let secs = t0.elapsed().as_secs_f64();
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {verdict} [{secs:.0}s] {detail}");
        if !pass {
            self.failed.push(n);
        }
    }
}

#[test]
fn acceptance_criteria() {
    let runner = RayonRunner::new(
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    );
    let mut v = Verdicts::default();

    let t = Instant::now();
    let (pass, detail) = algebraic_invariants();
    v.record(1, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = deterministic_equilibrium();
    v.record(2, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = one_step_moments(&runner);
    v.record(3, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = step_size_consistency(&runner);
    v.record(4, pass, detail, t);

    let t = Instant::now();
    let (pass, detail, rho_fv, pool) = stationarity_self_consistency(&runner);
    v.record(5, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = dimension_robustness(&runner);
    v.record(6, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = aggregated_autonomy(&runner);
    v.record(7, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = discrete_diffusion_scaling(&runner);
    v.record(8, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = metastable_time_ordering(&runner, rho_fv, &pool);
    v.record(9, pass, detail, t);

    let t = Instant::now();
    let (pass, detail) = byte_reproducibility();
    v.record(10, pass, detail, t);

    assert!(
        v.failed.is_empty(),
        "criteria failed: {:?} (each line above carries its measured values)",
        v.failed
    );
}

/// 1. Drift and noise conserve total mass, one noisy step stays on the
/// simplex, the moment chain M1*Mk <= M(k+1) holds, and the replacement
/// covariance is positive semidefinite: 1e5 randomized states, 1e-12.
fn algebraic_invariants() -> (bool, String) {
    const STATES: usize = 100_000;
    let space = SeedSpace::new(100, 0);
    let mut rng = space.rng(0, 0);

    let mut max_drift_sum = 0.0f64;
    let mut max_row_sum = 0.0f64;
    let mut max_mass_err = 0.0f64;
    let mut min_entry = f64::INFINITY;
    let mut min_quad = f64::INFINITY;
    let mut min_eig = f64::INFINITY;
    let mut chain_ok = true;

    for s in 0..STATES {
        let d = s % 40 + 1;
        let p = Params::new(1.3, 0.8, d).unwrap();
        let n = d + 1;

        let mut freqs = vec![0.0; n];
        let mut total = 0.0;
        for e in freqs.iter_mut() {
            let u: f64 = rng.gen_range(1e-12..1.0);
            *e = -u.ln();
            total += *e;
        }
        for e in freqs.iter_mut() {
            *e /= total;
        }
        let x = Profile::new(freqs).unwrap();

        let drift = drift_full(&x, &p);
        max_drift_sum = max_drift_sum.max(drift.iter().sum::<f64>().abs());

        let c = wf_covariance(&x);
        for i in 0..n {
            let row: f64 = (0..n).map(|j| c.get(i, j)).sum();
            max_row_sum = max_row_sum.max(row.abs());
        }

        let mut dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        for e in dir.iter_mut() {
            *e /= norm;
        }
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += dir[i] * c.get(i, j) * dir[j];
            }
        }
        min_quad = min_quad.min(quad);

        if s % 500 == 0 {
            let m = DMatrix::from_row_slice(n, n, c.as_slice());
            let eig = m.symmetric_eigen();
            min_eig = min_eig.min(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min));
        }

        let xi: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let (y, _) = euler_step_with_noise(&x, &p, 1e-3, &xi);
        let mass: f64 = y.freqs().iter().sum();
        max_mass_err = max_mass_err.max((mass - 1.0).abs());
        min_entry = min_entry.min(y.freqs().iter().cloned().fold(f64::INFINITY, f64::min));

        let m1 = x.moment(1);
        for k in 1..=3u32 {
            let mk = x.moment(k);
            let mk1 = x.moment(k + 1);
            chain_ok &= m1 * mk <= mk1 + 1e-12 * mk1.max(1.0);
        }
    }

    let pass = max_drift_sum <= 1e-12
        && max_row_sum <= 1e-12
        && max_mass_err <= 1e-12
        && min_entry >= 0.0
        && chain_ok
        && min_quad >= -1e-12
        && min_eig >= -1e-12;
    let detail = format!(
        "drift sum {max_drift_sum:.1e}, cov row sum {max_row_sum:.1e}, step mass err \
         {max_mass_err:.1e}, min entry {min_entry:.1e}, min quad form {min_quad:.1e}, \
         min eigenvalue {min_eig:.1e}, moment chain {}",
        if chain_ok { "holds" } else { "violated" }
    );
    (pass, detail)
}

/// 2. The noise-free flow from a generic interior state reaches the
/// saturated Poisson profile (sup norm 1e-5 by t = 200) and the drift
/// residual there is below 1e-6.
fn deterministic_equilibrium() -> (bool, String) {
    let p = Params::new(1.0, 2.0, 40).unwrap();
    let x0 = Profile::new(vec![1.0 / 41.0; 41]).unwrap();
    let flow = deterministic_flow(&x0, &p, 200.0, 5e-3).unwrap();
    let target = poisson_profile(&p);

    let sup = flow
        .last()
        .freqs()
        .iter()
        .zip(target.freqs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let residual =
        drift_full(&target, &p).iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    let pass = sup < 1e-5 && residual < 1e-6;
    (pass, format!("sup distance {sup:.2e} (<1e-5), drift residual {residual:.2e} (<1e-6)"))
}

/// 3. One-step increments at three interior states match drift*dt and
/// covariance*dt within 5 sigma over 1e5 replicates, and the moment-level
/// drift/quadratic-variation check agrees for k = 1, 2.
fn one_step_moments(runner: &RayonRunner) -> (bool, String) {
    const N: usize = 100_000;
    const DT: f64 = 1e-3;
    let p = Params::new(1.0, 1.0, 3).unwrap();
    let space = SeedSpace::new(300, 0);
    let states = [
        Profile::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap(),
        Profile::new(vec![0.7, 0.1, 0.1, 0.1]).unwrap(),
        Profile::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
    ];

    let mut max_mean_sigma = 0.0f64;
    let mut max_cov_sigma = 0.0f64;
    let mut max_report_sigma = 0.0f64;
    for (si, x) in states.iter().enumerate() {
        let incs = runner.run(N, |i| {
            let mut rng = space.rng(i as u64, si as u64);
            let xi: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
            let (y, _) = euler_step_with_noise(x, &p, DT, &xi);
            [
                y.get(0) - x.get(0),
                y.get(1) - x.get(1),
                y.get(2) - x.get(2),
                y.get(3) - x.get(3),
            ]
        });
        let mut sum = [0.0f64; 4];
        let mut cross = [[0.0f64; 4]; 4];
        for inc in &incs {
            for i in 0..4 {
                sum[i] += inc[i];
                for j in 0..4 {
                    cross[i][j] += inc[i] * inc[j];
                }
            }
        }
        let nf = N as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
        let drift = drift_full(x, &p);
        let c = wf_covariance(x);
        for i in 0..4 {
            let var = (cross[i][i] - nf * mean[i] * mean[i]) / (nf - 1.0);
            let se = (var / nf).sqrt();
            max_mean_sigma = max_mean_sigma.max((mean[i] - drift[i] * DT).abs() / se);
            for j in 0..4 {
                let cov = (cross[i][j] - nf * mean[i] * mean[j]) / (nf - 1.0);
                let se_c =
                    ((c.get(i, i) * c.get(j, j) + c.get(i, j).powi(2)) / (nf - 1.0)).sqrt() * DT;
                max_cov_sigma = max_cov_sigma.max((cov - c.get(i, j) * DT).abs() / se_c);
            }
        }
        for k in 1..=2u32 {
            let mut rng = space.rng(si as u64, 10 + k as u64);
            let report = moment_drift_check(x, &p, k, N, DT, &mut rng);
            max_report_sigma = max_report_sigma.max(report.max_sigma());
        }
    }
    let pass = max_mean_sigma < 5.0 && max_cov_sigma < 5.0 && max_report_sigma < 5.0;
    let detail = format!(
        "max deviation: increment mean {max_mean_sigma:.2} sigma, increment covariance \
         {max_cov_sigma:.2} sigma, moment drift/qv {max_report_sigma:.2} sigma (all <5)"
    );
    (pass, detail)
}

/// 4. Halving dt must not move the survivor-conditioned mean load at t = 1
/// by more than the combined Monte Carlo error. The integrator's clip step
/// leaves a dt-independent boundary bias, so this is expected to fail; the
/// printed shift quantifies it.
fn step_size_consistency(runner: &RayonRunner) -> (bool, String) {
    const N: usize = 10_000;
    let p = Params::new(1.0, 1.0, 15).unwrap();
    let x0 = Profile::delta(0, 15);
    let space = SeedSpace::new(400, 0);

    let arm = |dt: f64, unit: u64| -> (f64, f64, usize) {
        let steps = (1.0 / dt).round() as usize;
        let cfg = IntegratorConfig::new(dt, 1.0, steps).unwrap();
        let finals = runner.run(N, |i| {
            let mut rng = space.rng(i as u64, unit);
            let path = simulate_path(&x0, &p, &cfg, &mut rng).unwrap();
            match path.click {
                ClickTime::Censored(_) => Some(path.last().moment(1)),
                ClickTime::Clicked(_) => None,
            }
        });
        let vals: Vec<f64> = finals.into_iter().flatten().collect();
        let (mean, se) = mean_and_stderr(&vals);
        (mean, se, vals.len())
    };

    let (mean_a, se_a, n_a) = arm(1e-3, 0);
    let (mean_b, se_b, n_b) = arm(5e-4, 1);
    let shift = (mean_a - mean_b).abs();
    let allowance = (se_a * se_a + se_b * se_b).sqrt();
    let pass = shift < allowance;
    let detail = format!(
        "mean load at t=1: {mean_a:.4} (dt 1e-3, {n_a} survivors) vs {mean_b:.4} \
         (dt 5e-4, {n_b}); shift {shift:.4} vs allowance {allowance:.4}"
    );
    (pass, detail)
}

/// 5. The particle approximation of the conditioned law is self-consistent:
/// its one-unit pushforward stays put in binned TV, the extinction rate
/// from the survival slope matches the restart rate, and click times from
/// it look exponential with that rate.
fn stationarity_self_consistency(
    runner: &RayonRunner,
) -> (bool, String, (f64, f64), Vec<Profile>) {
    let p = Params::new(1.0, 1.0, 15).unwrap();
    let init = poisson_profile(&p);
    let settings = FvSettings {
        particles: 1000,
        dt: 1e-3,
        horizon: 30.0,
        burn_in: 10.0,
        record_stride: 1000,
        runs: 2,
    };
    let study = run_fv_study(&p, &init, &settings, SeedSpace::new(900, 0), runner).unwrap();
    let pool = study.pooled_particles();

    let ensemble = ParticleEnsemble::uniform(pool.clone(), settings.horizon).unwrap();
    let push_cfg = IntegratorConfig::new(1e-3, 1.0, 1000).unwrap();
    let push = qsd_pushforward_check(
        &ensemble,
        &p,
        1.0,
        &push_cfg,
        20,
        200,
        SeedSpace::new(901, 0),
        runner,
    )
    .unwrap();

    let horizon = 9.4;
    let click_cfg = IntegratorConfig::new(1e-3, horizon, 5000).unwrap();
    let clicks =
        click_times_from_starts(&pool, &p, &click_cfg, 1000, SeedSpace::new(902, 0), runner);
    let grid: Vec<f64> = (1..=30).map(|j| horizon * j as f64 / 30.0).collect();
    let curve = SurvivalCurve::from_click_times(&clicks, &grid);
    let mut boot_rng = SeedSpace::new(903, 0).rng(0, 0);
    let slope = estimate_rho0(&curve, (0.0, 0.75 * horizon), &mut boot_rng).unwrap();
    let (ks_d, ks_p) = click_ks_against_rate(&clicks, study.rho0.value).unwrap();

    let tv_ok = push.tv.corrected < 0.05;
    let rate_ok = slope.agrees_with(&study.rho0, 2.0);
    let ks_ok = ks_p > 0.01;
    let pass = tv_ok && rate_ok && ks_ok;
    let detail = format!(
        "pushforward TV {:.4} (<0.05); rate {:.4}+-{:.4} (slope) vs {:.4}+-{:.4} (restarts); \
         click KS D {ks_d:.3} p {ks_p:.3} (>0.01)",
        push.tv.corrected, slope.value, slope.stderr, study.rho0.value, study.rho0.stderr
    );
    (pass, detail, (study.rho0.value, study.rho0.stderr), pool)
}

/// 6. Extinction rate and the 95% quantile of the third moment under the
/// estimated conditioned law should agree between d = 15 and d = 30. The
/// rate does; the quantile inherits the clip boundary artifact, which
/// grows like d^3 in the third moment, so this is expected to fail.
fn dimension_robustness(runner: &RayonRunner) -> (bool, String) {
    let p = Params::new(1.0, 1.0, 15).unwrap();
    let settings = FvSettings {
        particles: 1000,
        dt: 1e-3,
        horizon: 25.0,
        burn_in: 10.0,
        record_stride: 1000,
        runs: 3,
    };
    let rows =
        moment_tightness_scan(&p, &[15, 30], 3, 0.95, &settings, SeedSpace::new(910, 0), runner)
            .unwrap();

    let rate_ok = rows[0].rho0.agrees_with(&rows[1].rho0, 2.0);
    let quant_ok = rows[0].quantile.agrees_with(&rows[1].quantile, 2.0);
    let pass = rate_ok && quant_ok;
    let detail = format!(
        "rho0 {:.4}+-{:.4} (d=15) vs {:.4}+-{:.4} (d=30): {}; q95(M3) {:.1}+-{:.1} vs \
         {:.1}+-{:.1}: {}",
        rows[0].rho0.value,
        rows[0].rho0.stderr,
        rows[1].rho0.value,
        rows[1].rho0.stderr,
        if rate_ok { "agree" } else { "disagree" },
        rows[0].quantile.value,
        rows[0].quantile.stderr,
        rows[1].quantile.value,
        rows[1].quantile.stderr,
        if quant_ok { "agree" } else { "disagree" }
    );
    (pass, detail)
}

/// 7. Under the aggregated drift the first k block coordinates evolve
/// autonomously: two starts sharing the block but differing beyond it must
/// give the same block law (no rejection at corrected level 0.01), and the
/// same test on identical starts must reject at close to its nominal rate.
fn aggregated_autonomy(runner: &RayonRunner) -> (bool, String) {
    let p = Params::new(1.0, 1.0, 12).unwrap();
    let k = 3usize;
    let space = SeedSpace::new(700, 0);

    let h0 = (-1.0f64).exp();
    let h = [h0, h0, h0 / 2.0];
    let tail = 1.0 - h[0] - h[1] - h[2];
    let mut near = vec![0.0; 13];
    near[..3].copy_from_slice(&h);
    near[3] = tail;
    let mut far = vec![0.0; 13];
    far[..3].copy_from_slice(&h);
    far[12] = tail;
    let x_a = Profile::new(near).unwrap();
    let x_b = Profile::new(far).unwrap();

    let report =
        pi_k_autonomy_test(&x_a, &x_b, &p, k, 1.0, 1e-3, 10_000, true, space.derive(1), runner)
            .unwrap();
    let main_ok = report.corrected_min_p > 0.01;

    let mut rejections = 0usize;
    const NULL_REPS: usize = 200;
    for r in 0..NULL_REPS {
        let null = pi_k_autonomy_test(
            &x_a,
            &x_a,
            &p,
            k,
            0.5,
            1e-3,
            400,
            true,
            space.derive(1000 + r as u64),
            runner,
        )
        .unwrap();
        if null.corrected_min_p <= 0.01 {
            rejections += 1;
        }
    }
    let null_ok = rejections <= NULL_REPS * 3 / 100;
    let pass = main_ok && null_ok;
    let detail = format!(
        "corrected min p {:.3} (>0.01); null calibration {rejections}/{NULL_REPS} rejections \
         (<=6)",
        report.corrected_min_p
    );
    (pass, detail)
}

/// 8. A discrete population of N = 1000 on sped-up time matches the
/// diffusion's mean load at t = 1 within 10%, and the gap does not grow
/// when N doubles.
fn discrete_diffusion_scaling(runner: &RayonRunner) -> (bool, String) {
    const REPS: usize = 1500;
    let p = Params::new(1.0, 3.0, 6).unwrap();
    let x0 = Profile::delta(0, 6);
    let space = SeedSpace::new(54, 0);

    let r1 =
        discrete_vs_diffusion_compare(&p, 1000, &x0, 1.0, 1e-3, REPS, space.derive(1), runner)
            .unwrap();
    let r2 =
        discrete_vs_diffusion_compare(&p, 2000, &x0, 1.0, 1e-3, REPS, space.derive(2), runner)
            .unwrap();

    let se_gap = |r: &ratchet_core::diagnostics::CompareReport| {
        (r.discrete.se_m1.powi(2) + r.diffusion.se_m1.powi(2)).sqrt() / r.diffusion.mean_m1.abs()
    };
    let combined = (se_gap(&r1).powi(2) + se_gap(&r2).powi(2)).sqrt();
    let small_ok = r1.rel_gap_m1 < 0.10;
    let mono_ok = r2.rel_gap_m1 <= r1.rel_gap_m1 + combined;
    let pass = small_ok && mono_ok;
    let detail = format!(
        "relative mean-load gap {:.3} at N=1000 (<0.10), {:.3} at N=2000 \
         (non-increasing within stderr {combined:.3})",
        r1.rel_gap_m1, r2.rel_gap_m1
    );
    (pass, detail)
}

/// 9. The conditioned dynamics forgets its start much faster than it
/// clicks: 1/gamma below 1/rho0 with a 2 sigma margin, and the start
/// correlation of the fittest-adjacent class decays below 0.1 before half
/// the mean inter-click time.
fn metastable_time_ordering(
    runner: &RayonRunner,
    rho_fv: (f64, f64),
    pool: &[Profile],
) -> (bool, String) {
    let p = Params::new(1.0, 1.0, 15).unwrap();
    let init = poisson_profile(&p);
    let grid: Vec<f64> = (1..=10).map(|j| j as f64 * 0.3).collect();
    let fit = relaxation_rate_fit(
        &Profile::delta(0, 15),
        &init,
        &p,
        &grid,
        1e-3,
        3000,
        20,
        150,
        SeedSpace::new(905, 0),
        runner,
    )
    .unwrap();

    let (rho, rho_se) = rho_fv;
    let t_click = 1.0 / rho;
    let t_click_se = rho_se / (rho * rho);
    let t_relax = 1.0 / fit.gamma.value;
    let t_relax_se = fit.gamma.stderr / (fit.gamma.value * fit.gamma.value);
    let margin = t_click - t_relax;
    let needed = 2.0 * (t_click_se.powi(2) + t_relax_se.powi(2)).sqrt();
    let order_ok = margin > needed;

    let corr_grid: Vec<f64> = (1..=11).map(|j| j as f64 * 0.02).collect();
    let series = correlation_decay(
        pool,
        &p,
        &[1],
        &corr_grid,
        1e-3,
        2000,
        SeedSpace::new(904, 0),
        runner,
    )
    .unwrap();
    let crossing = series[0]
        .times
        .iter()
        .zip(&series[0].corr)
        .find(|(_, c)| c.abs() <= 0.1)
        .map(|(t, _)| *t);
    let corr_ok = crossing.map_or(false, |t| t < 0.5 * t_click);

    let pass = order_ok && corr_ok;
    let detail = format!(
        "relaxation time {t_relax:.3}+-{t_relax_se:.3} vs inter-click time \
         {t_click:.3}+-{t_click_se:.3} (margin {margin:.2} > {needed:.2}); correlation below \
         0.1 at t={} (< {:.2})",
        crossing.map_or("never".to_string(), |t| format!("{t:.2}")),
        0.5 * t_click
    );
    (pass, detail)
}

/// 10. Reruns with the same config and seed are byte-identical at 1, 4,
/// and 8 worker threads, for a path-statistics run and a click-time run.
fn byte_reproducibility() -> (bool, String) {
    const FILES: [&str; 3] = ["series.csv", "summary.json", "resolved_config.json"];
    let tmp = tempfile::tempdir().unwrap();
    let sim: RunConfig = serde_json::from_value(json!({
        "model": "diffusion",
        "params": { "alpha": 1.0, "lambda": 1.0, "d": 5 },
        "integrator": { "dt": 1e-3, "t_max": 0.5, "record_stride": 50 },
        "initial": { "kind": "poisson" },
        "master_seed": 11,
        "simulate": { "replicates": 300 }
    }))
    .unwrap();
    let clicks: RunConfig = serde_json::from_value(json!({
        "model": "diffusion",
        "params": { "alpha": 1.0, "lambda": 1.0, "d": 5 },
        "integrator": { "dt": 1e-3, "t_max": 6.0, "record_stride": 1000 },
        "initial": { "kind": "poisson" },
        "master_seed": 11,
        "clickstats": { "replicates": 200 }
    }))
    .unwrap();

    let mut identical = true;
    for (experiment, cfg, tag) in [
        (Experiment::Simulate, &sim, "paths"),
        (Experiment::Clickstats, &clicks, "clicks"),
    ] {
        let base = tmp.path().join(format!("{tag}_base"));
        ratchet_qsd::run_to_dir(experiment, cfg, &base, 1).unwrap();
        let reference: Vec<Vec<u8>> =
            FILES.iter().map(|f| std::fs::read(base.join(f)).unwrap()).collect();
        for (label, threads) in [("t4", 4usize), ("t8", 8), ("rerun", 4)] {
            let dir = tmp.path().join(format!("{tag}_{label}"));
            ratchet_qsd::run_to_dir(experiment, cfg, &dir, threads).unwrap();
            for (f, want) in FILES.iter().zip(&reference) {
                identical &= std::fs::read(dir.join(f)).unwrap() == *want;
            }
        }
    }
    (identical, "outputs byte-identical across threads 1/4/8 and rerun, both experiments".into())
}
