//! One function per experiment. Each returns the JSON results block, the
//! CSV series, and the summary flags; the caller owns file layout and exit
//! codes.
//!
//! Seed discipline: the run's seed space is `(master_seed, experiment
//! tag)`. Experiments that need several independent stream families derive
//! sub-spaces with fixed subtags, so no two draws anywhere share a stream.

use crate::config::{Model, RunConfig};
use crate::output::{num, num_list, Cell};
use ratchet_core::diagnostics::{
    click_ks_against_rate, click_statistics, correlation_decay, discrete_vs_diffusion_compare,
    integer_counts, moment_tightness_scan, pi_k_autonomy_test, relaxation_rate_fit, run_fv_study,
    FvSettings,
};
use ratchet_core::diffusion::{simulate_aggregated_path, simulate_path, IntegratorConfig};
use ratchet_core::discrete::{simulate_until_click, DiscretePopulation};
use ratchet_core::qsd::{estimate_eta, qsd_pushforward_check, sample_qprocess, ParticleEnsemble};
use ratchet_core::stats::mean_and_stderr;
use ratchet_core::stream::{ReplicateRunner, SeedSpace};
use ratchet_core::{
    ClickTime, DiscreteParams, EnsembleError, EstimateError, Params, Profile, StepStats,
    Trajectory,
};
use serde_json::{json, Value};
use std::fmt;

/// Failure modes, split by exit code: floors exit 2, the rest exit 1.
#[derive(Debug)]
pub enum RunError {
    /// Too little data for the requested estimate.
    Floor(String),
    /// Simulation or estimation failed outright.
    Sim(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Floor(m) | RunError::Sim(m) => write!(f, "{m}"),
        }
    }
}

impl From<EstimateError> for RunError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::StatisticalFloor { .. }
            | EstimateError::NoDecayWindow
            | EstimateError::WindowTooThin { .. } => RunError::Floor(e.to_string()),
        }
    }
}

impl From<EnsembleError> for RunError {
    fn from(e: EnsembleError) -> Self {
        RunError::Sim(e.to_string())
    }
}

pub struct ExperimentOutput {
    pub results: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub flags: Vec<(String, bool)>,
}

fn rate_json(value: f64, stderr: f64) -> Value {
    json!({ "value": num(value), "stderr": num(stderr) })
}

fn step_stats_json(s: &StepStats) -> Value {
    json!({
        "steps": s.steps,
        "clipped_steps": s.clipped_steps,
        "instability_events": s.instability_events,
        "instability_fraction": num(s.instability_fraction()),
    })
}

/// Mean of `f` over recorded pre-click states, bucketed on the common
/// record grid. A clicked path stops contributing from its click on.
struct GridAccumulator {
    dt: f64,
    stride: usize,
    sums: Vec<[f64; 4]>,
    alive: Vec<u64>,
}

impl GridAccumulator {
    fn new(cfg: &IntegratorConfig) -> Self {
        let n_grid = cfg.steps() / cfg.record_stride + 1;
        Self {
            dt: cfg.dt,
            stride: cfg.record_stride,
            sums: vec![[0.0; 4]; n_grid],
            alive: vec![0; n_grid],
        }
    }

    fn add_path(&mut self, path: &Trajectory) {
        let n = path.states.len();
        let alive_len = if path.click.clicked() { n - 1 } else { n };
        for (t, state) in path.times[..alive_len].iter().zip(&path.states[..alive_len]) {
            let step = (t / self.dt).round() as usize;
            if step % self.stride != 0 {
                continue; // off-grid final state of a censored path
            }
            let g = step / self.stride;
            self.sums[g][0] += state.get(0);
            self.sums[g][1] += state.moment(1);
            self.sums[g][2] += state.moment(2);
            self.sums[g][3] += state.moment(3);
            self.alive[g] += 1;
        }
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let mut rows = Vec::new();
        for (g, (&alive, sums)) in self.alive.iter().zip(&self.sums).enumerate() {
            if alive == 0 {
                continue;
            }
            let t = g as f64 * self.stride as f64 * self.dt;
            let m = alive as f64;
            rows.push(vec![
                Cell::F(t),
                Cell::F(sums[0] / m),
                Cell::F(sums[1] / m),
                Cell::F(sums[2] / m),
                Cell::F(sums[3] / m),
                Cell::U(alive),
            ]);
        }
        rows
    }
}

const SERIES_HEADER: [&str; 6] = ["time", "x0", "m1", "m2", "m3", "survivors"];

pub fn simulate(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.simulate.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    match cfg.model {
        Model::Discrete => simulate_discrete(cfg, p, &x0, sec.replicates, space, runner),
        Model::Diffusion | Model::Aggregated => {
            let icfg = IntegratorConfig::new(
                cfg.integrator.dt,
                cfg.integrator.t_max,
                cfg.integrator.record_stride,
            )
            .expect("validated");
            let agg_k = cfg.aggregation_k;
            let paths = runner.run(sec.replicates, |i| {
                let mut rng = space.rng(i as u64, 0);
                match agg_k {
                    Some(k) => simulate_aggregated_path(&x0, p, k, &icfg, &mut rng),
                    None => simulate_path(&x0, p, &icfg, &mut rng),
                }
                .map_err(|e| e.to_string())
            });
            let mut acc = GridAccumulator::new(&icfg);
            let mut clicks = Vec::new();
            let mut stats = StepStats::default();
            for path in &paths {
                let path = path.as_ref().map_err(|e| RunError::Sim(e.clone()))?;
                acc.add_path(path);
                stats.merge(&path.stats);
                if path.click.clicked() {
                    clicks.push(path.click.time());
                }
            }
            let mean_click = if clicks.is_empty() {
                f64::NAN
            } else {
                clicks.iter().sum::<f64>() / clicks.len() as f64
            };
            let results = json!({
                "replicates": sec.replicates,
                "clicked": clicks.len(),
                "mean_click_time": num(mean_click),
                "step_stats": step_stats_json(&stats),
            });
            Ok(ExperimentOutput {
                results,
                header: SERIES_HEADER.to_vec(),
                rows: acc.rows(),
                flags: vec![],
            })
        }
    }
}

fn simulate_discrete(
    cfg: &RunConfig,
    p: &Params,
    x0: &Profile,
    replicates: usize,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let n_pop = cfg.discrete.as_ref().expect("validated").n;
    let dp = DiscreteParams::from_diffusion(p, n_pop).map_err(|e| RunError::Sim(e.to_string()))?;
    let gens = (n_pop as f64 * cfg.integrator.t_max).round().max(1.0) as u64;
    let stride = cfg.integrator.record_stride as u64;
    let pop0 = DiscretePopulation::new(integer_counts(x0.freqs(), n_pop))
        .expect("largest-remainder rounding conserves the total");

    let paths = runner.run(replicates, |i| {
        let mut rng = space.rng(i as u64, 0);
        simulate_until_click(&pop0, &dp, gens, &mut rng).map_err(|e| e.to_string())
    });

    let n_grid = (gens / stride) as usize + 1;
    let mut sums = vec![[0.0; 4]; n_grid];
    let mut alive = vec![0u64; n_grid];
    let mut clicked = 0usize;
    let mut click_gens = Vec::new();
    for path in &paths {
        let path = path.as_ref().map_err(|e| RunError::Sim(e.clone()))?;
        let n_rec = path.m1.len();
        let alive_len = if path.click.clicked() {
            clicked += 1;
            click_gens.push(path.click.generation());
            n_rec - 1
        } else {
            n_rec
        };
        for g in (0..alive_len as u64).step_by(stride as usize) {
            let idx = (g / stride) as usize;
            let gi = g as usize;
            sums[idx][0] += path.fittest_fraction[gi];
            sums[idx][1] += path.m1[gi];
            sums[idx][2] += path.m2[gi];
            sums[idx][3] += path.m3[gi];
            alive[idx] += 1;
        }
    }
    let mut rows = Vec::new();
    for (idx, (&a, s)) in alive.iter().zip(&sums).enumerate() {
        if a == 0 {
            continue;
        }
        let t = (idx as u64 * stride) as f64 / n_pop as f64;
        let m = a as f64;
        rows.push(vec![
            Cell::F(t),
            Cell::F(s[0] / m),
            Cell::F(s[1] / m),
            Cell::F(s[2] / m),
            Cell::F(s[3] / m),
            Cell::U(a),
        ]);
    }
    let mean_click_time = if click_gens.is_empty() {
        f64::NAN
    } else {
        click_gens.iter().sum::<u64>() as f64 / click_gens.len() as f64 / n_pop as f64
    };
    let results = json!({
        "replicates": replicates,
        "population": n_pop,
        "generations": gens,
        "clicked": clicked,
        "mean_click_time": num(mean_click_time),
    });
    Ok(ExperimentOutput {
        results,
        header: SERIES_HEADER.to_vec(),
        rows,
        flags: vec![],
    })
}

fn fv_settings(cfg: &RunConfig) -> FvSettings {
    let q = cfg.qsd.as_ref().expect("validated");
    FvSettings {
        particles: q.particles,
        dt: cfg.integrator.dt,
        horizon: cfg.integrator.t_max,
        burn_in: q.burn_in.unwrap_or(cfg.integrator.t_max * 0.5),
        record_stride: cfg.integrator.record_stride,
        runs: q.runs,
    }
}

pub fn qsd(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.qsd.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    let settings = fv_settings(cfg);
    let study = run_fv_study(p, &x0, &settings, space, runner)?;

    let mut rows = Vec::new();
    let mut stats = StepStats::default();
    for (r, log) in study.logs.iter().enumerate() {
        stats.merge(&log.stats);
        for j in 0..log.times.len() {
            rows.push(vec![
                Cell::U(r as u64),
                Cell::F(log.times[j]),
                Cell::U(log.cumulative_restarts[j]),
                Cell::F(log.mean_x0[j]),
                Cell::F(log.mean_m1[j]),
            ]);
        }
    }

    let pool = study.pooled_particles();
    let pooled = ParticleEnsemble::uniform(pool, settings.horizon).expect("nonempty pool");
    let moments: Vec<Value> = (1..=3)
        .map(|k| {
            let est = pooled.moment_estimate(k);
            json!({ "k": k, "mean": num(est.mean), "stderr": num(est.stderr) })
        })
        .collect();
    let (x0_mean, x0_se) = pooled.functional_mean(|x| x.get(0));

    let mut flags = Vec::new();
    let pushforward = match sec.pushforward_dt {
        Some(delta_t) => {
            let icfg = IntegratorConfig::new(cfg.integrator.dt, delta_t.max(cfg.integrator.dt), 1)
                .expect("validated");
            let report = qsd_pushforward_check(
                &pooled,
                p,
                delta_t,
                &icfg,
                sec.bins,
                sec.permutations,
                space.derive(1 << 32),
                runner,
            )?;
            flags.push(("pushforward_tv_ok".to_string(), report.tv.corrected < 0.05));
            json!({
                "delta_t": num(report.delta_t),
                "tv_raw": num(report.tv.raw),
                "tv_null_mean": num(report.tv.null_mean),
                "tv_null_sd": num(report.tv.null_sd),
                "tv_corrected": num(report.tv.corrected),
                "survivors": report.survivors,
                "total": report.total,
            })
        }
        None => Value::Null,
    };

    let results = json!({
        "rho0": rate_json(study.rho0.value, study.rho0.stderr),
        "per_run_rho0": num_list(&study.per_run_rho0),
        "t_click": num(1.0 / study.rho0.value),
        "particles": settings.particles,
        "runs": settings.runs,
        "burn_in": num(settings.burn_in),
        "pooled_moments": moments,
        "pooled_x0": { "mean": num(x0_mean), "stderr": num(x0_se) },
        "pushforward": pushforward,
        "step_stats": step_stats_json(&stats),
    });
    Ok(ExperimentOutput {
        results,
        header: vec!["run", "time", "restarts", "mean_x0", "mean_m1"],
        rows,
        flags,
    })
}

pub fn eta(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.eta.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    let (rho0, rho0_source) = match sec.rho0 {
        Some(r) => (r, json!("config")),
        None => {
            let study = run_fv_study(p, &x0, &fv_settings(cfg), space.derive(1), runner)?;
            (study.rho0.value, json!({ "fleming_viot": rate_json(study.rho0.value, study.rho0.stderr) }))
        }
    };
    let icfg = IntegratorConfig::new(
        cfg.integrator.dt,
        cfg.integrator.t_max,
        cfg.integrator.record_stride,
    )
    .expect("validated");
    let curve = estimate_eta(&x0, p, rho0, &icfg, sec.replicates, space.derive(2), runner)?;

    let rows: Vec<Vec<Cell>> = (0..curve.times.len())
        .map(|j| {
            vec![
                Cell::F(curve.times[j]),
                Cell::F(curve.eta[j]),
                Cell::F(curve.stderr[j]),
                Cell::U(curve.survivors[j]),
            ]
        })
        .collect();
    let results = json!({
        "rho0_used": num(rho0),
        "rho0_source": rho0_source,
        "replicates": sec.replicates,
        "eta": rate_json(curve.plateau_value, curve.plateau_stderr),
        "plateau_start_time": num(curve.times.get(curve.plateau_start).copied().unwrap_or(f64::NAN)),
        "usable_points": curve.times.len(),
    });
    Ok(ExperimentOutput {
        results,
        header: vec!["time", "eta", "stderr", "survivors"],
        rows,
        flags: vec![],
    })
}

pub fn qprocess(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.qprocess.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    let icfg = IntegratorConfig::new(
        cfg.integrator.dt,
        cfg.integrator.t_max,
        cfg.integrator.record_stride,
    )
    .expect("validated");
    let sample = sample_qprocess(
        &x0,
        p,
        cfg.integrator.t_max,
        sec.guard,
        &icfg,
        sec.replicates,
        space,
        runner,
    )?;

    let mut acc = GridAccumulator::new(&icfg);
    for path in &sample.paths {
        acc.add_path(path);
    }
    let results = json!({
        "attempted": sample.attempted,
        "accepted": sample.accepted,
        "acceptance": num(sample.acceptance),
        "guard": num(sec.guard),
    });
    Ok(ExperimentOutput {
        results,
        header: SERIES_HEADER.to_vec(),
        rows: acc.rows(),
        flags: vec![],
    })
}

pub fn correlations(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.correlations.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    let study = run_fv_study(p, &x0, &fv_settings(cfg), space.derive(1), runner)?;
    let pool = study.pooled_particles();
    let series = correlation_decay(
        &pool,
        p,
        &sec.ks,
        &sec.t_grid,
        cfg.integrator.dt,
        sec.replicates,
        space.derive(2),
        runner,
    )?;

    let t_click = 1.0 / study.rho0.value;
    let mut rows = Vec::new();
    let mut per_k = Vec::new();
    let mut all_crossed = true;
    for s in &series {
        let mut crossing = f64::NAN;
        for j in 0..s.times.len() {
            rows.push(vec![
                Cell::U(s.k as u64),
                Cell::F(s.times[j]),
                Cell::F(s.corr[j]),
                Cell::F(s.band[j]),
                Cell::U(s.alive[j]),
            ]);
            if crossing.is_nan() && s.corr[j].abs() <= 0.1 {
                crossing = s.times[j];
            }
        }
        all_crossed &= crossing.is_finite() && crossing < 0.5 * t_click;
        per_k.push(json!({
            "k": s.k,
            "kept_points": s.times.len(),
            "crossing_time": num(crossing),
        }));
    }

    let results = json!({
        "rho0": rate_json(study.rho0.value, study.rho0.stderr),
        "t_click": num(t_click),
        "replicates": sec.replicates,
        "series": per_k,
    });
    Ok(ExperimentOutput {
        results,
        header: vec!["k", "time", "corr", "band", "alive"],
        rows,
        flags: vec![("crossings_before_half_t_click".to_string(), all_crossed)],
    })
}

pub fn relaxation(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.relaxation.as_ref().expect("validated");
    let x_a = cfg.initial.build(p, "initial").expect("validated");
    let x_b = sec.initial_b.build(p, "relaxation.initial_b").expect("validated");
    let fit = relaxation_rate_fit(
        &x_a,
        &x_b,
        p,
        &sec.t_grid,
        cfg.integrator.dt,
        sec.replicates,
        sec.bins,
        sec.permutations,
        space,
        runner,
    )?;

    let rows: Vec<Vec<Cell>> = (0..fit.times.len())
        .map(|j| {
            vec![
                Cell::F(fit.times[j]),
                Cell::F(fit.tv[j].raw),
                Cell::F(fit.tv[j].null_mean),
                Cell::F(fit.tv[j].corrected),
                Cell::U(u64::from(fit.window.contains(&j))),
            ]
        })
        .collect();
    let gamma = fit.gamma.value;
    let t_relax = 1.0 / gamma;
    let results = json!({
        "gamma": rate_json(gamma, fit.gamma.stderr),
        "t_relax": num(t_relax),
        "t_relax_stderr": num(fit.gamma.stderr / (gamma * gamma)),
        "window_times": num_list(&fit.window.iter().map(|&j| fit.times[j]).collect::<Vec<_>>()),
        "replicates": sec.replicates,
        "bins": sec.bins,
    });
    Ok(ExperimentOutput {
        results,
        header: vec!["time", "tv_raw", "tv_null_mean", "tv_corrected", "in_window"],
        rows,
        flags: vec![],
    })
}

pub fn tightness(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.tightness.as_ref().expect("validated");
    let rows_data = moment_tightness_scan(
        p,
        &sec.d_list,
        sec.k,
        sec.quantile,
        &fv_settings(cfg),
        space,
        runner,
    )?;

    let agree = |a: &ratchet_core::diagnostics::TightnessRow,
                 b: &ratchet_core::diagnostics::TightnessRow,
                 f: fn(&ratchet_core::diagnostics::TightnessRow) -> (f64, f64)| {
        let (va, sa) = f(a);
        let (vb, sb) = f(b);
        (va - vb).abs() <= 2.0 * (sa * sa + sb * sb).sqrt()
    };
    let mut quantile_stable = true;
    let mut rho0_stable = true;
    for w in rows_data.windows(2) {
        quantile_stable &= agree(&w[0], &w[1], |r| (r.quantile.value, r.quantile.stderr));
        rho0_stable &= agree(&w[0], &w[1], |r| (r.rho0.value, r.rho0.stderr));
    }

    let table: Vec<Value> = rows_data
        .iter()
        .map(|r| {
            json!({
                "d": r.d,
                "quantile": rate_json(r.quantile.value, r.quantile.stderr),
                "mean_moment": rate_json(r.mean_moment.value, r.mean_moment.stderr),
                "rho0": rate_json(r.rho0.value, r.rho0.stderr),
            })
        })
        .collect();
    let rows: Vec<Vec<Cell>> = rows_data
        .iter()
        .map(|r| {
            vec![
                Cell::U(r.d as u64),
                Cell::F(r.quantile.value),
                Cell::F(r.quantile.stderr),
                Cell::F(r.mean_moment.value),
                Cell::F(r.mean_moment.stderr),
                Cell::F(r.rho0.value),
                Cell::F(r.rho0.stderr),
            ]
        })
        .collect();
    let results = json!({
        "k": sec.k,
        "level": num(sec.quantile),
        "rows": table,
    });
    Ok(ExperimentOutput {
        results,
        header: vec![
            "d",
            "quantile",
            "quantile_stderr",
            "mean_moment",
            "mean_stderr",
            "rho0",
            "rho0_stderr",
        ],
        rows,
        flags: vec![
            ("quantile_stable_across_d".to_string(), quantile_stable),
            ("rho0_stable_across_d".to_string(), rho0_stable),
        ],
    })
}

pub fn autonomy(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.autonomy.as_ref().expect("validated");
    let x_a = cfg.initial.build(p, "initial").expect("validated");
    let x_b = sec.initial_b.build(p, "autonomy.initial_b").expect("validated");
    let aggregated = cfg.model == Model::Aggregated;
    let report = pi_k_autonomy_test(
        &x_a,
        &x_b,
        p,
        sec.k,
        cfg.integrator.t_max,
        cfg.integrator.dt,
        sec.replicates,
        aggregated,
        space,
        runner,
    )?;

    let label = |j: usize| -> String {
        if j < sec.k {
            format!("x{j}")
        } else if j == sec.k {
            "tail_mass".to_string()
        } else {
            "capped_mean".to_string()
        }
    };
    let rows: Vec<Vec<Cell>> = report
        .p_values
        .iter()
        .enumerate()
        .map(|(j, &pv)| vec![Cell::S(label(j)), Cell::F(pv)])
        .collect();
    let p_values: Vec<Value> = report
        .p_values
        .iter()
        .enumerate()
        .map(|(j, &pv)| json!({ "statistic": label(j), "p": num(pv) }))
        .collect();
    let results = json!({
        "k": sec.k,
        "aggregated_dynamics": aggregated,
        "replicates": sec.replicates,
        "t": num(cfg.integrator.t_max),
        "p_values": p_values,
        "min_p": num(report.min_p),
        "corrected_min_p": num(report.corrected_min_p),
    });
    Ok(ExperimentOutput {
        results,
        header: vec!["statistic", "p_value"],
        rows,
        flags: vec![(
            "autonomy_not_rejected".to_string(),
            report.corrected_min_p > 0.01,
        )],
    })
}

pub fn compare(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.compare.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    let report = discrete_vs_diffusion_compare(
        p,
        sec.n,
        &x0,
        cfg.integrator.t_max,
        cfg.integrator.dt,
        sec.replicates,
        space,
        runner,
    )?;

    let side_row = |name: &str, m: &ratchet_core::diagnostics::SummaryMoments, clicked: usize| {
        vec![
            Cell::S(name.to_string()),
            Cell::F(m.mean_m1),
            Cell::F(m.se_m1),
            Cell::F(m.var_m1),
            Cell::F(m.mean_x0),
            Cell::F(m.se_x0),
            Cell::F(m.var_x0),
            Cell::U(clicked as u64),
        ]
    };
    let side_json = |m: &ratchet_core::diagnostics::SummaryMoments, clicked: usize| {
        json!({
            "mean_m1": num(m.mean_m1), "se_m1": num(m.se_m1), "var_m1": num(m.var_m1),
            "mean_x0": num(m.mean_x0), "se_x0": num(m.se_x0), "var_x0": num(m.var_x0),
            "clicked": clicked,
        })
    };
    let results = json!({
        "n": report.n,
        "t": num(report.t),
        "replicates": sec.replicates,
        "discrete": side_json(&report.discrete, report.clicked_discrete),
        "diffusion": side_json(&report.diffusion, report.clicked_diffusion),
        "rel_gap_m1": num(report.rel_gap_m1),
        "gap_x0": num(report.gap_x0),
    });
    Ok(ExperimentOutput {
        results,
        header: vec![
            "side", "mean_m1", "se_m1", "var_m1", "mean_x0", "se_x0", "var_x0", "clicked",
        ],
        rows: vec![
            side_row("discrete", &report.discrete, report.clicked_discrete),
            side_row("diffusion", &report.diffusion, report.clicked_diffusion),
        ],
        flags: vec![("rel_gap_below_10_percent".to_string(), report.rel_gap_m1 < 0.10)],
    })
}

pub fn clickstats(
    cfg: &RunConfig,
    p: &Params,
    space: SeedSpace,
    runner: &impl ReplicateRunner,
) -> Result<ExperimentOutput, RunError> {
    let sec = cfg.clickstats.as_ref().expect("validated");
    let x0 = cfg.initial.build(p, "initial").expect("validated");
    let icfg = IntegratorConfig::new(cfg.integrator.dt, cfg.integrator.t_max, usize::MAX)
        .expect("validated");
    // Full paths rather than bare click times: the state at the click is
    // reported too (the profile the population is left with).
    let paths = runner.run(sec.replicates, |i| {
        let mut rng = space.rng(i as u64, 0);
        simulate_path(&x0, p, &icfg, &mut rng).map_err(|e| e.to_string())
    });
    let mut clicks = Vec::with_capacity(paths.len());
    let mut post_m1 = Vec::new();
    let mut post_x1 = Vec::new();
    for path in &paths {
        let path = path.as_ref().map_err(|e| RunError::Sim(e.clone()))?;
        clicks.push(path.click);
        if path.click.clicked() {
            let state = path.last();
            post_m1.push(state.moment(1));
            post_x1.push(state.get(1));
        }
    }
    let stats = click_statistics(&clicks)?;

    let rows: Vec<Vec<Cell>> = clicks
        .iter()
        .map(|c| match c {
            ClickTime::Clicked(t) => vec![Cell::S("clicked".to_string()), Cell::F(*t)],
            ClickTime::Censored(t) => vec![Cell::S("censored".to_string()), Cell::F(*t)],
        })
        .collect();
    let quantiles: Vec<Value> = stats
        .quantiles
        .iter()
        .map(|&(q, v)| json!({ "level": num(q), "value": num(v) }))
        .collect();
    let mut flags = vec![("exponential_fit_ok".to_string(), stats.ks_p > 0.01)];
    let calibrated = match sec.rate {
        Some(rate) => {
            let (d, pv) = click_ks_against_rate(&clicks, rate)?;
            flags.push(("calibrated_ks_ok".to_string(), pv > 0.01));
            json!({ "rate": num(rate), "ks_d": num(d), "ks_p": num(pv) })
        }
        None => Value::Null,
    };
    // Observational only, no pass/fail: the profile left behind by a
    // click, against the naive one-class-shift prediction.
    let post_click = if post_m1.is_empty() {
        Value::Null
    } else {
        let (m1, m1_se) = mean_and_stderr(&post_m1);
        let (x1, x1_se) = mean_and_stderr(&post_x1);
        let n_star = p.n_star();
        json!({
            "mean_m1": num(m1), "se_m1": num(m1_se),
            "mean_x1": num(x1), "se_x1": num(x1_se),
            "shifted_poisson_m1": num(1.0 + n_star),
            "shifted_poisson_x1": num((-n_star).exp()),
        })
    };
    let results = json!({
        "replicates": sec.replicates,
        "clicked": stats.clicked,
        "censored": stats.censored,
        "mean_click_time": num(stats.mean),
        "fitted_rate": num(1.0 / stats.mean),
        "quantiles": quantiles,
        "self_fitted_ks": { "ks_d": num(stats.ks_d), "ks_p": num(stats.ks_p) },
        "calibrated_ks": calibrated,
        "post_click": post_click,
    });
    Ok(ExperimentOutput {
        results,
        header: vec!["status", "time"],
        rows,
        flags,
    })
}
