//! Observables of the metastable regime: correlation decay under the
//! quasi-stationary law, relaxation-rate fits from binned total variation,
//! moment tightness across truncation dimensions, autonomy of the
//! aggregated dynamics, discrete-versus-diffusion scaling, and click-time
//! statistics.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::diffusion::{DriftKind, IntegratorConfig, StepCore};
use crate::discrete::{simulate_generations, DiscretePopulation};
use crate::dynamics::poisson_profile;
use crate::error::{EnsembleError, EstimateError};
use crate::params::{DiscreteParams, Params};
use crate::profile::Profile;
use crate::qsd::{fleming_viot_evolve, FvLog, ParticleEnsemble};
use crate::stats::{self, RateEstimate};
use crate::stream::{ReplicateRunner, SeedSpace};
use crate::trajectory::ClickTime;

/// Joint histogram of the `(X0, M1)` summary with quantile-spaced edges.
#[derive(Debug, Clone)]
pub struct Histogram2D {
    /// Outer bin edges on each axis (including the data range ends);
    /// strictly increasing, duplicate quantiles merged.
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major masses, summing to 1.
    pub masses: Vec<f64>,
}

impl Histogram2D {
    pub fn from_points(points: &[(f64, f64)], bins: usize) -> Self {
        assert!(!points.is_empty());
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        stats::sort(&mut xs);
        stats::sort(&mut ys);
        let edges = |sorted: &[f64]| -> Vec<f64> {
            let mut e = Vec::with_capacity(bins + 1);
            for j in 0..=bins {
                let q = stats::quantile(sorted, j as f64 / bins as f64);
                if e.last().map_or(true, |&last| q > last) {
                    e.push(q);
                }
            }
            if e.len() == 1 {
                // degenerate axis: a single point still needs one cell
                e.push(e[0] + 1.0);
            }
            e
        };
        let x_edges = edges(&xs);
        let y_edges = edges(&ys);
        let nx = x_edges.len() - 1;
        let ny = y_edges.len() - 1;
        let locate = |edges: &[f64], v: f64| -> usize {
            edges[1..edges.len() - 1].partition_point(|&e| e <= v)
        };
        let mut counts = alloc::vec![0u64; nx * ny];
        for &(x, y) in points {
            counts[locate(&x_edges, x) * ny + locate(&y_edges, y)] += 1;
        }
        let n = points.len() as f64;
        let masses = counts.iter().map(|&c| c as f64 / n).collect();
        Self { x_edges, y_edges, masses }
    }
}

/// Normalized correlation between a coordinate at time `t` and the fittest
/// class at time 0, over paths started from an estimated
/// quasi-stationary pool, using survivors only at each time.
#[derive(Debug, Clone)]
pub struct CorrelationDecay {
    /// Coordinate index whose lagged correlation with `X0(0)` is tracked.
    pub k: usize,
    pub times: Vec<f64>,
    pub corr: Vec<f64>,
    /// Bootstrap standard deviation per point.
    pub band: Vec<f64>,
    pub alive: Vec<u64>,
    pub total: usize,
}

/// Compute lagged correlations for each coordinate in `ks`. The grid is
/// truncated where survival drops below 90%, where conditioning on
/// survival would distort the estimate.
pub fn correlation_decay<E: ReplicateRunner>(
    starts: &[Profile],
    p: &Params,
    ks: &[usize],
    t_grid: &[f64],
    dt: f64,
    replicates: usize,
    space: SeedSpace,
    runner: &E,
) -> Result<Vec<CorrelationDecay>, EstimateError> {
    const MIN_REPLICATES: usize = 1000;
    const SURVIVAL_GATE: f64 = 0.9;
    if replicates < MIN_REPLICATES {
        return Err(EstimateError::StatisticalFloor {
            got: replicates as u64,
            needed: MIN_REPLICATES as u64,
        });
    }
    assert!(!starts.is_empty());
    assert!(t_grid.windows(2).all(|w| w[0] < w[1]));
    assert!(ks.iter().all(|&k| k <= p.d()));
    let grid_steps: Vec<u64> = t_grid.iter().map(|&t| (t / dt).round() as u64).collect();
    let max_steps = *grid_steps.last().unwrap();

    struct PathRec {
        x0_init: f64,
        init: Vec<f64>,
        // values[k][j]; NaN once the path has clicked
        values: Vec<Vec<f64>>,
    }
    let recs = runner.run(replicates, |i| {
        let mut rng = space.rng(i as u64, 0);
        let start = &starts[i % starts.len()];
        let mut core = StepCore::new(start.len());
        let mut state = start.freqs().to_vec();
        let mut values = alloc::vec![alloc::vec![f64::NAN; grid_steps.len()]; ks.len()];
        let mut alive = true;
        let mut next_grid = 0usize;
        for step in 0..=max_steps {
            if step > 0 && alive {
                let out = core.step(&mut state, p, DriftKind::Full, dt, &mut rng);
                if out.pre_clip_x0 <= 0.0 {
                    alive = false;
                }
            }
            while next_grid < grid_steps.len() && grid_steps[next_grid] == step {
                if alive {
                    for (a, &k) in ks.iter().enumerate() {
                        values[a][next_grid] = state[k];
                    }
                }
                next_grid += 1;
            }
        }
        PathRec {
            x0_init: start.get(0),
            init: ks.iter().map(|&k| start.get(k)).collect(),
            values,
        }
    });

    let n = recs.len() as f64;
    let mut alive_counts = alloc::vec![0u64; grid_steps.len()];
    for r in &recs {
        for (j, v) in r.values[0].iter().enumerate() {
            if !v.is_nan() {
                alive_counts[j] += 1;
            }
        }
    }
    let gated = alive_counts
        .iter()
        .take_while(|&&a| a as f64 >= SURVIVAL_GATE * n)
        .count();
    if gated == 0 {
        return Err(EstimateError::StatisticalFloor {
            got: alive_counts[0],
            needed: (SURVIVAL_GATE * n) as u64,
        });
    }

    let mut out = Vec::with_capacity(ks.len());
    let mut boot_rng = space.derive(1).rng(0, 0);
    for (a, &k) in ks.iter().enumerate() {
        let series = |idx: Option<&[usize]>| -> Vec<f64> {
            let take = |i: usize| -> &PathRec { &recs[i] };
            let all: Vec<usize>;
            let ids: &[usize] = match idx {
                Some(ids) => ids,
                None => {
                    all = (0..recs.len()).collect();
                    &all
                }
            };
            let total = ids.len() as f64;
            let mean_k0 = ids.iter().map(|&i| take(i).init[a]).sum::<f64>() / total;
            let var_k0 =
                ids.iter().map(|&i| (take(i).init[a] - mean_k0).powi(2)).sum::<f64>() / total;
            let mean_x00 = ids.iter().map(|&i| take(i).x0_init).sum::<f64>() / total;
            let var_x00 =
                ids.iter().map(|&i| (take(i).x0_init - mean_x00).powi(2)).sum::<f64>() / total;
            let denom = (var_k0 * var_x00).sqrt();
            assert!(denom > 0.0, "the initial pool must vary in both coordinates");
            (0..gated)
                .map(|j| {
                    let mut cross = 0.0;
                    let mut count = 0.0;
                    for &i in ids {
                        let v = take(i).values[a][j];
                        if !v.is_nan() {
                            cross += v * take(i).x0_init;
                            count += 1.0;
                        }
                    }
                    (cross / count - mean_k0 * mean_x00) / denom
                })
                .collect()
        };
        let point = series(None);

        const RESAMPLES: usize = 100;
        let mut sums = alloc::vec![0.0; gated];
        let mut sq_sums = alloc::vec![0.0; gated];
        let mut idx = alloc::vec![0usize; recs.len()];
        for _ in 0..RESAMPLES {
            for slot in idx.iter_mut() {
                *slot = boot_rng.gen_range(0..recs.len());
            }
            let s = series(Some(&idx));
            for j in 0..gated {
                sums[j] += s[j];
                sq_sums[j] += s[j] * s[j];
            }
        }
        let band: Vec<f64> = (0..gated)
            .map(|j| {
                let m = sums[j] / RESAMPLES as f64;
                (sq_sums[j] / RESAMPLES as f64 - m * m).max(0.0).sqrt()
            })
            .collect();

        out.push(CorrelationDecay {
            k,
            times: t_grid[..gated].to_vec(),
            corr: point,
            band,
            alive: alive_counts[..gated].to_vec(),
            total: recs.len(),
        });
    }
    Ok(out)
}

/// Exponential fit of the total-variation distance between two
/// survivor-conditioned path laws started from different states.
#[derive(Debug, Clone)]
pub struct RelaxationFit {
    /// Decay rate of the binned TV distance: `TV(t) ~ exp(-gamma t)`.
    pub gamma: RateEstimate,
    pub times: Vec<f64>,
    pub tv: Vec<stats::TvEstimate>,
    /// Grid indices used by the fit (debiased TV inside `[0.02, 0.5]`).
    pub window: Vec<usize>,
}

const TV_FIT_LO: f64 = 0.02;
const TV_FIT_HI: f64 = 0.5;

/// Estimate the relaxation rate from two ensembles of paths started at
/// `x_a` and `x_b`. At each grid time the surviving paths' `(X0, M1)`
/// summaries are binned on a pooled quantile grid; the permutation-debiased
/// TV distance is fitted as a decaying exponential over the window where it
/// is resolvable above noise but below saturation.
pub fn relaxation_rate_fit<E: ReplicateRunner>(
    x_a: &Profile,
    x_b: &Profile,
    p: &Params,
    t_grid: &[f64],
    dt: f64,
    replicates: usize,
    bins: usize,
    permutations: usize,
    space: SeedSpace,
    runner: &E,
) -> Result<RelaxationFit, EstimateError> {
    const MIN_SURVIVORS: usize = 200;
    const RESAMPLES: usize = 60;
    const DEAD: usize = usize::MAX;
    assert_eq!(x_a.len(), x_b.len());
    assert!(t_grid.windows(2).all(|w| w[0] < w[1]));
    assert!(*t_grid.first().expect("empty time grid") > 0.0);
    if replicates < 2 * MIN_SURVIVORS {
        return Err(EstimateError::StatisticalFloor {
            got: replicates as u64,
            needed: 2 * MIN_SURVIVORS as u64,
        });
    }
    let grid_steps: Vec<u64> = t_grid.iter().map(|&t| (t / dt).round() as u64).collect();
    assert!(grid_steps[0] >= 1 && grid_steps.windows(2).all(|w| w[0] < w[1]));
    let max_steps = *grid_steps.last().unwrap();

    // summaries[j][i] = (X0, M1) of path i at grid time j, while alive
    let run_group = |start: &Profile, sub: SeedSpace| -> Vec<Vec<Option<(f64, f64)>>> {
        let paths = runner.run(replicates, |i| {
            let mut rng = sub.rng(i as u64, 0);
            let mut core = StepCore::new(start.len());
            let mut state = start.freqs().to_vec();
            let mut alive = true;
            let mut next_grid = 0usize;
            let mut rec = alloc::vec![None; grid_steps.len()];
            for step in 1..=max_steps {
                if alive {
                    let out = core.step(&mut state, p, DriftKind::Full, dt, &mut rng);
                    if out.pre_clip_x0 <= 0.0 {
                        alive = false;
                    }
                }
                while next_grid < grid_steps.len() && grid_steps[next_grid] == step {
                    if alive {
                        let m1 = state
                            .iter()
                            .enumerate()
                            .map(|(c, &x)| c as f64 * x)
                            .sum::<f64>();
                        rec[next_grid] = Some((state[0], m1));
                    }
                    next_grid += 1;
                }
            }
            rec
        });
        let mut by_time = alloc::vec![Vec::with_capacity(replicates); grid_steps.len()];
        for path in paths {
            for (j, v) in path.into_iter().enumerate() {
                by_time[j].push(v);
            }
        }
        by_time
    };
    let group_a = run_group(x_a, space.derive(0));
    let group_b = run_group(x_b, space.derive(1));

    let mut tv = Vec::new();
    // bin index per path per retained grid time, DEAD for clicked paths
    let mut bins_a: Vec<Vec<usize>> = Vec::new();
    let mut bins_b: Vec<Vec<usize>> = Vec::new();
    let perm_space = space.derive(2);
    for j in 0..grid_steps.len() {
        let pts_a: Vec<(f64, f64)> = group_a[j].iter().flatten().copied().collect();
        let pts_b: Vec<(f64, f64)> = group_b[j].iter().flatten().copied().collect();
        if pts_a.len() < MIN_SURVIVORS || pts_b.len() < MIN_SURVIVORS {
            break;
        }
        let pooled: Vec<(f64, f64)> = pts_a.iter().chain(&pts_b).copied().collect();
        let grid = stats::QuantileGrid2::from_pooled(&pooled, bins);
        let ia = grid.bin_all(&pts_a);
        let ib = grid.bin_all(&pts_b);
        let mut rng = perm_space.rng(j as u64, 0);
        tv.push(stats::debiased_binned_tv(&ia, &ib, grid.n_bins(), permutations, &mut rng));
        let index_row = |col: &[Option<(f64, f64)>]| -> Vec<usize> {
            col.iter()
                .map(|v| match v {
                    Some(pt) => grid.bin(*pt),
                    None => DEAD,
                })
                .collect()
        };
        bins_a.push(index_row(&group_a[j]));
        bins_b.push(index_row(&group_b[j]));
    }

    let window: Vec<usize> = (0..tv.len())
        .filter(|&j| tv[j].corrected >= TV_FIT_LO && tv[j].corrected <= TV_FIT_HI)
        .collect();
    if window.len() < 2 {
        return Err(EstimateError::NoDecayWindow);
    }
    let fit_slope = |series: &[(f64, f64)]| -> Option<f64> {
        let t: Vec<f64> = series.iter().map(|s| s.0).collect();
        let y: Vec<f64> = series.iter().map(|s| s.1.ln()).collect();
        let w = alloc::vec![1.0; t.len()];
        stats::weighted_line_fit(&t, &y, &w).map(|f| f.slope)
    };
    let point_series: Vec<(f64, f64)> =
        window.iter().map(|&j| (t_grid[j], tv[j].corrected)).collect();
    let slope = fit_slope(&point_series).ok_or(EstimateError::NoDecayWindow)?;

    // path-level bootstrap with the debias offsets held at their original
    // values; survivor counts barely move under resampling, and the offset
    // depends only on those counts and the binning
    let mut boot_rng = space.derive(3).rng(0, 0);
    let mut slopes = Vec::with_capacity(RESAMPLES);
    let mut idx_a = alloc::vec![0usize; replicates];
    let mut idx_b = alloc::vec![0usize; replicates];
    let n_bins = bins * bins;
    let mut ca = alloc::vec![0.0f64; n_bins];
    let mut cb = alloc::vec![0.0f64; n_bins];
    for _ in 0..RESAMPLES {
        for slot in idx_a.iter_mut() {
            *slot = boot_rng.gen_range(0..replicates);
        }
        for slot in idx_b.iter_mut() {
            *slot = boot_rng.gen_range(0..replicates);
        }
        let mut series = Vec::with_capacity(window.len());
        for &j in &window {
            ca.iter_mut().for_each(|c| *c = 0.0);
            cb.iter_mut().for_each(|c| *c = 0.0);
            let mut na = 0.0;
            let mut nb = 0.0;
            for &i in &idx_a {
                let b = bins_a[j][i];
                if b != DEAD {
                    ca[b] += 1.0;
                    na += 1.0;
                }
            }
            for &i in &idx_b {
                let b = bins_b[j][i];
                if b != DEAD {
                    cb[b] += 1.0;
                    nb += 1.0;
                }
            }
            if na == 0.0 || nb == 0.0 {
                continue;
            }
            let raw = 0.5
                * ca.iter()
                    .zip(&cb)
                    .map(|(&a, &b)| (a / na - b / nb).abs())
                    .sum::<f64>();
            let corrected = (raw - tv[j].null_mean).max(0.0);
            if corrected > 1e-12 {
                series.push((t_grid[j], corrected));
            }
        }
        if series.len() >= 2 {
            if let Some(s) = fit_slope(&series) {
                slopes.push(s);
            }
        }
    }
    let stderr = if slopes.len() >= RESAMPLES / 2 {
        let (_, se) = stats::mean_and_stderr(&slopes);
        se * (slopes.len() as f64).sqrt()
    } else {
        f64::INFINITY
    };

    Ok(RelaxationFit {
        gamma: RateEstimate { value: -slope, stderr },
        times: t_grid[..tv.len()].to_vec(),
        tv,
        window,
    })
}

/// Controls shared by Fleming–Viot study runs.
#[derive(Debug, Clone, Copy)]
pub struct FvSettings {
    pub particles: usize,
    pub dt: f64,
    /// Total simulated time per run.
    pub horizon: f64,
    /// Time before which restarts are ignored when estimating the rate.
    pub burn_in: f64,
    pub record_stride: usize,
    /// Independent runs; the run-to-run spread gives honest errors.
    pub runs: usize,
}

/// Outcome of repeated independent Fleming–Viot runs at one configuration.
#[derive(Debug, Clone)]
pub struct FvStudy {
    pub ensembles: Vec<ParticleEnsemble>,
    pub logs: Vec<FvLog>,
    /// Restart-rate estimate of the extinction rate; run-level standard
    /// error when several runs are available, else the Poisson error.
    pub rho0: RateEstimate,
    pub per_run_rho0: Vec<f64>,
}

impl FvStudy {
    /// All final-ensemble particles pooled across runs.
    pub fn pooled_particles(&self) -> Vec<Profile> {
        self.ensembles
            .iter()
            .flat_map(|e| e.particles().iter().cloned())
            .collect()
    }
}

/// Run `s.runs` independent Fleming–Viot ensembles from `init` and collect
/// their final states and restart-rate estimates.
pub fn run_fv_study<E: ReplicateRunner>(
    p: &Params,
    init: &Profile,
    s: &FvSettings,
    space: SeedSpace,
    runner: &E,
) -> Result<FvStudy, EnsembleError> {
    assert!(s.runs >= 1);
    assert!(s.burn_in < s.horizon);
    let cfg = IntegratorConfig::new(s.dt, s.horizon, s.record_stride)
        .expect("study settings define a valid integrator");
    let mut ensembles = Vec::with_capacity(s.runs);
    let mut logs = Vec::with_capacity(s.runs);
    let mut per_run_rho0 = Vec::with_capacity(s.runs);
    for r in 0..s.runs {
        let start = ParticleEnsemble::replicated(init, s.particles)?;
        let (e, log) =
            fleming_viot_evolve(&start, p, &cfg, s.horizon, space.derive(r as u64), runner)?;
        per_run_rho0.push(log.restart_rate(s.burn_in, s.horizon, s.particles).value);
        ensembles.push(e);
        logs.push(log);
    }
    let rho0 = if s.runs >= 2 {
        let (value, stderr) = stats::mean_and_stderr(&per_run_rho0);
        RateEstimate { value, stderr }
    } else {
        logs[0].restart_rate(s.burn_in, s.horizon, s.particles)
    };
    Ok(FvStudy { ensembles, logs, rho0, per_run_rho0 })
}

/// One truncation dimension's worth of tightness evidence.
#[derive(Debug, Clone)]
pub struct TightnessRow {
    pub d: usize,
    /// Probed moment order and quantile level.
    pub k: u32,
    pub q: f64,
    /// Quantile of the `k`-th moment over final ensembles, mean and
    /// standard error across runs.
    pub quantile: RateEstimate,
    pub mean_moment: RateEstimate,
    pub rho0: RateEstimate,
}

/// Repeat a Fleming–Viot study across truncation dimensions and tabulate
/// the chosen moment quantile and the extinction-rate estimate for each.
/// Stability of both columns as `d` grows is the tightness evidence.
pub fn moment_tightness_scan<E: ReplicateRunner>(
    p_base: &Params,
    d_list: &[usize],
    k: u32,
    q: f64,
    s: &FvSettings,
    space: SeedSpace,
    runner: &E,
) -> Result<Vec<TightnessRow>, EnsembleError> {
    assert!(s.runs >= 2, "run-level errors need at least two runs");
    let mut rows = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let pd = p_base.with_d(d).expect("scan dimensions are positive");
        let init = poisson_profile(&pd);
        let study = run_fv_study(&pd, &init, s, space.derive(1000 + d as u64), runner)?;
        let mut quantiles = Vec::with_capacity(s.runs);
        let mut means = Vec::with_capacity(s.runs);
        for e in &study.ensembles {
            let mut values: Vec<f64> =
                e.particles().iter().map(|x| x.moment(k)).collect();
            stats::sort(&mut values);
            quantiles.push(stats::quantile(&values, q));
            means.push(values.iter().sum::<f64>() / values.len() as f64);
        }
        let (qv, qse) = stats::mean_and_stderr(&quantiles);
        let (mv, mse) = stats::mean_and_stderr(&means);
        rows.push(TightnessRow {
            d,
            k,
            q,
            quantile: RateEstimate { value: qv, stderr: qse },
            mean_moment: RateEstimate { value: mv, stderr: mse },
            rho0: study.rho0,
        });
    }
    Ok(rows)
}

/// Two-sample comparison of the truncated summary's law under full and
/// tail-varied initial conditions.
#[derive(Debug, Clone)]
pub struct AutonomyReport {
    /// Two-sample KS p-value per tested statistic: the `k` head
    /// coordinates, the lumped tail mass, and the capped mean.
    pub p_values: Vec<f64>,
    pub min_p: f64,
    /// Bonferroni-adjusted minimum p-value across the tested statistics.
    pub corrected_min_p: f64,
}

/// Test whether the law of the truncated summary at time `t` depends on how
/// initial mass is arranged inside the tail. `x_a` and `x_b` must agree on
/// coordinates below `k`. With `aggregated` set the paths follow the
/// `k`-aggregated dynamics, under which exact agreement is the prediction;
/// without it they follow the full dynamics as a sensitivity control.
pub fn pi_k_autonomy_test<E: ReplicateRunner>(
    x_a: &Profile,
    x_b: &Profile,
    p: &Params,
    k: usize,
    t: f64,
    dt: f64,
    replicates: usize,
    aggregated: bool,
    space: SeedSpace,
    runner: &E,
) -> Result<AutonomyReport, EstimateError> {
    const MIN_REPLICATES: usize = 100;
    assert_eq!(x_a.len(), x_b.len());
    assert!(k >= 1 && k <= p.d());
    assert!(
        x_a.freqs()[..k]
            .iter()
            .zip(&x_b.freqs()[..k])
            .all(|(a, b)| (a - b).abs() <= 1e-12),
        "initial conditions must agree below the aggregation rank"
    );
    if replicates < MIN_REPLICATES {
        return Err(EstimateError::StatisticalFloor {
            got: replicates as u64,
            needed: MIN_REPLICATES as u64,
        });
    }
    let steps = (t / dt).round().max(1.0) as u64;
    let kind = if aggregated { DriftKind::Aggregated(k) } else { DriftKind::Full };
    // the summary's law is a statement about the unstopped process, so
    // paths run through clicks
    let run_group = |start: &Profile, sub: SeedSpace| -> Vec<Vec<f64>> {
        runner.run(replicates, |i| {
            let mut rng = sub.rng(i as u64, 0);
            let mut core = StepCore::new(start.len());
            let mut state = start.freqs().to_vec();
            for _ in 0..steps {
                core.step(&mut state, p, kind, dt, &mut rng);
            }
            let head_mass: f64 = state[..k].iter().sum();
            let capped: f64 =
                state.iter().enumerate().map(|(c, &x)| c.min(k) as f64 * x).sum();
            let mut row = state[..k].to_vec();
            row.push(1.0 - head_mass);
            row.push(capped);
            row
        })
    };
    let group_a = run_group(x_a, space.derive(0));
    let group_b = run_group(x_b, space.derive(1));

    let coords = k + 2;
    let mut p_values = Vec::with_capacity(coords);
    for c in 0..coords {
        let a: Vec<f64> = group_a.iter().map(|r| r[c]).collect();
        let b: Vec<f64> = group_b.iter().map(|r| r[c]).collect();
        let (_, pv) = stats::ks_two_sample(a, b);
        p_values.push(pv);
    }
    let min_p = p_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AutonomyReport {
        p_values,
        min_p,
        corrected_min_p: (min_p * coords as f64).min(1.0),
    })
}

/// Mean, standard error of the mean, and variance of the mean mutation
/// load and of the fittest-class frequency over replicate paths.
#[derive(Debug, Clone, Copy)]
pub struct SummaryMoments {
    pub mean_m1: f64,
    pub se_m1: f64,
    pub var_m1: f64,
    pub mean_x0: f64,
    pub se_x0: f64,
    pub var_x0: f64,
}

fn summary_moments(m1: &[f64], x0: &[f64]) -> SummaryMoments {
    let (mean_m1, se_m1) = stats::mean_and_stderr(m1);
    let (mean_x0, se_x0) = stats::mean_and_stderr(x0);
    SummaryMoments {
        mean_m1,
        se_m1,
        var_m1: stats::variance(m1),
        mean_x0,
        se_x0,
        var_x0: stats::variance(x0),
    }
}

/// Individual-based model against its diffusion limit at matched times.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub t: f64,
    pub n: u64,
    pub discrete: SummaryMoments,
    pub diffusion: SummaryMoments,
    /// `|mean_disc - mean_diff| / mean_diff` for the mean load.
    pub rel_gap_m1: f64,
    /// Absolute gap of the fittest-class frequency means.
    pub gap_x0: f64,
    pub clicked_discrete: usize,
    pub clicked_diffusion: usize,
}

/// Compare the discrete model at population size `n` with the diffusion at
/// time `t`, both started from `x0` (the discrete state rounds `n x0` to
/// integer counts) and both run freely through clicks. Absorbing neither
/// process keeps the two laws comparable without conditioning.
pub fn discrete_vs_diffusion_compare<E: ReplicateRunner>(
    p: &Params,
    n: u64,
    x0: &Profile,
    t: f64,
    dt: f64,
    replicates: usize,
    space: SeedSpace,
    runner: &E,
) -> Result<CompareReport, EstimateError> {
    const MIN_REPLICATES: usize = 100;
    if replicates < MIN_REPLICATES {
        return Err(EstimateError::StatisticalFloor {
            got: replicates as u64,
            needed: MIN_REPLICATES as u64,
        });
    }
    let dp = DiscreteParams::from_diffusion(p, n).expect("diffusion params scale down");
    let gens = (n as f64 * t).round().max(1.0) as u64;
    let counts = integer_counts(x0.freqs(), n);
    let pop0 = DiscretePopulation::new(counts).expect("rounded counts keep the total");

    let disc = runner.run(replicates, |i| {
        let mut rng = space.derive(0).rng(i as u64, 0);
        let path = simulate_generations(&pop0, &dp, gens, &mut rng);
        let last = path.m1.len() - 1;
        (path.m1[last], path.fittest_fraction[last], path.click.clicked())
    });
    let steps = (t / dt).round().max(1.0) as u64;
    let diff = runner.run(replicates, |i| {
        let mut rng = space.derive(1).rng(i as u64, 0);
        let mut core = StepCore::new(x0.len());
        let mut state = x0.freqs().to_vec();
        let mut clicked = false;
        for _ in 0..steps {
            let out = core.step(&mut state, p, DriftKind::Full, dt, &mut rng);
            if out.pre_clip_x0 <= 0.0 {
                clicked = true;
            }
        }
        let m1: f64 = state.iter().enumerate().map(|(c, &x)| c as f64 * x).sum();
        (m1, state[0], clicked)
    });

    let take = |rows: &[(f64, f64, bool)]| -> (Vec<f64>, Vec<f64>, usize) {
        (
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
            rows.iter().filter(|r| r.2).count(),
        )
    };
    let (m1_disc, x0_disc, clicked_discrete) = take(&disc);
    let (m1_diff, x0_diff, clicked_diffusion) = take(&diff);
    let discrete = summary_moments(&m1_disc, &x0_disc);
    let diffusion = summary_moments(&m1_diff, &x0_diff);
    Ok(CompareReport {
        t,
        n,
        rel_gap_m1: (discrete.mean_m1 - diffusion.mean_m1).abs() / diffusion.mean_m1,
        gap_x0: (discrete.mean_x0 - diffusion.mean_x0).abs(),
        discrete,
        diffusion,
        clicked_discrete,
        clicked_diffusion,
    })
}

/// Round `n * freqs` to integer counts summing exactly to `n`, assigning
/// leftover individuals to the largest remainders.
pub fn integer_counts(freqs: &[f64], n: u64) -> Vec<u64> {
    let mut counts: Vec<u64> = Vec::with_capacity(freqs.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(freqs.len());
    let mut assigned: u64 = 0;
    for (i, &f) in freqs.iter().enumerate() {
        let exact = f * n as f64;
        let floor = exact.floor();
        counts.push(floor as u64);
        assigned += floor as u64;
        remainders.push((exact - floor, i));
    }
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("frequencies are finite"));
    let mut left = n - assigned;
    for &(_, i) in &remainders {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Descriptive statistics of a click-time sample, with a KS comparison of
/// the clicked times against the exponential law at the sample's own mean.
#[derive(Debug, Clone)]
pub struct ClickStats {
    pub clicked: usize,
    pub censored: usize,
    pub mean: f64,
    /// `(level, value)` pairs at 5%, 25%, 50%, 75%, 95%.
    pub quantiles: Vec<(f64, f64)>,
    pub ks_d: f64,
    /// With the rate fitted from the same sample this p-value is
    /// conservative; use an externally estimated rate for a calibrated test.
    pub ks_p: f64,
}

const CLICK_FLOOR: usize = 100;

pub fn click_statistics(clicks: &[ClickTime]) -> Result<ClickStats, EstimateError> {
    let mut times: Vec<f64> = clicks
        .iter()
        .filter(|c| c.clicked())
        .map(|c| c.time())
        .collect();
    if times.len() < CLICK_FLOOR {
        return Err(EstimateError::StatisticalFloor {
            got: times.len() as u64,
            needed: CLICK_FLOOR as u64,
        });
    }
    stats::sort(&mut times);
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let quantiles = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| (q, stats::quantile(&times, q)))
        .collect();
    let horizon = clicks
        .iter()
        .filter(|c| !c.clicked())
        .map(|c| c.time())
        .fold(f64::NAN, f64::max);
    let (ks_d, ks_p) = exponential_ks(&times, 1.0 / mean, horizon);
    Ok(ClickStats {
        clicked: times.len(),
        censored: clicks.len() - times.len(),
        mean,
        quantiles,
        ks_d,
        ks_p,
    })
}

/// KS distance and p-value of the clicked times against Exp(`rate`),
/// truncated at the censoring horizon when one is present. The rate must
/// come from an independent estimate for the p-value to be calibrated.
pub fn click_ks_against_rate(
    clicks: &[ClickTime],
    rate: f64,
) -> Result<(f64, f64), EstimateError> {
    assert!(rate > 0.0);
    let mut times: Vec<f64> = clicks
        .iter()
        .filter(|c| c.clicked())
        .map(|c| c.time())
        .collect();
    if times.len() < CLICK_FLOOR {
        return Err(EstimateError::StatisticalFloor {
            got: times.len() as u64,
            needed: CLICK_FLOOR as u64,
        });
    }
    stats::sort(&mut times);
    let horizon = clicks
        .iter()
        .filter(|c| !c.clicked())
        .map(|c| c.time())
        .fold(f64::NAN, f64::max);
    Ok(exponential_ks(&times, rate, horizon))
}

/// KS test of sorted times against an exponential with the given rate,
/// truncated at `horizon` when finite (the censored-sample case).
fn exponential_ks(sorted: &[f64], rate: f64, horizon: f64) -> (f64, f64) {
    let cdf: &dyn Fn(f64) -> f64 = if horizon.is_nan() {
        &|t: f64| 1.0 - (-rate * t).exp()
    } else {
        &|t: f64| {
            let full = 1.0 - (-rate * t).exp();
            let at_horizon = 1.0 - (-rate * horizon).exp();
            (full / at_horizon).min(1.0)
        }
    };
    let d = stats::ks_statistic_sorted(sorted, cdf);
    (d, stats::kolmogorov_pvalue(d, sorted.len() as f64))
}
