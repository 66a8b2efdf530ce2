//! Quasi-stationary inference: the law of the process conditioned on not
//! having clicked, its extinction rate, and the survival capacity.
//!
//! Two complementary estimators are provided. The conditioned ensemble
//! evolves independent particles and drops the clicked ones; it is unbiased
//! but loses particles exponentially fast, so it only works over short
//! horizons. The Fleming–Viot system restarts every clicked particle from
//! a surviving one; its empirical law stabilizes near the conditioned law
//! and its restart rate estimates the clicking rate, at the price of an
//! O(1/particles) interaction bias.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::diffusion::{DriftKind, IntegratorConfig, StepCore};
use crate::error::{EnsembleError, EstimateError};
use crate::params::Params;
use crate::profile::Profile;
use crate::stats::{self, RateEstimate};
use crate::stream::{ReplicateRunner, SeedSpace};
use crate::trajectory::{ClickTime, StepStats, Trajectory};

/// A weighted set of simplex states approximating the conditioned law.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    particles: Vec<Profile>,
    weights: Vec<f64>,
    time: f64,
    resample_events: u64,
}

impl ParticleEnsemble {
    /// Uniformly weighted ensemble.
    pub fn uniform(particles: Vec<Profile>, time: f64) -> Result<Self, EnsembleError> {
        if particles.is_empty() {
            return Err(EnsembleError::TooFewParticles { got: 0 });
        }
        let dim = particles[0].len();
        assert!(particles.iter().all(|p| p.len() == dim), "mixed particle dimensions");
        let w = 1.0 / particles.len() as f64;
        let weights = alloc::vec![w; particles.len()];
        Ok(Self { particles, weights, time, resample_events: 0 })
    }

    /// `m` copies of one state.
    pub fn replicated(x0: &Profile, m: usize) -> Result<Self, EnsembleError> {
        Self::uniform(alloc::vec![x0.clone(); m], 0.0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    #[inline]
    pub fn particles(&self) -> &[Profile] {
        &self.particles
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    #[inline]
    pub fn resample_events(&self) -> u64 {
        self.resample_events
    }

    /// Weighted mean and naive (independence-assuming) standard error of a
    /// functional over the ensemble.
    pub fn functional_mean(&self, f: impl Fn(&Profile) -> f64) -> (f64, f64) {
        let values: Vec<f64> = self.particles.iter().map(f).collect();
        let mean: f64 = values.iter().zip(&self.weights).map(|(&v, &w)| v * w).sum();
        let var: f64 =
            values.iter().zip(&self.weights).map(|(&v, &w)| w * (v - mean).powi(2)).sum();
        (mean, (var / values.len() as f64).sqrt())
    }

    /// Mean and naive standard error of `M_k` under the ensemble.
    pub fn moment_estimate(&self, k: u32) -> MomentEstimate {
        let (mean, stderr) = self.functional_mean(|p| p.moment(k));
        MomentEstimate { k, mean, stderr }
    }

    /// `(x0, m1)` summary points, the binning coordinates for
    /// total-variation comparisons.
    pub fn summary_points(&self) -> Vec<(f64, f64)> {
        self.particles.iter().map(|p| (p.fittest(), p.mean())).collect()
    }
}

/// Mean of `M_k` under an estimated law, with a standard error that treats
/// particles as independent (a lower bound under ensemble correlations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub k: u32,
    pub mean: f64,
    pub stderr: f64,
}

/// Survivor counts out of `total` replicates on a time grid.
#[derive(Debug, Clone)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survivors: Vec<u64>,
    pub total: u64,
}

impl SurvivalCurve {
    /// Build from per-replicate click observations. Every censoring horizon
    /// must reach the last grid time, otherwise survival there is unknown.
    pub fn from_click_times(clicks: &[ClickTime], grid: &[f64]) -> Self {
        assert!(!grid.is_empty());
        let t_last = *grid.last().unwrap();
        let mut survivors = alloc::vec![0u64; grid.len()];
        for c in clicks {
            match *c {
                ClickTime::Clicked(t) => {
                    for (j, &g) in grid.iter().enumerate() {
                        if t > g {
                            survivors[j] += 1;
                        }
                    }
                }
                ClickTime::Censored(h) => {
                    assert!(
                        h >= t_last,
                        "censoring horizon {h} shorter than the grid end {t_last}"
                    );
                    for s in survivors.iter_mut() {
                        *s += 1;
                    }
                }
            }
        }
        Self { times: grid.to_vec(), survivors, total: clicks.len() as u64 }
    }

    pub fn fraction(&self, j: usize) -> f64 {
        self.survivors[j] as f64 / self.total as f64
    }
}

/// Weighted least-squares decay rate of a survival curve on a window,
/// with a bootstrap standard error (resampling replicates, 200 rounds).
pub fn estimate_rho0<R: Rng + ?Sized>(
    sc: &SurvivalCurve,
    window: (f64, f64),
    rng: &mut R,
) -> Result<RateEstimate, EstimateError> {
    const MIN_POINTS: usize = 4;
    const FLOOR: u64 = 50;
    const RESAMPLES: usize = 200;

    let fit = fit_log_survival(&sc.times, &sc.survivors, sc.total, window, MIN_POINTS, FLOOR)?;

    // bootstrap: clicks fall into inter-grid interval categories (plus the
    // survivor category), so resampling replicates is a multinomial redraw
    // of those categories
    let mut categories = Vec::with_capacity(sc.times.len() + 1);
    let mut prev = sc.total;
    for &s in &sc.survivors {
        categories.push((prev - s) as f64);
        prev = s;
    }
    categories.push(prev as f64);

    let mut counts = alloc::vec![0u64; categories.len()];
    let mut slopes = Vec::with_capacity(RESAMPLES);
    let mut survivors = alloc::vec![0u64; sc.times.len()];
    for _ in 0..RESAMPLES {
        stats::multinomial_counts(rng, sc.total, &categories, &mut counts);
        let mut alive = sc.total;
        for j in 0..sc.times.len() {
            alive -= counts[j];
            survivors[j] = alive;
        }
        if let Ok(f) = fit_log_survival(&sc.times, &survivors, sc.total, window, MIN_POINTS, FLOOR)
        {
            slopes.push(f);
        }
    }
    if slopes.len() < RESAMPLES / 2 {
        return Err(EstimateError::StatisticalFloor {
            got: slopes.len() as u64,
            needed: (RESAMPLES / 2) as u64,
        });
    }
    let stderr = stats::variance(&slopes).sqrt();
    Ok(RateEstimate { value: fit, stderr })
}

fn fit_log_survival(
    times: &[f64],
    survivors: &[u64],
    total: u64,
    window: (f64, f64),
    min_points: usize,
    floor: u64,
) -> Result<f64, EstimateError> {
    let n = total as f64;
    let mut t = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    let mut first_in_window = None;
    for j in 0..times.len() {
        if times[j] < window.0 || times[j] > window.1 {
            continue;
        }
        if first_in_window.is_none() {
            first_in_window = Some(survivors[j]);
        }
        if survivors[j] == 0 {
            continue;
        }
        let s = survivors[j] as f64 / n;
        t.push(times[j]);
        y.push(-s.ln());
        // inverse variance of -ln(S-hat), clamped at half an observation
        w.push(n * s / (1.0 - s).max(0.5 / n));
    }
    match first_in_window {
        None => return Err(EstimateError::WindowTooThin { points: 0, needed: min_points }),
        Some(s0) if s0 < floor => {
            return Err(EstimateError::StatisticalFloor { got: s0, needed: floor })
        }
        _ => {}
    }
    if t.len() < min_points {
        return Err(EstimateError::WindowTooThin { points: t.len(), needed: min_points });
    }
    stats::weighted_line_fit(&t, &y, &w)
        .map(|f| f.slope)
        .ok_or(EstimateError::WindowTooThin { points: t.len(), needed: min_points })
}

/// Final state of one path run to a horizon with click detection.
struct HorizonRun {
    state: Vec<f64>,
    click_step: Option<u64>,
    stats: StepStats,
}

fn run_to_horizon<R: Rng + ?Sized>(
    start: &[f64],
    p: &Params,
    kind: DriftKind,
    dt: f64,
    steps: u64,
    rng: &mut R,
) -> HorizonRun {
    let mut core = StepCore::new(start.len());
    let mut state = start.to_vec();
    let mut stats = StepStats::default();
    let mut click_step = None;
    for step in 1..=steps {
        let out = core.step(&mut state, p, kind, dt, rng);
        stats.steps += 1;
        if out.clipped {
            stats.clipped_steps += 1;
        }
        if out.unstable {
            stats.instability_events += 1;
        }
        if out.pre_clip_x0 <= 0.0 {
            click_step = Some(step);
            break;
        }
    }
    HorizonRun { state, click_step, stats }
}

/// Record grid for a run of `steps` steps: every `stride` steps plus the
/// final step.
fn record_grid(steps: u64, stride: u64, dt: f64) -> Vec<f64> {
    let mut grid: Vec<f64> =
        (1..=steps / stride).map(|j| (j * stride) as f64 * dt).collect();
    if steps % stride != 0 || grid.is_empty() {
        grid.push(steps as f64 * dt);
    }
    grid
}

/// Outcome of evolving an ensemble conditioned on survival.
#[derive(Debug, Clone)]
pub struct ConditionedEvolution {
    pub ensemble: ParticleEnsemble,
    pub survival: SurvivalCurve,
    pub clicks: Vec<ClickTime>,
    pub stats: StepStats,
}

/// Evolve every particle independently over `horizon`, drop the clicked
/// ones, and renormalize the surviving weights (all uniform here).
pub fn conditioned_ensemble_evolve<E: ReplicateRunner>(
    e: &ParticleEnsemble,
    p: &Params,
    cfg: &IntegratorConfig,
    horizon: f64,
    space: SeedSpace,
    runner: &E,
) -> Result<ConditionedEvolution, EnsembleError> {
    if e.is_empty() {
        return Err(EnsembleError::TooFewParticles { got: 0 });
    }
    let steps = (horizon / cfg.dt).round() as u64;
    if steps == 0 {
        let grid = alloc::vec![0.0];
        let clicks = alloc::vec![ClickTime::Censored(0.0); e.len()];
        return Ok(ConditionedEvolution {
            ensemble: e.clone(),
            survival: SurvivalCurve::from_click_times(&clicks, &grid),
            clicks,
            stats: StepStats::default(),
        });
    }
    let particles = e.particles();
    let runs = runner.run(e.len(), |i| {
        let mut rng = space.rng(i as u64, 0);
        run_to_horizon(particles[i].freqs(), p, DriftKind::Full, cfg.dt, steps, &mut rng)
    });

    let mut clicks = Vec::with_capacity(runs.len());
    let mut survivors = Vec::new();
    let mut stats = StepStats::default();
    for run in &runs {
        stats.merge(&run.stats);
        match run.click_step {
            Some(s) => clicks.push(ClickTime::Clicked(s as f64 * cfg.dt)),
            None => {
                clicks.push(ClickTime::Censored(horizon));
                survivors.push(Profile::from_normalized(run.state.clone()));
            }
        }
    }
    let grid = record_grid(steps, cfg.record_stride as u64, cfg.dt);
    let survival = SurvivalCurve::from_click_times(&clicks, &grid);
    if survivors.is_empty() {
        return Err(EnsembleError::Extinct);
    }
    let mut ensemble = ParticleEnsemble::uniform(survivors, e.time() + horizon)?;
    ensemble.resample_events = e.resample_events;
    Ok(ConditionedEvolution { ensemble, survival, clicks, stats })
}

/// Equilibration log of a Fleming–Viot run: cumulative restarts and
/// ensemble summaries on the record grid.
#[derive(Debug, Clone)]
pub struct FvLog {
    pub times: Vec<f64>,
    pub cumulative_restarts: Vec<u64>,
    pub mean_x0: Vec<f64>,
    pub mean_m1: Vec<f64>,
    pub stats: StepStats,
}

impl FvLog {
    /// Restart rate per particle per unit time over `[t_lo, t_hi]`, with a
    /// Poisson standard error.
    pub fn restart_rate(&self, t_lo: f64, t_hi: f64, particles: usize) -> RateEstimate {
        let at = |t: f64| -> u64 {
            match self.times.partition_point(|&s| s <= t).checked_sub(1) {
                Some(j) => self.cumulative_restarts[j],
                None => 0,
            }
        };
        let events = at(t_hi).saturating_sub(at(t_lo));
        let exposure = particles as f64 * (t_hi - t_lo);
        RateEstimate {
            value: events as f64 / exposure,
            stderr: (events as f64).sqrt().max(1.0) / exposure,
        }
    }
}

/// Evolve an interacting ensemble over `horizon`: every particle advances
/// one step per epoch, and each particle that clicked during the epoch
/// restarts from the end-of-epoch state of a uniformly chosen survivor.
/// Restart draws use the clicked particle's own stream, so the result does
/// not depend on scheduling order.
pub fn fleming_viot_evolve<E: ReplicateRunner>(
    e: &ParticleEnsemble,
    p: &Params,
    cfg: &IntegratorConfig,
    horizon: f64,
    space: SeedSpace,
    runner: &E,
) -> Result<(ParticleEnsemble, FvLog), EnsembleError> {
    if e.len() < 2 {
        return Err(EnsembleError::TooFewParticles { got: e.len() });
    }
    let steps = (horizon / cfg.dt).round() as u64;
    let mut states: Vec<Vec<f64>> = e.particles().iter().map(|p| p.freqs().to_vec()).collect();
    let mut restarts: u64 = 0;
    let mut log = FvLog {
        times: Vec::new(),
        cumulative_restarts: Vec::new(),
        mean_x0: Vec::new(),
        mean_m1: Vec::new(),
        stats: StepStats::default(),
    };

    for epoch in 1..=steps {
        let mut advanced = runner.run(states.len(), |i| {
            let mut rng = space.rng(i as u64, epoch);
            let mut state = states[i].clone();
            let mut core = StepCore::new(state.len());
            let out = core.step(&mut state, p, DriftKind::Full, cfg.dt, &mut rng);
            (state, out, rng)
        });

        let m = advanced.len();
        let mut survivor_idx = Vec::with_capacity(m);
        for (i, (_, out, _)) in advanced.iter().enumerate() {
            log.stats.steps += 1;
            if out.clipped {
                log.stats.clipped_steps += 1;
            }
            if out.unstable {
                log.stats.instability_events += 1;
            }
            if out.pre_clip_x0 > 0.0 {
                survivor_idx.push(i);
            }
        }
        if survivor_idx.is_empty() {
            return Err(EnsembleError::Extinct);
        }

        // each clicked particle picks its restart partner with its own
        // stream, continued past the step's noise draws
        let mut picks: Vec<Option<usize>> = alloc::vec![None; m];
        for i in 0..m {
            if advanced[i].1.pre_clip_x0 <= 0.0 {
                let r = advanced[i].2.gen_range(0..survivor_idx.len());
                picks[i] = Some(survivor_idx[r]);
                restarts += 1;
            }
        }
        // copy survivor states into clicked slots before moving anything
        let mut next: Vec<Vec<f64>> = alloc::vec![Vec::new(); m];
        for i in 0..m {
            if let Some(pick) = picks[i] {
                debug_assert_ne!(pick, i);
                next[i] = advanced[pick].0.clone();
            }
        }
        for i in 0..m {
            if picks[i].is_none() {
                next[i] = core::mem::take(&mut advanced[i].0);
            }
        }
        states = next;

        if epoch % cfg.record_stride as u64 == 0 || epoch == steps {
            let t = e.time() + epoch as f64 * cfg.dt;
            let m = states.len() as f64;
            let mut x0 = 0.0;
            let mut m1 = 0.0;
            for s in &states {
                x0 += s[0];
                m1 += s.iter().enumerate().map(|(i, &v)| i as f64 * v).sum::<f64>();
            }
            log.times.push(t);
            log.cumulative_restarts.push(restarts);
            log.mean_x0.push(x0 / m);
            log.mean_m1.push(m1 / m);
        }
    }

    let particles: Vec<Profile> =
        states.into_iter().map(Profile::from_normalized).collect();
    let mut ensemble = ParticleEnsemble::uniform(particles, e.time() + horizon)?;
    ensemble.resample_events = e.resample_events() + restarts;
    Ok((ensemble, log))
}

/// Survival capacity estimate from one initial state: the compensated
/// survival probability `exp(rho0 t) P_x(t < click)` on the record grid.
#[derive(Debug, Clone)]
pub struct EtaCurve {
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
    /// Binomial standard error of each curve point.
    pub stderr: Vec<f64>,
    pub survivors: Vec<u64>,
    pub total: u64,
    /// Grid index where the plateau window starts.
    pub plateau_start: usize,
    pub plateau_value: f64,
    /// Standard error at the last usable grid point; curve points are
    /// strongly correlated, so the window mean is not treated as averaging
    /// independent observations.
    pub plateau_stderr: f64,
}

/// Estimate the survival capacity of `x` by compensating its survival
/// curve with the given clicking rate. The curve should level off once the
/// conditioned law has relaxed; the plateau is read from the second half
/// of the usable grid (survivor count at least 50).
pub fn estimate_eta<E: ReplicateRunner>(
    x: &Profile,
    p: &Params,
    rho0: f64,
    cfg: &IntegratorConfig,
    replicates: usize,
    space: SeedSpace,
    runner: &E,
) -> Result<EtaCurve, EstimateError> {
    const FLOOR: u64 = 50;
    let steps = cfg.steps() as u64;
    let state = x.freqs();
    let clicks = runner.run(replicates, |i| {
        let mut rng = space.rng(i as u64, 0);
        run_to_horizon(state, p, DriftKind::Full, cfg.dt, steps, &mut rng)
            .click_step
            .map(|s| s as f64 * cfg.dt)
    });
    let clicks: Vec<ClickTime> = clicks
        .into_iter()
        .map(|c| match c {
            Some(t) => ClickTime::Clicked(t),
            None => ClickTime::Censored(cfg.t_max),
        })
        .collect();
    let grid = record_grid(steps, cfg.record_stride as u64, cfg.dt);
    let sc = SurvivalCurve::from_click_times(&clicks, &grid);

    let usable = sc.survivors.iter().take_while(|&&s| s >= FLOOR).count();
    if usable < 4 {
        return Err(EstimateError::StatisticalFloor {
            got: sc.survivors.get(usable).copied().unwrap_or(0),
            needed: FLOOR,
        });
    }
    let n = sc.total as f64;
    let mut eta = Vec::with_capacity(usable);
    let mut stderr = Vec::with_capacity(usable);
    for j in 0..usable {
        let s = sc.fraction(j);
        let boost = (rho0 * sc.times[j]).exp();
        eta.push(boost * s);
        stderr.push(boost * (s * (1.0 - s) / n).sqrt());
    }
    let plateau_start = usable / 2;
    let mut wsum = 0.0;
    let mut vsum = 0.0;
    for j in plateau_start..usable {
        let w = 1.0 / stderr[j].powi(2).max(1e-300);
        wsum += w;
        vsum += w * eta[j];
    }
    Ok(EtaCurve {
        times: grid[..usable].to_vec(),
        survivors: sc.survivors[..usable].to_vec(),
        total: sc.total,
        plateau_value: vsum / wsum,
        plateau_stderr: stderr[usable - 1],
        plateau_start,
        eta,
        stderr,
    })
}

/// Paths accepted by conditioning on survival beyond a guarded horizon;
/// their law on `[0, t]` approximates the process conditioned never to
/// click, the approximation improving with the guard.
#[derive(Debug, Clone)]
pub struct QProcessSample {
    pub paths: Vec<Trajectory>,
    pub accepted: usize,
    pub attempted: usize,
    pub acceptance: f64,
}

/// Rejection sampler for the conditioned-forever process: simulate to
/// `t + guard`, keep paths that never click, truncate them to `[0, t]`.
pub fn sample_qprocess<E: ReplicateRunner>(
    x0: &Profile,
    p: &Params,
    t: f64,
    guard: f64,
    cfg: &IntegratorConfig,
    replicates: usize,
    space: SeedSpace,
    runner: &E,
) -> Result<QProcessSample, EstimateError> {
    const FLOOR: usize = 50;
    let horizon = t + guard;
    let run_cfg = IntegratorConfig { t_max: horizon, ..*cfg };
    let paths = runner.run(replicates, |i| {
        let mut rng = space.rng(i as u64, 0);
        crate::diffusion::simulate_path(x0, p, &run_cfg, &mut rng)
            .expect("validated start state")
    });
    let mut accepted = Vec::new();
    for path in paths {
        if path.click.clicked() {
            continue;
        }
        let cut = path.times.partition_point(|&s| s <= t);
        accepted.push(Trajectory {
            times: path.times[..cut].to_vec(),
            states: path.states[..cut].to_vec(),
            click: ClickTime::Censored(t),
            stats: path.stats,
        });
    }
    if accepted.len() < FLOOR {
        return Err(EstimateError::StatisticalFloor {
            got: accepted.len() as u64,
            needed: FLOOR as u64,
        });
    }
    let acceptance = accepted.len() as f64 / replicates as f64;
    Ok(QProcessSample { accepted: accepted.len(), attempted: replicates, acceptance, paths: accepted })
}

/// Stationarity check of an estimated quasi-stationary ensemble: evolving
/// it conditioned on survival should not move its binned summary law.
#[derive(Debug, Clone)]
pub struct PushforwardReport {
    pub tv: stats::TvEstimate,
    pub survivors: usize,
    pub total: usize,
    pub delta_t: f64,
}

pub fn qsd_pushforward_check<E: ReplicateRunner>(
    e: &ParticleEnsemble,
    p: &Params,
    delta_t: f64,
    cfg: &IntegratorConfig,
    bins: usize,
    permutations: usize,
    space: SeedSpace,
    runner: &E,
) -> Result<PushforwardReport, EnsembleError> {
    if delta_t == 0.0 {
        return Ok(PushforwardReport {
            tv: stats::TvEstimate { raw: 0.0, null_mean: 0.0, null_sd: 0.0, corrected: 0.0 },
            survivors: e.len(),
            total: e.len(),
            delta_t,
        });
    }
    let evolved = conditioned_ensemble_evolve(e, p, cfg, delta_t, space, runner)?;
    let before = e.summary_points();
    let after = evolved.ensemble.summary_points();
    let pooled: Vec<(f64, f64)> = before.iter().chain(after.iter()).copied().collect();
    let grid = stats::QuantileGrid2::from_pooled(&pooled, bins);
    let mut perm_rng = space.derive(1).rng(0, 0);
    let tv = stats::debiased_binned_tv(
        &grid.bin_all(&before),
        &grid.bin_all(&after),
        grid.n_bins(),
        permutations,
        &mut perm_rng,
    );
    Ok(PushforwardReport { tv, survivors: after.len(), total: e.len(), delta_t })
}

/// Click observations for fresh paths started from a pool of states
/// (cycled when `replicates` exceeds the pool).
pub fn click_times_from_starts<E: ReplicateRunner>(
    starts: &[Profile],
    p: &Params,
    cfg: &IntegratorConfig,
    replicates: usize,
    space: SeedSpace,
    runner: &E,
) -> Vec<ClickTime> {
    assert!(!starts.is_empty());
    let steps = cfg.steps() as u64;
    runner.run(replicates, |i| {
        let mut rng = space.rng(i as u64, 0);
        let start = starts[i % starts.len()].freqs();
        match run_to_horizon(start, p, DriftKind::Full, cfg.dt, steps, &mut rng).click_step {
            Some(s) => ClickTime::Clicked(s as f64 * cfg.dt),
            None => ClickTime::Censored(cfg.t_max),
        }
    })
}

/// Bundle of quasi-stationary estimates for one configuration.
#[derive(Debug, Clone)]
pub struct QsdEstimate {
    pub ensemble: ParticleEnsemble,
    /// Clicking rate from the Fleming–Viot restart rate.
    pub rho0: RateEstimate,
    /// Independent clicking rate from the survival-slope route, when run.
    pub rho0_slope: Option<RateEstimate>,
    pub eta: Option<EtaCurve>,
    /// `M_1..M_4` under the estimated law.
    pub moments: Vec<MomentEstimate>,
}

impl QsdEstimate {
    pub fn new(ensemble: ParticleEnsemble, rho0: RateEstimate) -> Self {
        let moments = (1..=4).map(|k| ensemble.moment_estimate(k)).collect();
        Self { ensemble, rho0, rho0_slope: None, eta: None, moments }
    }

    /// Mean time between clicks implied by the clicking rate.
    pub fn t_click(&self) -> f64 {
        1.0 / self.rho0.value
    }
}
