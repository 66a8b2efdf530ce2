//! Euler–Maruyama integration of the frequency diffusion on the simplex.
//!
//! One step adds the drift and a multinomial-resampling noise increment
//! built from independent normals through a shared compensator, then clips
//! roundoff excursions and renormalizes. The scheme keeps the exact
//! cross-coordinate covariance `x_i delta_ij - x_i x_j` and the zero-sum
//! identity of the increments; degenerate square-root diffusions admit no
//! standard higher-strong-order scheme without coordinate changes, so the
//! step is kept first-order and bias is controlled by step-halving checks.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dynamics::{self, drift_aggregated_into, drift_full_into};
use crate::error::{FlowError, KError, SimError};
use crate::params::Params;
use crate::profile::Profile;
use crate::trajectory::{ClickTime, StepStats, Trajectory};

/// Click detection policy. The only implemented mode declares a click when
/// the pre-clip value of coordinate 0 is `<= 0` at the end of a step, with
/// no sub-step interpolation: paths reach zero with square-root local
/// behavior, so interpolating would suggest false precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClickMode {
    #[default]
    PreClipSign,
}

/// Step size, horizon and recording policy for one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Record every this many steps (the initial and final states are
    /// always kept).
    pub record_stride: usize,
    pub click_mode: ClickMode,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_max: f64, record_stride: usize) -> Result<Self, FlowError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(FlowError::NonPositiveStep { dt });
        }
        if !(t_max >= dt) {
            return Err(FlowError::HorizonBeforeFirstStep { t_end: t_max, dt });
        }
        Ok(Self { dt, t_max, record_stride: record_stride.max(1), click_mode: ClickMode::PreClipSign })
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round().max(1.0) as usize
    }
}

/// Which drift field drives the noise-carrying coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DriftKind {
    Full,
    Aggregated(usize),
}

pub(crate) fn drift_into(x: &[f64], p: &Params, kind: DriftKind, out: &mut [f64]) {
    match kind {
        DriftKind::Full => drift_full_into(x, p, out),
        DriftKind::Aggregated(k) => drift_aggregated_into(x, p, k, out),
    }
}

/// Negative excursions at or below this are counted as instability events;
/// anything closer to zero is clipped silently as roundoff.
pub(crate) const CLIP_INSTABILITY_TOL: f64 = -1e-8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepOutcome {
    /// Coordinate 0 after the raw increment, before clipping.
    pub pre_clip_x0: f64,
    pub clipped: bool,
    pub unstable: bool,
}

/// Apply the noise-and-drift update in place given the drift and the
/// standard normals for this step, then clip and renormalize.
pub(crate) fn diffuse_in_place(x: &mut [f64], drift: &[f64], xi: &[f64], dt: f64) -> StepOutcome {
    let sqrt_dt = dt.sqrt();
    let mut w = 0.0;
    for j in 0..x.len() {
        w += x[j].sqrt() * xi[j];
    }
    let mut pre_clip_x0 = 0.0;
    let mut clipped = false;
    let mut unstable = false;
    for i in 0..x.len() {
        let y = x[i] + drift[i] * dt + sqrt_dt * (x[i].sqrt() * xi[i] - x[i] * w);
        if i == 0 {
            pre_clip_x0 = y;
        }
        x[i] = if y < 0.0 {
            if y <= CLIP_INSTABILITY_TOL {
                unstable = true;
            }
            clipped = true;
            0.0
        } else if y > 1.0 {
            clipped = true;
            1.0
        } else {
            y
        };
    }
    // clipping keeps the mass near 1 (pre-clip increments sum to 0), so
    // the renormalization below is always well defined
    let mass: f64 = x.iter().sum();
    for v in x.iter_mut() {
        *v /= mass;
    }
    StepOutcome { pre_clip_x0, clipped, unstable }
}

/// Scratch buffers for repeated stepping without per-step allocation.
pub(crate) struct StepCore {
    drift: Vec<f64>,
    xi: Vec<f64>,
}

impl StepCore {
    pub(crate) fn new(len: usize) -> Self {
        Self { drift: alloc::vec![0.0; len], xi: alloc::vec![0.0; len] }
    }

    /// One step: fresh normals (one per coordinate, in coordinate order),
    /// drift of the requested kind, then the in-place diffusion update.
    pub(crate) fn step<R: Rng + ?Sized>(
        &mut self,
        x: &mut [f64],
        p: &Params,
        kind: DriftKind,
        dt: f64,
        rng: &mut R,
    ) -> StepOutcome {
        for z in self.xi.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        drift_into(x, p, kind, &mut self.drift);
        diffuse_in_place(x, &self.drift, &self.xi, dt)
    }
}

/// One Euler–Maruyama step from a validated state. Returns the new state
/// and the pre-clip value of coordinate 0 (the click detector input).
pub fn euler_step<R: Rng + ?Sized>(
    x: &Profile,
    p: &Params,
    dt: f64,
    rng: &mut R,
) -> (Profile, f64) {
    let mut core = StepCore::new(x.len());
    let mut state = x.freqs().to_vec();
    let out = core.step(&mut state, p, DriftKind::Full, dt, rng);
    (Profile::from_normalized(state), out.pre_clip_x0)
}

/// Deterministic step with caller-supplied normals; `xi` must have one
/// entry per coordinate. With `xi = 0` this is a forward-Euler drift step.
pub fn euler_step_with_noise(x: &Profile, p: &Params, dt: f64, xi: &[f64]) -> (Profile, f64) {
    assert_eq!(xi.len(), x.len(), "one normal per coordinate");
    let mut drift = alloc::vec![0.0; x.len()];
    drift_into(x.freqs(), p, DriftKind::Full, &mut drift);
    let mut state = x.freqs().to_vec();
    let out = diffuse_in_place(&mut state, &drift, xi, dt);
    (Profile::from_normalized(state), out.pre_clip_x0)
}

fn simulate_kind<R: Rng + ?Sized>(
    x0: &Profile,
    p: &Params,
    kind: DriftKind,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, SimError> {
    if !(x0.fittest() > 0.0) {
        return Err(SimError::InvalidStart);
    }
    let ClickMode::PreClipSign = cfg.click_mode;
    let n_steps = cfg.steps();
    let stride = cfg.record_stride;
    let mut core = StepCore::new(x0.len());
    let mut state = x0.freqs().to_vec();
    let mut stats = StepStats::default();

    let mut times = Vec::with_capacity(n_steps / stride + 2);
    let mut states = Vec::with_capacity(n_steps / stride + 2);
    times.push(0.0);
    states.push(x0.clone());
    let mut last_recorded = 0usize;
    let mut click = ClickTime::Censored(cfg.t_max);

    for step in 1..=n_steps {
        let out = core.step(&mut state, p, kind, cfg.dt, rng);
        stats.steps += 1;
        if out.clipped {
            stats.clipped_steps += 1;
        }
        if out.unstable {
            stats.instability_events += 1;
        }
        let t = step as f64 * cfg.dt;
        let clicked = out.pre_clip_x0 <= 0.0;
        if clicked || step == n_steps || step % stride == 0 {
            times.push(t);
            states.push(Profile::from_normalized(state.clone()));
            last_recorded = step;
        }
        if clicked {
            click = ClickTime::Clicked(t);
            break;
        }
    }
    let _ = last_recorded;

    Ok(Trajectory { times, states, click, stats })
}

/// Simulate the full dynamics from `x0` until click or the horizon.
pub fn simulate_path<R: Rng + ?Sized>(
    x0: &Profile,
    p: &Params,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, SimError> {
    simulate_kind(x0, p, DriftKind::Full, cfg, rng)
}

/// Simulate the aggregated dynamics of rank `k` (classes above `k` merged
/// in the selection term) from `x0` until click or the horizon.
pub fn simulate_aggregated_path<R: Rng + ?Sized>(
    x0: &Profile,
    p: &Params,
    k: usize,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Trajectory, SimError> {
    let d = x0.dim();
    if k == 0 || k > d {
        return Err(SimError::InvalidK(KError { k, d }));
    }
    simulate_kind(x0, p, DriftKind::Aggregated(k), cfg, rng)
}

/// One-step Monte Carlo check of the moment dynamics: compares the
/// empirical drift and variance of `M_k` over independent single steps
/// against their analytic densities.
#[derive(Debug, Clone, Copy)]
pub struct MomentDriftReport {
    pub k: u32,
    pub analytic_drift: f64,
    pub empirical_drift: f64,
    pub drift_stderr: f64,
    pub analytic_qv: f64,
    pub empirical_qv: f64,
    pub qv_stderr: f64,
}

impl MomentDriftReport {
    /// Largest deviation between empirical and analytic values, in units
    /// of the respective standard errors.
    pub fn max_sigma(&self) -> f64 {
        let ds = (self.empirical_drift - self.analytic_drift).abs() / self.drift_stderr;
        let qs = (self.empirical_qv - self.analytic_qv).abs() / self.qv_stderr;
        ds.max(qs)
    }
}

pub fn moment_drift_check<R: Rng + ?Sized>(
    x: &Profile,
    p: &Params,
    k: u32,
    replicates: usize,
    dt: f64,
    rng: &mut R,
) -> MomentDriftReport {
    let mk0 = x.moment(k);
    let mut core = StepCore::new(x.len());
    let mut deltas = Vec::with_capacity(replicates);
    let mut state = alloc::vec![0.0; x.len()];
    for _ in 0..replicates {
        state.copy_from_slice(x.freqs());
        core.step(&mut state, p, DriftKind::Full, dt, rng);
        let mk: f64 = state.iter().enumerate().map(|(i, &v)| (i as f64).powi(k as i32) * v).sum();
        deltas.push(mk - mk0);
    }
    let n = replicates as f64;
    let mean = deltas.iter().sum::<f64>() / n;
    let var = deltas.iter().map(|&d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = deltas.iter().map(|&d| (d - mean).powi(4)).sum::<f64>() / n;
    // standard error of the sample variance without normality assumptions
    let var_of_var = (m4 - var * var * (n - 3.0) / (n - 1.0)) / n;

    MomentDriftReport {
        k,
        analytic_drift: dynamics::moment_velocity(x, p, k),
        empirical_drift: mean / dt,
        drift_stderr: (var / n).sqrt() / dt,
        analytic_qv: dynamics::moment_qv_density(x, k),
        empirical_qv: var / dt,
        qv_stderr: var_of_var.max(0.0).sqrt() / dt,
    }
}
