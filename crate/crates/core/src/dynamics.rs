//! Noise-free dynamics of the mutation-class frequencies: drift fields,
//! the instantaneous noise covariance, the Poisson equilibrium, and the
//! deterministic flow.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{FlowError, KError};
use crate::params::Params;
use crate::profile::Profile;
use crate::trajectory::{ClickTime, StepStats, Trajectory};

/// Mean of the raw frequency slice, `sum_i i x_i`.
fn mean_of(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, &v)| i as f64 * v).sum()
}

/// Selection-plus-mutation drift on a raw slice. Selection pulls each class
/// toward the current mean fitness; mutation moves mass one class up, with
/// no outflow from the top class (the truncation absorbs it).
pub(crate) fn drift_full_into(x: &[f64], p: &Params, out: &mut [f64]) {
    let d = x.len() - 1;
    let m1 = mean_of(x);
    let (alpha, lambda) = (p.alpha(), p.lambda());
    for i in 0..=d {
        let inflow = if i == 0 { 0.0 } else { x[i - 1] };
        let outflow = if i < d { x[i] } else { 0.0 };
        out[i] = alpha * (m1 - i as f64) * x[i] + lambda * (inflow - outflow);
    }
}

/// Aggregated-dynamics drift on a raw slice: selection couples to the
/// capped count `i min k` instead of `i`.
pub(crate) fn drift_aggregated_into(x: &[f64], p: &Params, k: usize, out: &mut [f64]) {
    let d = x.len() - 1;
    let m1k: f64 = x.iter().enumerate().map(|(i, &v)| i.min(k) as f64 * v).sum();
    let (alpha, lambda) = (p.alpha(), p.lambda());
    for i in 0..=d {
        let inflow = if i == 0 { 0.0 } else { x[i - 1] };
        let outflow = if i < d { x[i] } else { 0.0 };
        out[i] = alpha * (m1k - i.min(k) as f64) * x[i] + lambda * (inflow - outflow);
    }
}

/// Drift of the full dynamics,
/// `drift_i = alpha (M_1 - i) x_i + lambda (x_{i-1} - 1_{i<d} x_i)`.
/// The entries sum to zero.
pub fn drift_full(x: &Profile, p: &Params) -> Vec<f64> {
    let mut out = alloc::vec![0.0; x.len()];
    drift_full_into(x.freqs(), p, &mut out);
    out
}

/// Drift of the aggregated dynamics: selection acts on the capped count
/// `i min k` against the capped mean, mutation is unchanged.
pub fn drift_aggregated(x: &Profile, p: &Params, k: usize) -> Result<Vec<f64>, KError> {
    let d = x.dim();
    if k == 0 || k > d {
        return Err(KError { k, d });
    }
    let mut out = alloc::vec![0.0; d + 1];
    drift_aggregated_into(x.freqs(), p, k, &mut out);
    Ok(out)
}

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    order: usize,
    data: Vec<f64>,
}

impl Covariance {
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Instantaneous covariance of the multinomial resampling noise per unit
/// time, `C_ij = x_i delta_ij - x_i x_j`. Positive semidefinite; rows sum
/// to zero on the simplex.
pub fn wf_covariance(x: &Profile) -> Covariance {
    let n = x.len();
    let xs = x.freqs();
    let mut data = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let kronecker = if i == j { xs[i] } else { 0.0 };
            data[i * n + j] = kronecker - xs[i] * xs[j];
        }
    }
    Covariance { order: n, data }
}

/// Equilibrium of the noise-free dynamics: Poisson weights with mean
/// `lambda/alpha` on classes `0..d`, with the untruncated tail collapsed
/// into class `d`. Saturation (rather than renormalization) keeps the mean
/// at most `lambda/alpha` and matches the truncated mutation flux.
pub fn poisson_profile(p: &Params) -> Profile {
    let d = p.d();
    let n_star = p.n_star();
    let mut freqs = Vec::with_capacity(d + 1);
    let mut w = (-n_star).exp();
    let mut head = 0.0;
    for i in 0..d {
        freqs.push(w);
        head += w;
        w *= n_star / (i + 1) as f64;
    }
    freqs.push((1.0 - head).max(0.0));
    Profile::from_normalized(freqs)
}

/// Instantaneous velocity of the `k`-th moment along the full dynamics:
/// selection transport plus the mutation source, minus the flux absorbed
/// by the truncation class.
pub fn moment_velocity(x: &Profile, p: &Params, k: u32) -> f64 {
    let d = x.dim();
    let xs = x.freqs();
    let m1 = x.moment(1);
    let mk = x.moment(k);
    let mk1 = x.moment(k + 1);
    let source: f64 = xs[..d]
        .iter()
        .enumerate()
        .map(|(l, &v)| ((l + 1) as f64).powi(k as i32) * v)
        .sum();
    p.alpha() * (m1 * mk - mk1) + p.lambda() * source
        - p.lambda() * (mk - (d as f64).powi(k as i32) * xs[d])
}

/// Quadratic-variation density of the `k`-th moment, `M_2k - M_k^2`.
pub fn moment_qv_density(x: &Profile, k: u32) -> f64 {
    x.moment(2 * k) - x.moment(k).powi(2)
}

/// Negative excursions beyond this are a step-size failure, not roundoff.
const FLOW_NEGATIVE_TOL: f64 = -1e-6;

/// Integrate the noise-free dynamics with the classical 4th-order scheme,
/// renormalizing each stored state onto the simplex. Every step is recorded.
pub fn deterministic_flow(
    x0: &Profile,
    p: &Params,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0) {
        return Err(FlowError::NonPositiveStep { dt });
    }
    if t_end < dt {
        return Err(FlowError::HorizonBeforeFirstStep { t_end, dt });
    }
    let n = x0.len();
    let n_steps = (t_end / dt).round() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(x0.clone());

    let mut x: Vec<f64> = x0.freqs().to_vec();
    let mut stage = alloc::vec![0.0; n];
    let (mut k1, mut k2, mut k3, mut k4) =
        (alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n], alloc::vec![0.0; n]);
    let mut stats = StepStats::default();

    for step in 1..=n_steps {
        drift_full_into(&x, p, &mut k1);
        for i in 0..n {
            stage[i] = x[i] + 0.5 * dt * k1[i];
        }
        drift_full_into(&stage, p, &mut k2);
        for i in 0..n {
            stage[i] = x[i] + 0.5 * dt * k2[i];
        }
        drift_full_into(&stage, p, &mut k3);
        for i in 0..n {
            stage[i] = x[i] + dt * k3[i];
        }
        drift_full_into(&stage, p, &mut k4);

        let t = step as f64 * dt;
        let mut clipped = false;
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if x[i] < 0.0 {
                if x[i] < FLOW_NEGATIVE_TOL {
                    return Err(FlowError::StepTooLarge { time: t, index: i, value: x[i] });
                }
                x[i] = 0.0;
                clipped = true;
            }
        }
        let mass: f64 = x.iter().sum();
        for v in x.iter_mut() {
            *v /= mass;
        }
        stats.steps += 1;
        if clipped {
            stats.clipped_steps += 1;
        }
        times.push(t);
        states.push(Profile::from_normalized(x.clone()));
    }

    Ok(Trajectory { times, states, click: ClickTime::Censored(t_end), stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn params(alpha: f64, lambda: f64, d: usize) -> Params {
        Params::new(alpha, lambda, d).unwrap()
    }

    #[test]
    fn drift_at_origin_is_pure_mutation_flux() {
        let p = params(1.0, 0.7, 4);
        let v = drift_full(&Profile::delta(0, 4), &p);
        assert_abs_diff_eq!(v[0], -0.7);
        assert_abs_diff_eq!(v[1], 0.7);
        assert!(v[2..].iter().all(|&e| e == 0.0));
    }

    #[test]
    fn drift_sums_to_zero() {
        let p = params(1.3, 0.9, 3);
        for x in [
            Profile::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
            Profile::new(vec![0.7, 0.0, 0.3, 0.0]).unwrap(),
            Profile::delta(3, 3),
        ] {
            let s: f64 = drift_full(&x, &p).iter().sum();
            assert!(s.abs() <= 1e-12, "drift sum {s}");
            let s: f64 = drift_aggregated(&x, &p, 2).unwrap().iter().sum();
            assert!(s.abs() <= 1e-12, "aggregated drift sum {s}");
        }
    }

    #[test]
    fn aggregated_drift_reduces_to_full_at_k_eq_d() {
        let p = params(0.8, 1.1, 5);
        let x = Profile::new(vec![0.05, 0.2, 0.25, 0.3, 0.15, 0.05]).unwrap();
        let full = drift_full(&x, &p);
        let agg = drift_aggregated(&x, &p, 5).unwrap();
        for (a, b) in full.iter().zip(&agg) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert!(drift_aggregated(&x, &p, 0).is_err());
        assert!(drift_aggregated(&x, &p, 6).is_err());
    }

    #[test]
    fn aggregated_drift_at_origin() {
        let p = params(1.0, 0.5, 3);
        let v = drift_aggregated(&Profile::delta(0, 3), &p, 1).unwrap();
        assert_abs_diff_eq!(v[0], -0.5);
        assert_abs_diff_eq!(v[1], 0.5);
    }

    #[test]
    fn aggregated_selection_vanishes_on_capped_support() {
        // support on classes >= k makes every capped count equal k
        let p = params(2.0, 0.6, 4);
        let x = Profile::new(vec![0.0, 0.0, 0.4, 0.1, 0.5]).unwrap();
        let v = drift_aggregated(&x, &p, 2).unwrap();
        let xs = x.freqs();
        for i in 0..=4 {
            let inflow = if i == 0 { 0.0 } else { xs[i - 1] };
            let outflow = if i < 4 { xs[i] } else { 0.0 };
            assert_abs_diff_eq!(v[i], 0.6 * (inflow - outflow), epsilon = 1e-15);
        }
    }

    #[test]
    fn covariance_corner_and_half() {
        let zero = wf_covariance(&Profile::delta(0, 2));
        assert!(zero.as_slice().iter().all(|&c| c == 0.0));
        let half = wf_covariance(&Profile::new(vec![0.5, 0.5]).unwrap());
        assert_abs_diff_eq!(half.get(0, 0), 0.25);
        assert_abs_diff_eq!(half.get(0, 1), -0.25);
        assert_abs_diff_eq!(half.get(1, 0), -0.25);
        assert_abs_diff_eq!(half.get(1, 1), 0.25);
    }

    #[test]
    fn covariance_rows_sum_to_zero() {
        let x = Profile::new(vec![0.3, 0.25, 0.05, 0.4]).unwrap();
        let c = wf_covariance(&x);
        for i in 0..c.order() {
            let row: f64 = (0..c.order()).map(|j| c.get(i, j)).sum();
            assert!(row.abs() <= 1e-12);
        }
    }

    #[test]
    fn moment_velocity_closed_forms() {
        // at the origin only the mutation source (l + 1 = 1) contributes
        let p = params(1.7, 0.9, 6);
        for k in 1..4 {
            assert_abs_diff_eq!(moment_velocity(&Profile::delta(0, 6), &p, k), 0.9);
            assert_abs_diff_eq!(moment_qv_density(&Profile::delta(0, 6), k), 0.0);
        }
        let p = params(2.0, 3.0, 1);
        let x = Profile::new(vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(
            moment_velocity(&x, &p, 1),
            -2.0 / 4.0 + 3.0 / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(moment_qv_density(&x, 1), 0.5 - 0.25, epsilon = 1e-15);
    }

    #[test]
    fn poisson_profile_head_weight() {
        let p = params(1.0, 1.0, 30);
        let x = poisson_profile(&p);
        assert_abs_diff_eq!(x.get(0), (-1.0f64).exp(), epsilon = 1e-9);
        assert!(x.mean() <= 1.0 + 1e-12);
    }

    #[test]
    fn poisson_profile_small_mutation_concentrates_at_origin() {
        let p = params(1.0, 1e-8, 10);
        let x = poisson_profile(&p);
        assert!(x.get(0) > 1.0 - 1e-7);
    }

    #[test]
    fn poisson_profile_is_near_fixed_point() {
        let p = params(1.0, 2.0, 40);
        let x = poisson_profile(&p);
        let v = drift_full(&x, &p);
        let sup = v.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
        assert!(sup < 1e-6, "drift residual {sup}");
    }

    #[test]
    fn flow_holds_absorbing_corner() {
        let p = Params::degenerate(1.0, 0.0, 3).unwrap();
        let traj = deterministic_flow(&Profile::delta(0, 3), &p, 1.0, 0.01).unwrap();
        assert_eq!(traj.last(), &Profile::delta(0, 3));
        assert_eq!(traj.times.len(), 101);
    }

    #[test]
    fn flow_rejects_bad_steps() {
        let p = params(1.0, 1.0, 2);
        let x = Profile::delta(0, 2);
        assert!(matches!(
            deterministic_flow(&x, &p, 1.0, 0.0),
            Err(FlowError::NonPositiveStep { .. })
        ));
        assert!(matches!(
            deterministic_flow(&x, &p, 0.005, 0.01),
            Err(FlowError::HorizonBeforeFirstStep { .. })
        ));
    }

    #[test]
    fn flow_stays_near_equilibrium() {
        let p = params(1.0, 2.0, 40);
        let x0 = poisson_profile(&p);
        let traj = deterministic_flow(&x0, &p, 100.0, 0.01).unwrap();
        let sup = traj
            .last()
            .freqs()
            .iter()
            .zip(x0.freqs())
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        assert!(sup < 1e-6, "displacement {sup}");
    }
}
