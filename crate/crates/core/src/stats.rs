//! Small statistical toolbox: summary statistics, weighted line fits,
//! Kolmogorov–Smirnov tests, empirical quantiles, quantile-binned
//! histograms on the plane, and a permutation-debiased total-variation
//! distance between binned samples.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// A nonnegative rate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub value: f64,
    pub stderr: f64,
}

impl RateEstimate {
    /// Whether two estimates agree within `k` combined standard errors.
    pub fn agrees_with(&self, other: &RateEstimate, k: f64) -> bool {
        let combined = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        (self.value - other.value).abs() <= k * combined
    }
}

/// Split `m` trials over weighted categories by conditional binomials, one
/// per category; distributionally a multinomial draw in O(categories).
pub(crate) fn multinomial_counts<R: Rng + ?Sized>(
    rng: &mut R,
    mut m: u64,
    weights: &[f64],
    out: &mut [u64],
) {
    let mut remaining: f64 = weights.iter().sum();
    for (i, &w) in weights.iter().enumerate() {
        if m == 0 {
            out[i] = 0;
            continue;
        }
        let p = if remaining > 0.0 { (w / remaining).clamp(0.0, 1.0) } else { 1.0 };
        let draw = if p >= 1.0 {
            m
        } else if p <= 0.0 {
            0
        } else {
            Binomial::new(m, p).expect("p is clamped to [0, 1]").sample(rng)
        };
        out[i] = draw;
        m -= draw;
        remaining -= w;
    }
    // sweep any trials stranded by floating-point underflow of the
    // remaining weight into the last positive-weight category
    if m > 0 {
        let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        out[last] += m;
    }
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Empirical quantile with linear interpolation on the sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sort a sample in place for quantile/KS use.
pub fn sort(xs: &mut [f64]) {
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("samples must not be NaN"));
}

/// Straight-line fit `y = intercept + slope t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
}

/// Weighted least squares for a straight line. Returns `None` when fewer
/// than two distinct abscissas carry positive weight.
pub fn weighted_line_fit(t: &[f64], y: &[f64], w: &[f64]) -> Option<LineFit> {
    assert_eq!(t.len(), y.len());
    assert_eq!(t.len(), w.len());
    let sw: f64 = w.iter().sum();
    if !(sw > 0.0) {
        return None;
    }
    let tbar = t.iter().zip(w).map(|(&a, &b)| a * b).sum::<f64>() / sw;
    let ybar = y.iter().zip(w).map(|(&a, &b)| a * b).sum::<f64>() / sw;
    let mut stt = 0.0;
    let mut sty = 0.0;
    for i in 0..t.len() {
        let dt = t[i] - tbar;
        stt += w[i] * dt * dt;
        sty += w[i] * dt * (y[i] - ybar);
    }
    if !(stt > 0.0) {
        return None;
    }
    let slope = sty / stt;
    Some(LineFit { intercept: ybar - slope * tbar, slope })
}

/// Kolmogorov–Smirnov statistic of a sorted sample against a reference CDF.
pub fn ks_statistic_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic two-sided Kolmogorov p-value for statistic `d` at effective
/// sample size `n_eff`, with the standard finite-sample size adjustment.
pub fn kolmogorov_pvalue(d: f64, n_eff: f64) -> f64 {
    use core::f64::consts::PI;
    if d <= 0.0 {
        return 1.0;
    }
    let sqrt_n = n_eff.sqrt();
    let x = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if x < 1.0 {
        // theta-transformed series; the alternating sum below stalls for
        // small arguments
        let mut cdf = 0.0f64;
        for k in 1..=20u32 {
            let m = (2 * k - 1) as f64;
            let term = (-m * m * PI * PI / (8.0 * x * x)).exp();
            cdf += term;
            if term < 1e-300 {
                break;
            }
        }
        cdf *= (2.0 * PI).sqrt() / x;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut p = 0.0f64;
    for k in 1..=100 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * (-2.0 * (k as f64 * x).powi(2)).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test; consumes and sorts both samples.
/// Returns the statistic and the asymptotic p-value.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty());
    sort(&mut a);
    sort(&mut b);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let xa = a[i];
        let xb = b[j];
        let x = xa.min(xb);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    let n_eff = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    (d, kolmogorov_pvalue(d, n_eff))
}

/// Quantile-spaced bin edges on each axis, built from a pooled sample, for
/// binning plane points into a `bins x bins` grid with near-equal marginal
/// occupancy.
#[derive(Debug, Clone)]
pub struct QuantileGrid2 {
    x_edges: Vec<f64>,
    y_edges: Vec<f64>,
    bins: usize,
}

impl QuantileGrid2 {
    pub fn from_pooled(points: &[(f64, f64)], bins: usize) -> Self {
        assert!(bins >= 1);
        assert!(!points.is_empty());
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        sort(&mut xs);
        sort(&mut ys);
        let edges = |sorted: &[f64]| -> Vec<f64> {
            (1..bins).map(|j| quantile(sorted, j as f64 / bins as f64)).collect()
        };
        Self { x_edges: edges(&xs), y_edges: edges(&ys), bins }
    }

    #[inline]
    pub fn n_bins(&self) -> usize {
        self.bins * self.bins
    }

    /// Row-major bin index of a point.
    pub fn bin(&self, p: (f64, f64)) -> usize {
        let bx = self.x_edges.partition_point(|&e| e < p.0);
        let by = self.y_edges.partition_point(|&e| e < p.1);
        bx * self.bins + by
    }

    pub fn bin_all(&self, points: &[(f64, f64)]) -> Vec<usize> {
        points.iter().map(|&p| self.bin(p)).collect()
    }
}

/// Total variation distance between the empirical distributions of two
/// bin-index samples over `n_bins` bins.
pub fn binned_tv(a: &[usize], b: &[usize], n_bins: usize) -> f64 {
    let mut ca = alloc::vec![0u64; n_bins];
    let mut cb = alloc::vec![0u64; n_bins];
    for &i in a {
        ca[i] += 1;
    }
    for &i in b {
        cb[i] += 1;
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let mut tv = 0.0;
    for i in 0..n_bins {
        tv += (ca[i] as f64 / na - cb[i] as f64 / nb).abs();
    }
    tv / 2.0
}

/// Binned total-variation estimate with its finite-sample noise floor.
///
/// The plug-in estimator is biased upward: even two samples from the same
/// law show a positive binned distance of order sqrt(bins / n). The floor
/// is measured by permuting the pooled sample labels and re-reading the
/// distance, and the corrected value subtracts it (clamped at zero).
#[derive(Debug, Clone, Copy)]
pub struct TvEstimate {
    pub raw: f64,
    pub null_mean: f64,
    pub null_sd: f64,
    pub corrected: f64,
}

pub fn debiased_binned_tv<R: Rng + ?Sized>(
    a: &[usize],
    b: &[usize],
    n_bins: usize,
    permutations: usize,
    rng: &mut R,
) -> TvEstimate {
    let raw = binned_tv(a, b, n_bins);
    let mut pool: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
    let mut nulls = Vec::with_capacity(permutations);
    for _ in 0..permutations {
        // partial Fisher-Yates: draw a fresh group of size |a| each round
        for i in 0..a.len() {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        nulls.push(binned_tv(&pool[..a.len()], &pool[a.len()..], n_bins));
    }
    let (null_mean, _) = mean_and_stderr(&nulls);
    let null_sd = if nulls.len() > 1 { variance(&nulls).sqrt() } else { 0.0 };
    TvEstimate { raw, null_mean, null_sd, corrected: (raw - null_mean).max(0.0) }
}

/// Standard error of a statistic under resampling replicates with
/// replacement. The statistic receives the resampled index multiset.
pub fn bootstrap_stderr<R: Rng + ?Sized>(
    n: usize,
    resamples: usize,
    rng: &mut R,
    stat: impl Fn(&[usize]) -> f64,
) -> f64 {
    assert!(n >= 1);
    let mut idx = alloc::vec![0usize; n];
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for slot in idx.iter_mut() {
            *slot = rng.gen_range(0..n);
        }
        let v = stat(&idx);
        if v.is_finite() {
            values.push(v);
        }
    }
    if values.len() < 2 {
        return f64::INFINITY;
    }
    variance(&values).sqrt()
}
