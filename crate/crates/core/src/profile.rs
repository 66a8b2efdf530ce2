//! Simplex states: the vector of mutation-class frequencies.

use alloc::vec::Vec;
// f64 math methods are inherent only with std; without it they come from
// the Float trait
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{KError, ProfileError};

/// Absolute tolerance for algebraic identities (zero sums, mass checks).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Absolute tolerance on the total mass when validating external input.
pub const VALIDATE_TOL: f64 = 1e-9;

/// A point of the simplex: `freqs[i]` is the fraction of the population
/// carrying exactly `i` deleterious mutations, `i = 0..=d`.
///
/// Construction validates nonnegativity and unit mass; normalization is
/// never applied silently. Internal integrators use
/// [`Profile::from_normalized`] after their own projection step.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    freqs: Vec<f64>,
}

impl Profile {
    /// Validate a frequency vector. Entries must be nonnegative and sum to
    /// one within [`VALIDATE_TOL`]; the vector is taken as-is otherwise.
    pub fn new(freqs: Vec<f64>) -> Result<Self, ProfileError> {
        if freqs.is_empty() {
            return Err(ProfileError::Empty);
        }
        for (index, &value) in freqs.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(ProfileError::NegativeEntry { index, value });
            }
        }
        let sum: f64 = freqs.iter().sum();
        if (sum - 1.0).abs() > VALIDATE_TOL {
            return Err(ProfileError::NotNormalized { sum });
        }
        Ok(Self { freqs })
    }

    /// Wrap a vector that is already on the simplex by construction
    /// (integrator output after clip-and-renormalize). Debug builds verify.
    pub(crate) fn from_normalized(freqs: Vec<f64>) -> Self {
        debug_assert!(!freqs.is_empty());
        debug_assert!(freqs.iter().all(|&x| x >= 0.0));
        debug_assert!((freqs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self { freqs }
    }

    /// Point mass on class `index`, with classes `0..=d`.
    pub fn delta(index: usize, d: usize) -> Self {
        assert!(index <= d, "delta index {index} outside 0..={d}");
        let mut freqs = alloc::vec![0.0; d + 1];
        freqs[index] = 1.0;
        Self { freqs }
    }

    /// Number of classes minus one (the truncation dimension `d`).
    #[inline]
    pub fn dim(&self) -> usize {
        self.freqs.len() - 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.freqs[i]
    }

    /// Fraction of the population in the fittest (mutation-free) class.
    #[inline]
    pub fn fittest(&self) -> f64 {
        self.freqs[0]
    }

    /// `k`-th moment of the mutation count, `M_k = sum_i i^k x_i`.
    /// `M_0` is the total mass (1 for a valid profile).
    pub fn moment(&self, k: u32) -> f64 {
        self.freqs
            .iter()
            .enumerate()
            .map(|(i, &x)| (i as f64).powi(k as i32) * x)
            .sum()
    }

    /// Mean mutation count `M_1`.
    #[inline]
    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Capped first moment `sum_i (i min k) x_i`, the drift input of the
    /// aggregated dynamics.
    pub fn capped_mean(&self, k: usize) -> f64 {
        self.freqs
            .iter()
            .enumerate()
            .map(|(i, &x)| i.min(k) as f64 * x)
            .sum()
    }

    /// Mass at or above class `k`.
    pub fn tail_mass(&self, k: usize) -> f64 {
        if k >= self.freqs.len() {
            0.0
        } else {
            self.freqs[k..].iter().sum()
        }
    }

    /// Merge all classes `>= k` into a single block: the result keeps
    /// coordinates `0..k-1` and closes with the tail mass `1 - sum_{j<k} x_j`,
    /// giving a profile of dimension `k`.
    pub fn project(&self, k: usize) -> Result<Profile, KError> {
        let d = self.dim();
        if k == 0 || k > d {
            return Err(KError { k, d });
        }
        let mut freqs = Vec::with_capacity(k + 1);
        freqs.extend_from_slice(&self.freqs[..k]);
        let head: f64 = freqs.iter().sum();
        freqs.push((1.0 - head).max(0.0));
        Ok(Profile { freqs })
    }

    /// Same frequencies padded or tail-saturated to dimension `d`.
    pub fn resized(&self, d: usize) -> Profile {
        let mut freqs = alloc::vec![0.0; d + 1];
        for (i, &x) in self.freqs.iter().enumerate() {
            freqs[i.min(d)] += x;
        }
        Profile { freqs }
    }
}
