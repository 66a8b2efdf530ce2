//! Error types shared across the crate.

use core::fmt;

/// Rejection reasons when constructing a [`crate::Profile`].
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileError {
    /// The frequency vector was empty.
    Empty,
    /// An entry was negative.
    NegativeEntry { index: usize, value: f64 },
    /// The entries do not sum to one within the validation tolerance (1e-9).
    NotNormalized { sum: f64 },
}

impl fmt::Display for ProfileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileError::Empty => write!(f, "profile vector is empty"),
            ProfileError::NegativeEntry { index, value } => {
                write!(f, "profile entry {index} is negative ({value})")
            }
            ProfileError::NotNormalized { sum } => {
                write!(f, "profile entries sum to {sum}, not 1")
            }
        }
    }
}

/// Rejection reasons when constructing parameter sets.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamsError {
    NonPositiveAlpha { alpha: f64 },
    NonPositiveLambda { lambda: f64 },
    ZeroDimension,
    /// Discrete-model selection coefficient must lie strictly inside (0, 1).
    AlphaOutOfUnitInterval { alpha: f64 },
    ZeroPopulation,
}

impl fmt::Display for ParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamsError::NonPositiveAlpha { alpha } => {
                write!(f, "selection coefficient alpha must be > 0, got {alpha}")
            }
            ParamsError::NonPositiveLambda { lambda } => {
                write!(f, "mutation rate lambda must be > 0, got {lambda}")
            }
            ParamsError::ZeroDimension => write!(f, "truncation dimension d must be >= 1"),
            ParamsError::AlphaOutOfUnitInterval { alpha } => {
                write!(f, "discrete selection alpha must lie in (0, 1), got {alpha}")
            }
            ParamsError::ZeroPopulation => write!(f, "population size must be >= 1"),
        }
    }
}

/// An aggregation rank `k` outside `[1, d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KError {
    pub k: usize,
    pub d: usize,
}

impl fmt::Display for KError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "aggregation rank k = {} outside [1, {}]", self.k, self.d)
    }
}

/// Failures of the deterministic (noise-free) flow.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    /// An integration step produced an entry below -1e-6 before projection,
    /// i.e. the step size is too large for the current state.
    StepTooLarge { time: f64, index: usize, value: f64 },
    NonPositiveStep { dt: f64 },
    HorizonBeforeFirstStep { t_end: f64, dt: f64 },
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::StepTooLarge { time, index, value } => write!(
                f,
                "step too large: entry {index} reached {value} at t = {time} before projection"
            ),
            FlowError::NonPositiveStep { dt } => write!(f, "dt must be > 0, got {dt}"),
            FlowError::HorizonBeforeFirstStep { t_end, dt } => {
                write!(f, "t_end = {t_end} is shorter than one step dt = {dt}")
            }
        }
    }
}

/// Failures when launching a stochastic simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    /// The initial state has no mass in the fittest class, so the clicking
    /// time is not defined.
    InvalidStart,
    /// Aggregation rank outside `[1, d]`.
    InvalidK(KError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidStart => {
                write!(f, "initial state carries no mass in the fittest class")
            }
            SimError::InvalidK(e) => e.fmt(f),
        }
    }
}

impl From<KError> for SimError {
    fn from(e: KError) -> Self {
        SimError::InvalidK(e)
    }
}

/// Failures of particle-ensemble evolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnsembleError {
    /// Every particle clicked; there is nothing left to condition on.
    Extinct,
    /// Fleming–Viot resampling needs at least two particles.
    TooFewParticles { got: usize },
}

impl fmt::Display for EnsembleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleError::Extinct => write!(f, "ensemble went extinct"),
            EnsembleError::TooFewParticles { got } => {
                write!(f, "need at least 2 particles, got {got}")
            }
        }
    }
}

/// Failures of the statistical estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimateError {
    /// Fewer grid points in the fit window than the estimator needs.
    WindowTooThin { points: usize, needed: usize },
    /// Not enough surviving replicates (or observations) for a meaningful
    /// estimate.
    StatisticalFloor { got: u64, needed: u64 },
    /// No time window where the distance series decays through the fit range.
    NoDecayWindow,
}

impl fmt::Display for EstimateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimateError::WindowTooThin { points, needed } => {
                write!(f, "fit window has {points} grid points, need {needed}")
            }
            EstimateError::StatisticalFloor { got, needed } => {
                write!(f, "statistical floor: {got} observations, need {needed}")
            }
            EstimateError::NoDecayWindow => write!(f, "no usable decay window"),
        }
    }
}

impl core::error::Error for ProfileError {}
impl core::error::Error for ParamsError {}
impl core::error::Error for KError {}
impl core::error::Error for FlowError {}
impl core::error::Error for SimError {}
impl core::error::Error for EnsembleError {}
impl core::error::Error for EstimateError {}
