//! Model parameter sets.

use crate::error::ParamsError;

/// Parameters of the diffusion model: selection strength `alpha` per
/// mutation, mutation rate `lambda`, and the truncation dimension `d`
/// (maximum tracked mutation count; mutation flux out of class `d` is
/// suppressed so the tail saturates there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    alpha: f64,
    lambda: f64,
    d: usize,
}

impl Params {
    pub fn new(alpha: f64, lambda: f64, d: usize) -> Result<Self, ParamsError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ParamsError::NonPositiveAlpha { alpha });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(ParamsError::NonPositiveLambda { lambda });
        }
        if d == 0 {
            return Err(ParamsError::ZeroDimension);
        }
        Ok(Self { alpha, lambda, d })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Truncation dimension: profiles have `d + 1` classes, `0..=d`.
    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Mean of the deterministic equilibrium profile, `n* = lambda / alpha`.
    #[inline]
    pub fn n_star(&self) -> f64 {
        self.lambda / self.alpha
    }

    /// Same rates on a different truncation dimension.
    pub fn with_d(&self, d: usize) -> Result<Self, ParamsError> {
        Self::new(self.alpha, self.lambda, d)
    }

    /// Corner-case parameters with `alpha` or `lambda` allowed to be zero
    /// (neutral drift, frozen mutation). `n_star` is meaningless here;
    /// intended for degenerate limits in tests and diagnostics.
    pub fn degenerate(alpha: f64, lambda: f64, d: usize) -> Result<Self, ParamsError> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(ParamsError::NonPositiveAlpha { alpha });
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(ParamsError::NonPositiveLambda { lambda });
        }
        if d == 0 {
            return Err(ParamsError::ZeroDimension);
        }
        Ok(Self { alpha, lambda, d })
    }
}

/// Parameters of the discrete-generation individual-based model.
///
/// `alpha` is the per-mutation fitness penalty (parent weight `(1-alpha)^i`),
/// `lambda` the Poisson mean of new mutations per birth, `n` the fixed
/// population size and `cap` an optional truncation rank: children that
/// would carry more than `cap` mutations are recorded as carrying exactly
/// `cap`. Without a cap the class vector grows as needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteParams {
    alpha: f64,
    lambda: f64,
    n: u64,
    cap: Option<usize>,
}

impl DiscreteParams {
    pub fn new(alpha: f64, lambda: f64, n: u64, cap: Option<usize>) -> Result<Self, ParamsError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ParamsError::AlphaOutOfUnitInterval { alpha });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(ParamsError::NonPositiveLambda { lambda });
        }
        if n == 0 {
            return Err(ParamsError::ZeroPopulation);
        }
        Ok(Self {
            alpha,
            lambda,
            n,
            cap,
        })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    /// Corner-case parameters with `alpha` or `lambda` allowed to be zero
    /// (neutral resampling, mutation-free drift); for degenerate limits in
    /// tests and diagnostics.
    pub fn degenerate(
        alpha: f64,
        lambda: f64,
        n: u64,
        cap: Option<usize>,
    ) -> Result<Self, ParamsError> {
        if !(alpha >= 0.0 && alpha < 1.0) {
            return Err(ParamsError::AlphaOutOfUnitInterval { alpha });
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(ParamsError::NonPositiveLambda { lambda });
        }
        if n == 0 {
            return Err(ParamsError::ZeroPopulation);
        }
        Ok(Self { alpha, lambda, n, cap })
    }

    /// Discrete counterpart of diffusion parameters at population size `n`:
    /// per-generation rates `alpha/n` and `lambda/n`, capped at the same
    /// truncation dimension. `n` generations then correspond to one unit of
    /// diffusion time.
    pub fn from_diffusion(p: &Params, n: u64) -> Result<Self, ParamsError> {
        Self::new(p.alpha() / n as f64, p.lambda() / n as f64, n, Some(p.d()))
    }
}
