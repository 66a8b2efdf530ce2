//! Simulation and quasi-stationary inference kernels for Muller's ratchet.
//!
//! The ratchet describes an asexual population in which deleterious mutations
//! can only accumulate: whenever the fittest class of individuals dies out
//! (a "click"), the whole population is permanently one mutation worse off.
//! This crate provides the numerics around that picture:
//!
//! * [`discrete`] — the individual-based model with fixed population size,
//!   fitness-weighted parent choice and Poisson mutation;
//! * [`diffusion`] — Euler–Maruyama integration of the Fleming–Viot-type
//!   diffusion limit on the simplex of mutation-class frequencies, including
//!   the aggregated variant in which all classes above a rank are merged;
//! * [`qsd`] — estimation of the metastable objects conditioned on no click:
//!   the quasi-stationary distribution, the clicking rate `rho0`, the
//!   survival capacity `eta`, and the law conditioned to never click;
//! * [`diagnostics`] — relaxation-rate fits, correlation decay, moment
//!   tightness across truncation dimensions, and autonomy checks for the
//!   aggregated dynamics.
//!
//! Everything here is deterministic given a [`stream::SeedSpace`]: random
//! streams are addressed by `(master_seed, tag, replicate, unit)` so that
//! replicated experiments parallelize without changing a single output bit.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (default) only toggles the float implementations underneath.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod diagnostics;
pub mod diffusion;
pub mod discrete;
pub mod dynamics;
pub mod error;
pub mod params;
pub mod profile;
pub mod qsd;
pub mod stats;
pub mod stream;
pub mod trajectory;

pub use error::{EnsembleError, EstimateError, FlowError, KError, ParamsError, ProfileError, SimError};
pub use params::{DiscreteParams, Params};
pub use profile::Profile;
pub use trajectory::{ClickTime, StepStats, Trajectory};
