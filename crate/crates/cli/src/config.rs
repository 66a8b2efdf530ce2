//! Strict JSON configuration for experiment runs.
//!
//! Every knob an experiment can read lives here. Parsing rejects unknown
//! keys at every level, so a typo is an error rather than a silently
//! ignored setting, and the resolved configuration is written back next to
//! the results so a run can be reproduced from its artifacts alone.

use ratchet_core::dynamics::poisson_profile;
use ratchet_core::{Params, Profile};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// The experiment selected by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Simulate,
    Qsd,
    Eta,
    Qprocess,
    Correlations,
    Relaxation,
    Tightness,
    Autonomy,
    Compare,
    Clickstats,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Simulate,
        Experiment::Qsd,
        Experiment::Eta,
        Experiment::Qprocess,
        Experiment::Correlations,
        Experiment::Relaxation,
        Experiment::Tightness,
        Experiment::Autonomy,
        Experiment::Compare,
        Experiment::Clickstats,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Qsd => "qsd",
            Experiment::Eta => "eta",
            Experiment::Qprocess => "qprocess",
            Experiment::Correlations => "correlations",
            Experiment::Relaxation => "relaxation",
            Experiment::Tightness => "tightness",
            Experiment::Autonomy => "autonomy",
            Experiment::Compare => "compare",
            Experiment::Clickstats => "clickstats",
        }
    }

    pub fn from_name(s: &str) -> Option<Experiment> {
        Experiment::ALL.iter().copied().find(|e| e.name() == s)
    }

    /// Role tag of this experiment's seed space. Each experiment owns a
    /// distinct tag, so replicate streams never collide across experiments
    /// run from the same master seed.
    pub fn seed_tag(self) -> u64 {
        Experiment::ALL
            .iter()
            .position(|&e| e == self)
            .expect("experiment listed in ALL") as u64
            + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Discrete,
    Diffusion,
    Aggregated,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub alpha: f64,
    pub lambda: f64,
    pub d: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub t_max: f64,
    /// Record every this many steps (generations under the discrete model).
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_stride() -> usize {
    1
}

/// Initial state, in one of three shapes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSection {
    /// The saturated Poisson(λ/α) profile.
    Poisson,
    /// All mass in one class.
    Delta { class: usize },
    /// Explicit frequencies, length d + 1.
    Explicit { freqs: Vec<f64> },
}

impl InitialSection {
    pub fn build(&self, p: &Params, field: &str) -> Result<Profile, ConfigError> {
        match self {
            InitialSection::Poisson => {
                if p.alpha() == 0.0 {
                    return Err(ConfigError::invalid(
                        field,
                        "poisson initial state needs alpha > 0",
                    ));
                }
                Ok(poisson_profile(p))
            }
            InitialSection::Delta { class } => {
                if *class > p.d() {
                    return Err(ConfigError::invalid(
                        field,
                        format!("delta class {} exceeds d = {}", class, p.d()),
                    ));
                }
                Ok(Profile::delta(*class, p.d()))
            }
            InitialSection::Explicit { freqs } => {
                if freqs.len() != p.d() + 1 {
                    return Err(ConfigError::invalid(
                        field,
                        format!("explicit profile has {} entries, need d + 1 = {}", freqs.len(), p.d() + 1),
                    ));
                }
                Profile::new(freqs.clone())
                    .map_err(|e| ConfigError::invalid(field, e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteSection {
    /// Population size.
    pub n: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub replicates: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QsdSection {
    pub particles: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Restarts before this time are excluded from the rate estimate;
    /// defaults to half the horizon.
    #[serde(default)]
    pub burn_in: Option<f64>,
    /// When set, evolve the final ensemble this far and report the binned
    /// TV distance between the before and after summaries.
    #[serde(default)]
    pub pushforward_dt: Option<f64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_permutations")]
    pub permutations: usize,
}

fn default_runs() -> usize {
    1
}
fn default_bins() -> usize {
    20
}
fn default_permutations() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaSection {
    pub replicates: usize,
    /// Clicking rate used to compensate the survival curve. When absent, a
    /// `qsd` section must be present and the rate is estimated first.
    #[serde(default)]
    pub rho0: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QprocessSection {
    pub replicates: usize,
    /// Extra no-click time demanded beyond the horizon.
    #[serde(default)]
    pub guard: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationsSection {
    pub ks: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub replicates: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationSection {
    /// Second initial state; the fit measures how fast the laws started
    /// from `initial` and from here become indistinguishable.
    pub initial_b: InitialSection,
    pub t_grid: Vec<f64>,
    pub replicates: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_relax_permutations")]
    pub permutations: usize,
}

fn default_relax_permutations() -> usize {
    150
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightnessSection {
    pub d_list: Vec<usize>,
    /// Moment order probed.
    pub k: u32,
    pub quantile: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutonomySection {
    /// Aggregation rank: coordinates below `k` plus the lumped tail are
    /// compared between the two starts.
    pub k: usize,
    pub replicates: usize,
    /// Must agree with `initial` on coordinates below `k`.
    pub initial_b: InitialSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Discrete population size; the diffusion runs matched parameters.
    pub n: u64,
    pub replicates: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClickstatsSection {
    pub replicates: usize,
    /// Externally estimated clicking rate; adds a calibrated KS test
    /// against Exp(rate) alongside the self-fitted one.
    #[serde(default)]
    pub rate: Option<f64>,
}

/// A full run description. One file drives any experiment; sections for
/// experiments other than the selected one may be present (they are parsed
/// and validated) but are not read.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional here; the command line names the experiment and the two
    /// must agree when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    pub model: Model,
    pub params: ParamsSection,
    pub integrator: IntegratorSection,
    pub initial: InitialSection,
    /// Explicit by design: runs are reproducible or they are wrong.
    pub master_seed: u64,
    /// Aggregation rank for `model = "aggregated"` simulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregation_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete: Option<DiscreteSection>,
    /// Worker threads; command line and RATCHET_QSD_THREADS override.
    /// Never serialized back: outputs must not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    /// Output directory; `--out` overrides. Not serialized back either.
    #[serde(default, skip_serializing)]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qsd: Option<QsdSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qprocess: Option<QprocessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlations: Option<CorrelationsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<RelaxationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tightness: Option<TightnessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub autonomy: Option<AutonomySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clickstats: Option<ClickstatsSection>,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    /// Malformed JSON or schema violation, with serde's location info.
    Parse(String),
    /// Well-formed but out of range or inconsistent.
    Invalid { field: String, reason: String },
}

impl ConfigError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "cannot read config: {e}"),
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Invalid { field, reason } => {
                write!(f, "invalid config field `{field}`: {reason}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
}

impl RunConfig {
    /// Core parameter object; all range checks live in the core
    /// constructor and surface here as field errors.
    pub fn core_params(&self) -> Result<Params, ConfigError> {
        Params::new(self.params.alpha, self.params.lambda, self.params.d)
            .map_err(|e| ConfigError::invalid("params", e.to_string()))
    }

    /// Cross-field validation beyond what serde can express. Checks the
    /// selected experiment's requirements only; unused sections just need
    /// to parse.
    pub fn validate(&self, experiment: Experiment) -> Result<(), ConfigError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(ConfigError::invalid(
                    "experiment",
                    format!("config says `{}` but the command line says `{}`", e.name(), experiment.name()),
                ));
            }
        }
        let p = self.core_params()?;
        if !(self.integrator.dt > 0.0) || !self.integrator.dt.is_finite() {
            return Err(ConfigError::invalid("integrator.dt", "must be positive and finite"));
        }
        if !(self.integrator.t_max >= self.integrator.dt) {
            return Err(ConfigError::invalid("integrator.t_max", "must be at least dt"));
        }
        if self.integrator.record_stride == 0 {
            return Err(ConfigError::invalid("integrator.record_stride", "must be at least 1"));
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(ConfigError::invalid("threads", "must be at least 1"));
            }
        }
        self.initial.build(&p, "initial")?;

        let need = |present: bool, name: &str| -> Result<(), ConfigError> {
            if present {
                Ok(())
            } else {
                Err(ConfigError::invalid(name, "section required for this experiment"))
            }
        };
        match experiment {
            Experiment::Simulate => {
                need(self.simulate.is_some(), "simulate")?;
                match self.model {
                    Model::Discrete => {
                        need(self.discrete.is_some(), "discrete")?;
                        if self.discrete.as_ref().unwrap().n == 0 {
                            return Err(ConfigError::invalid("discrete.n", "must be positive"));
                        }
                    }
                    Model::Aggregated => {
                        let k = self.aggregation_k.ok_or_else(|| {
                            ConfigError::invalid("aggregation_k", "required for the aggregated model")
                        })?;
                        if k == 0 || k > p.d() {
                            return Err(ConfigError::invalid(
                                "aggregation_k",
                                format!("must be in 1..={}", p.d()),
                            ));
                        }
                    }
                    Model::Diffusion => {}
                }
            }
            Experiment::Qsd => {
                self.require_diffusion(experiment)?;
                self.validate_qsd()?;
            }
            Experiment::Eta => {
                self.require_diffusion(experiment)?;
                let s = self.eta.as_ref();
                need(s.is_some(), "eta")?;
                let s = s.unwrap();
                match s.rho0 {
                    Some(r) if !(r > 0.0) => {
                        return Err(ConfigError::invalid("eta.rho0", "must be positive"));
                    }
                    Some(_) => {}
                    None => {
                        if self.qsd.is_none() {
                            return Err(ConfigError::invalid(
                                "eta.rho0",
                                "give a rate or add a qsd section to estimate one",
                            ));
                        }
                        self.validate_qsd()?;
                    }
                }
            }
            Experiment::Qprocess => {
                self.require_diffusion(experiment)?;
                need(self.qprocess.is_some(), "qprocess")?;
                if self.qprocess.as_ref().unwrap().guard < 0.0 {
                    return Err(ConfigError::invalid("qprocess.guard", "must be nonnegative"));
                }
            }
            Experiment::Correlations => {
                self.require_diffusion(experiment)?;
                need(self.correlations.is_some(), "correlations")?;
                self.validate_qsd()?;
                let s = self.correlations.as_ref().unwrap();
                if s.ks.iter().any(|&k| k > p.d()) {
                    return Err(ConfigError::invalid("correlations.ks", "indices must be at most d"));
                }
                validate_grid(&s.t_grid, "correlations.t_grid")?;
            }
            Experiment::Relaxation => {
                self.require_diffusion(experiment)?;
                need(self.relaxation.is_some(), "relaxation")?;
                let s = self.relaxation.as_ref().unwrap();
                s.initial_b.build(&p, "relaxation.initial_b")?;
                validate_grid(&s.t_grid, "relaxation.t_grid")?;
                if s.bins < 2 {
                    return Err(ConfigError::invalid("relaxation.bins", "need at least 2 per axis"));
                }
            }
            Experiment::Tightness => {
                self.require_diffusion(experiment)?;
                need(self.tightness.is_some(), "tightness")?;
                self.validate_qsd()?;
                let s = self.tightness.as_ref().unwrap();
                if s.d_list.is_empty() || s.d_list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ConfigError::invalid("tightness.d_list", "must be strictly increasing"));
                }
                if !(s.quantile > 0.0 && s.quantile < 1.0) {
                    return Err(ConfigError::invalid("tightness.quantile", "must lie in (0, 1)"));
                }
                if self.qsd.as_ref().unwrap().runs < 2 {
                    return Err(ConfigError::invalid(
                        "qsd.runs",
                        "tightness errors come from run spread; need at least 2",
                    ));
                }
            }
            Experiment::Autonomy => {
                if self.model == Model::Discrete {
                    return Err(ConfigError::invalid(
                        "model",
                        "autonomy runs the diffusion or aggregated dynamics",
                    ));
                }
                need(self.autonomy.is_some(), "autonomy")?;
                let s = self.autonomy.as_ref().unwrap();
                if s.k == 0 || s.k > p.d() {
                    return Err(ConfigError::invalid("autonomy.k", format!("must be in 1..={}", p.d())));
                }
                let a = self.initial.build(&p, "initial")?;
                let b = s.initial_b.build(&p, "autonomy.initial_b")?;
                let agree = a.freqs()[..s.k]
                    .iter()
                    .zip(&b.freqs()[..s.k])
                    .all(|(x, y)| (x - y).abs() <= 1e-12);
                if !agree {
                    return Err(ConfigError::invalid(
                        "autonomy.initial_b",
                        "must agree with `initial` on coordinates below k",
                    ));
                }
            }
            Experiment::Compare => {
                self.require_diffusion(experiment)?;
                need(self.compare.is_some(), "compare")?;
                if self.compare.as_ref().unwrap().n == 0 {
                    return Err(ConfigError::invalid("compare.n", "must be positive"));
                }
            }
            Experiment::Clickstats => {
                self.require_diffusion(experiment)?;
                need(self.clickstats.is_some(), "clickstats")?;
                if let Some(r) = self.clickstats.as_ref().unwrap().rate {
                    if !(r > 0.0) {
                        return Err(ConfigError::invalid("clickstats.rate", "must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    fn require_diffusion(&self, experiment: Experiment) -> Result<(), ConfigError> {
        if self.model != Model::Diffusion {
            return Err(ConfigError::invalid(
                "model",
                format!("the {} experiment runs the diffusion model", experiment.name()),
            ));
        }
        Ok(())
    }

    fn validate_qsd(&self) -> Result<(), ConfigError> {
        let s = self
            .qsd
            .as_ref()
            .ok_or_else(|| ConfigError::invalid("qsd", "section required for this experiment"))?;
        if s.particles < 2 {
            return Err(ConfigError::invalid("qsd.particles", "Fleming-Viot needs at least 2"));
        }
        if s.runs == 0 {
            return Err(ConfigError::invalid("qsd.runs", "must be at least 1"));
        }
        if let Some(b) = s.burn_in {
            if !(b >= 0.0 && b < self.integrator.t_max) {
                return Err(ConfigError::invalid("qsd.burn_in", "must lie in [0, t_max)"));
            }
        }
        if let Some(dtp) = s.pushforward_dt {
            if !(dtp >= 0.0) || !dtp.is_finite() {
                return Err(ConfigError::invalid("qsd.pushforward_dt", "must be nonnegative"));
            }
        }
        if s.bins < 2 {
            return Err(ConfigError::invalid("qsd.bins", "need at least 2 per axis"));
        }
        Ok(())
    }
}

fn validate_grid(grid: &[f64], field: &str) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(ConfigError::invalid(field, "must not be empty"));
    }
    if !(grid[0] > 0.0) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::invalid(field, "must be positive and strictly increasing"));
    }
    Ok(())
}
