//! Experiment driver around `ratchet-core`: JSON config in, a directory of
//! `series.csv` + `summary.json` + `resolved_config.json` out.
//!
//! Outputs are a pure function of the resolved config. Thread count and
//! output directory are execution details, excluded from the resolved
//! config and its digest, and must not change a single byte of the
//! results.

pub mod config;
pub mod experiments;
pub mod output;
pub mod runner;

use config::{ConfigError, Experiment, RunConfig};
use experiments::{ExperimentOutput, RunError};
use ratchet_core::stream::SeedSpace;
use runner::RayonRunner;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// Separate code so callers can distinguish "asked for too much precision
/// from too little data" from hard failures.
pub const EXIT_FLOOR: i32 = 2;

#[derive(Debug, Clone)]
pub struct CliArgs {
    pub experiment: String,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

fn resolve_threads(args: &CliArgs, cfg: &RunConfig) -> usize {
    args.threads
        .or(cfg.threads)
        .or_else(|| {
            std::env::var("RATCHET_QSD_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1)
}

fn resolve_out_dir(args: &CliArgs, cfg: &RunConfig, experiment: Experiment) -> PathBuf {
    args.out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("runs").join(experiment.name()))
}

fn dispatch(
    experiment: Experiment,
    cfg: &RunConfig,
    runner: &RayonRunner,
) -> Result<ExperimentOutput, RunError> {
    let p = cfg.core_params().expect("validated");
    let space = SeedSpace::new(cfg.master_seed, experiment.seed_tag());
    match experiment {
        Experiment::Simulate => experiments::simulate(cfg, &p, space, runner),
        Experiment::Qsd => experiments::qsd(cfg, &p, space, runner),
        Experiment::Eta => experiments::eta(cfg, &p, space, runner),
        Experiment::Qprocess => experiments::qprocess(cfg, &p, space, runner),
        Experiment::Correlations => experiments::correlations(cfg, &p, space, runner),
        Experiment::Relaxation => experiments::relaxation(cfg, &p, space, runner),
        Experiment::Tightness => experiments::tightness(cfg, &p, space, runner),
        Experiment::Autonomy => experiments::autonomy(cfg, &p, space, runner),
        Experiment::Compare => experiments::compare(cfg, &p, space, runner),
        Experiment::Clickstats => experiments::clickstats(cfg, &p, space, runner),
    }
}

/// Run one experiment end to end. Returns the process exit code; every
/// failure also leaves an `error.json` in the output directory when that
/// directory is known.
pub fn run(args: &CliArgs) -> i32 {
    let Some(experiment) = Experiment::from_name(&args.experiment) else {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        eprintln!(
            "unknown experiment `{}`; expected one of: {}",
            args.experiment,
            names.join(", ")
        );
        return EXIT_ERROR;
    };

    let mut cfg = match config::parse_config(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            let dir = args
                .out
                .clone()
                .unwrap_or_else(|| Path::new("runs").join(experiment.name()));
            output::write_error(&dir, "config", &e.to_string());
            return EXIT_ERROR;
        }
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    let out_dir = resolve_out_dir(args, &cfg, experiment);
    let threads = resolve_threads(args, &cfg);

    if let Err(e) = cfg.validate(experiment) {
        output::write_error(&out_dir, "config", &e.to_string());
        return EXIT_ERROR;
    }

    let mut resolved = cfg.clone();
    resolved.experiment = Some(experiment);
    let (config_bytes, digest) = output::resolved_config_bytes(&resolved);

    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        output::write_error(&out_dir, "io", &format!("cannot create output directory: {e}"));
        return EXIT_ERROR;
    }

    let runner = RayonRunner::new(threads);
    let out = match dispatch(experiment, &resolved, &runner) {
        Ok(out) => out,
        Err(RunError::Floor(m)) => {
            output::write_error(&out_dir, "floor", &m);
            return EXIT_FLOOR;
        }
        Err(RunError::Sim(m)) => {
            output::write_error(&out_dir, "sim", &m);
            return EXIT_ERROR;
        }
    };

    let io = (|| -> std::io::Result<()> {
        std::fs::write(out_dir.join("resolved_config.json"), &config_bytes)?;
        output::write_series(&out_dir.join("series.csv"), &out.header, &out.rows)?;
        output::write_summary(
            &out_dir.join("summary.json"),
            experiment.name(),
            &digest,
            out.results,
            &out.flags,
        )
    })();
    if let Err(e) = io {
        output::write_error(&out_dir, "io", &e.to_string());
        return EXIT_ERROR;
    }

    println!("{} -> {} (config {})", experiment.name(), out_dir.display(), &digest[..12]);
    EXIT_OK
}

/// Library entry for tests: same pipeline as [`run`] but with an explicit
/// config value instead of a file, and errors returned instead of exit
/// codes.
pub fn run_to_dir(
    experiment: Experiment,
    cfg: &RunConfig,
    out_dir: &Path,
    threads: usize,
) -> Result<(), String> {
    cfg.validate(experiment).map_err(|e| e.to_string())?;
    let mut resolved = cfg.clone();
    resolved.experiment = Some(experiment);
    let (config_bytes, digest) = output::resolved_config_bytes(&resolved);
    std::fs::create_dir_all(out_dir).map_err(|e| e.to_string())?;
    let runner = RayonRunner::new(threads);
    let out = dispatch(experiment, &resolved, &runner).map_err(|e| e.to_string())?;
    std::fs::write(out_dir.join("resolved_config.json"), &config_bytes)
        .map_err(|e| e.to_string())?;
    output::write_series(&out_dir.join("series.csv"), &out.header, &out.rows)
        .map_err(|e| e.to_string())?;
    output::write_summary(
        &out_dir.join("summary.json"),
        experiment.name(),
        &digest,
        out.results,
        &out.flags,
    )
    .map_err(|e| e.to_string())
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Sim(e.to_string())
    }
}
