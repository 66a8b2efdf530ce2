use clap::Parser;
use ratchet_qsd::CliArgs;
use std::path::PathBuf;

/// Stochastic simulation and quasi-stationary inference for a mutation
/// accumulation model.
#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    /// Which experiment to run (simulate, qsd, eta, qprocess, correlations,
    /// relaxation, tightness, autonomy, compare, clickstats).
    experiment: String,
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: runs/<experiment>, or `out_dir` from the
    /// config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: RATCHET_QSD_THREADS or 1). Results do not
    /// depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let code = ratchet_qsd::run(&CliArgs {
        experiment: cli.experiment,
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
    });
    std::process::exit(code);
}
