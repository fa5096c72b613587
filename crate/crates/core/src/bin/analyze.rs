use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use leo_hetnet::association::AssociationScheme;
use leo_hetnet::harness::config::sr_params_of;
use leo_hetnet::harness::{load_config, parse_config, parse_fading, run_experiment, ExperimentSpec, TABLE2_CFG};

/// Coverage and rate sweeps for multi-tier LEO downlinks, checked against Monte Carlo.
///
/// Exit status: 0 when every curve converged and met its gate, 1 when a gate
/// failed, 2 on a configuration or numerical error.
#[derive(Debug, Parser)]
#[command(name = "analyze", version)]
struct Args {
    /// Scene configuration; the bundled three-tier scene when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig2, fig3, fig4, fig5, or custom (the config's [experiment] section).
    #[arg(long, default_value = "custom")]
    preset: String,
    /// Comma-separated subset of dba,pba,rba.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Comma-separated subset of sr,rayleigh,none.
    #[arg(long, value_delimiter = ',')]
    fading: Option<Vec<String>>,
    /// Monte Carlo trials per sweep point; 0 skips the simulation.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the simulation; results do not depend on it.
    #[arg(long)]
    partitions: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    svg: bool,
}

fn run(args: Args) -> leo_hetnet::Result<bool> {
    let loaded = match &args.config {
        Some(p) => load_config(p)?,
        None => parse_config(TABLE2_CFG)?,
    };
    for w in &loaded.warnings {
        log::warn!("{w}");
    }
    let network = loaded.network;
    let mut spec = match (args.preset.as_str(), loaded.experiment) {
        ("custom", Some(e)) => e,
        (name, _) => ExperimentSpec::preset(name, &network)?,
    };
    if let Some(s) = &args.schemes {
        spec.schemes = s.iter().map(|x| x.parse::<AssociationScheme>()).collect::<Result<_, _>>()?;
    }
    if let Some(f) = &args.fading {
        let sr = sr_params_of(&network);
        spec.fadings = f.iter().map(|x| parse_fading(x, sr)).collect::<Result<_, _>>()?;
    }
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(p) = args.partitions {
        spec.partitions = p;
    }
    spec.output_dir = args.out;
    spec.svg = args.svg;

    let summary = run_experiment(&network, &spec)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    for c in summary.failed() {
        log::error!(
            "gate failed: {} (gap {:?}, tolerance {}, unconverged {})",
            c.file,
            c.gate.max_gap,
            c.gate.tolerance,
            c.gate.unconverged_points
        );
    }
    Ok(summary.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
