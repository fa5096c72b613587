//! A preset sweep from the bundled configuration, written to CSV and SVG.
//!
//! `cargo run --release --example experiment -- fig4 out/fig4`

use leo_hetnet::harness::{parse_config, run_experiment, ExperimentSpec, TABLE2_CFG};

fn main() -> leo_hetnet::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "fig4".into());
    let out = args.next().unwrap_or_else(|| format!("out/{preset}"));
    let loaded = parse_config(TABLE2_CFG)?;
    let mut spec = ExperimentSpec::preset(&preset, &loaded.network)?;
    spec.trials = spec.trials.min(20_000);
    spec.output_dir = out.into();
    spec.svg = true;
    let summary = run_experiment(&loaded.network, &spec)?;
    for c in &summary.curves {
        println!("{}: gap {:?} within {} -> {}", c.file, c.gate.max_gap, c.gate.tolerance, if c.gate.pass { "pass" } else { "fail" });
    }
    Ok(())
}
