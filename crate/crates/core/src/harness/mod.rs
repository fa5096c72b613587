//! Configuration loading, figure presets and analytic-versus-simulation runs.

pub mod config;
pub mod experiment;
pub mod svg;

pub use config::{load_config, parse_config, parse_fading, LoadedConfig, TABLE2_CFG};
pub use experiment::{
    curve_csv, evaluate_experiment, run_experiment, Curve, ExperimentSpec, Gate, Metric, Row, RunSummary, SweepVariable,
    APPROX_GATE, EXACT_GATE, RATE_GATE,
};
