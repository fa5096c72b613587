//! TOML scene and experiment configuration.
//!
//! Gains are written in dBi and noise in dBm and converted at load. Unknown
//! keys are rejected, and validation failures report the line of the
//! offending key.

use std::collections::HashMap;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use super::experiment::{ExperimentSpec, Metric, SweepVariable};
use crate::association::AssociationScheme;
use crate::channel::{db_to_linear, dbm_to_watts, FadingModel, ShadowedRician};
use crate::geometry::{NetworkModel, PathLossUnit, TierConfig};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    earth_radius_km: Spanned<f64>,
    path_loss_exp: Spanned<f64>,
    noise_dbm: Spanned<f64>,
    user_main_gain_dbi: Spanned<f64>,
    user_side_gain_dbi: Spanned<f64>,
    #[serde(default)]
    path_loss_unit: Option<Spanned<PathLossUnit>>,
    fading: RawFading,
    #[serde(default)]
    tier: Vec<RawTier>,
    #[serde(default)]
    experiment: Option<RawExperiment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTier {
    altitude_km: Spanned<f64>,
    mean_count: Spanned<f64>,
    tx_power_w: Spanned<f64>,
    main_lobe_gain_dbi: Spanned<f64>,
    side_lobe_gain_dbi: Spanned<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFading {
    model: Spanned<String>,
    #[serde(default)]
    b: Option<Spanned<f64>>,
    #[serde(default)]
    omega: Option<Spanned<f64>>,
    #[serde(default)]
    m: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    #[serde(default)]
    preset: Option<Spanned<String>>,
    #[serde(default)]
    sweep: Option<Spanned<String>>,
    #[serde(default)]
    values: Option<Spanned<Vec<f64>>>,
    #[serde(default)]
    beta_db: Option<Spanned<Vec<f64>>>,
    #[serde(default)]
    metric: Option<Spanned<String>>,
    #[serde(default)]
    path_loss_exps: Option<Spanned<Vec<f64>>>,
    #[serde(default)]
    schemes: Option<Spanned<Vec<String>>>,
    #[serde(default)]
    fadings: Option<Spanned<Vec<String>>>,
    #[serde(default)]
    trials: Option<Spanned<u64>>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    partitions: Option<Spanned<usize>>,
}

/// A validated scene plus the experiment described alongside it, if any.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub network: NetworkModel,
    pub experiment: Option<ExperimentSpec>,
    /// Advisory messages that did not block loading.
    pub warnings: Vec<String>,
}

/// 1-based line of a byte offset.
fn line_of(source: &str, span: Range<usize>) -> usize {
    source[..span.start.min(source.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Lines<'a> {
    source: &'a str,
    map: HashMap<String, usize>,
}

impl<'a> Lines<'a> {
    fn record<T>(&mut self, field: impl Into<String>, value: &Spanned<T>) {
        self.map.insert(field.into(), line_of(self.source, value.span()));
    }

    fn anchor(&self, err: Error) -> Error {
        match err {
            Error::Validation {
                field,
                message,
                line: None,
            } => {
                let line = self.map.get(&field).copied();
                Error::Validation { field, message, line }
            }
            other => other,
        }
    }

    fn invalid<T>(&self, field: &str, value: &Spanned<T>, message: impl Into<String>) -> Error {
        Error::Validation {
            field: field.to_string(),
            message: message.into(),
            line: Some(line_of(self.source, value.span())),
        }
    }
}

/// Parses a fading label as used in configs and on the command line.
/// `sr` takes its parameters from `sr_params`.
pub fn parse_fading(label: &str, sr_params: ShadowedRician) -> Result<FadingModel> {
    match label.trim().to_ascii_lowercase().as_str() {
        "sr" | "shadowed_rician" => Ok(FadingModel::ShadowedRician(sr_params)),
        "rayleigh" => Ok(FadingModel::Rayleigh),
        "none" | "non_fading" | "nonfading" => Ok(FadingModel::NonFading),
        other => Err(Error::invalid("fadings", format!("unknown fading model {other:?}"))),
    }
}

/// Shadowed-Rician parameters of `network`, or the standard ones when it
/// uses another fading model.
pub fn sr_params_of(network: &NetworkModel) -> ShadowedRician {
    match network.fading {
        FadingModel::ShadowedRician(p) => p,
        _ => match FadingModel::table2_shadowed_rician() {
            FadingModel::ShadowedRician(p) => p,
            _ => unreachable!(),
        },
    }
}

/// Parses and validates configuration text.
pub fn parse_config(source: &str) -> Result<LoadedConfig> {
    let raw: RawConfig = toml::from_str(source).map_err(|e| {
        let line = e.span().map(|s| line_of(source, s));
        match line {
            Some(l) => Error::Parse(format!("line {l}: {}", e.message())),
            None => Error::Parse(e.message().to_string()),
        }
    })?;
    let mut lines = Lines {
        source,
        map: HashMap::new(),
    };
    lines.record("earth_radius_km", &raw.earth_radius_km);
    lines.record("path_loss_exp", &raw.path_loss_exp);
    lines.record("noise_power_w", &raw.noise_dbm);
    lines.record("user_main_gain", &raw.user_main_gain_dbi);
    lines.record("user_side_gain", &raw.user_side_gain_dbi);

    let fading = {
        let f = &raw.fading;
        lines.record("fading", &f.model);
        match f.model.get_ref().as_str() {
            "shadowed_rician" | "sr" => {
                let need = |v: &Option<Spanned<f64>>, name: &str| -> Result<f64> {
                    v.as_ref()
                        .map(|s| *s.get_ref())
                        .ok_or_else(|| lines.invalid(&format!("fading.{name}"), &f.model, "missing shadowed-Rician parameter"))
                };
                let params = ShadowedRician {
                    b: need(&f.b, "b")?,
                    omega: need(&f.omega, "omega")?,
                    m: need(&f.m, "m")?,
                };
                for (name, v) in [("b", &f.b), ("omega", &f.omega), ("m", &f.m)] {
                    lines.record(format!("fading.{name}"), v.as_ref().expect("checked above"));
                }
                FadingModel::ShadowedRician(params)
            }
            "rayleigh" | "non_fading" | "none" => {
                if let Some(extra) = f.b.as_ref().or(f.omega.as_ref()).or(f.m.as_ref()) {
                    return Err(lines.invalid("fading", extra, "parameters b, omega, m apply to shadowed_rician only"));
                }
                if f.model.get_ref() == "rayleigh" {
                    FadingModel::Rayleigh
                } else {
                    FadingModel::NonFading
                }
            }
            other => {
                return Err(lines.invalid(
                    "fading.model",
                    &f.model,
                    format!("unknown model {other:?}; expected shadowed_rician, rayleigh or non_fading"),
                ))
            }
        }
    };

    let mut tiers = Vec::with_capacity(raw.tier.len());
    for (i, t) in raw.tier.iter().enumerate() {
        lines.record(format!("tiers[{i}].altitude_km"), &t.altitude_km);
        lines.record(format!("tiers[{i}].mean_count"), &t.mean_count);
        lines.record(format!("tiers[{i}].tx_power_w"), &t.tx_power_w);
        lines.record(format!("tiers[{i}].main_lobe_gain"), &t.main_lobe_gain_dbi);
        lines.record(format!("tiers[{i}].side_lobe_gain"), &t.side_lobe_gain_dbi);
        tiers.push(TierConfig {
            altitude_km: *t.altitude_km.get_ref(),
            mean_count: *t.mean_count.get_ref(),
            tx_power_w: *t.tx_power_w.get_ref(),
            main_lobe_gain: db_to_linear(*t.main_lobe_gain_dbi.get_ref()),
            side_lobe_gain: db_to_linear(*t.side_lobe_gain_dbi.get_ref()),
        });
    }

    let network = NetworkModel {
        tiers,
        earth_radius_km: *raw.earth_radius_km.get_ref(),
        path_loss_exp: *raw.path_loss_exp.get_ref(),
        noise_power_w: dbm_to_watts(*raw.noise_dbm.get_ref()),
        user_main_gain: db_to_linear(*raw.user_main_gain_dbi.get_ref()),
        user_side_gain: db_to_linear(*raw.user_side_gain_dbi.get_ref()),
        fading,
        path_loss_unit: raw.path_loss_unit.map(|u| *u.get_ref()).unwrap_or_default(),
    };
    let warnings = network.validate().map_err(|e| lines.anchor(e))?;

    let experiment = match &raw.experiment {
        Some(e) => Some(parse_experiment(e, &network, &lines)?),
        None => None,
    };
    Ok(LoadedConfig {
        network,
        experiment,
        warnings,
    })
}

fn parse_experiment(raw: &RawExperiment, network: &NetworkModel, lines: &Lines) -> Result<ExperimentSpec> {
    let mut spec = match &raw.preset {
        Some(p) => ExperimentSpec::preset(p.get_ref(), network).map_err(|_| {
            lines.invalid(
                "experiment.preset",
                p,
                format!("unknown preset {:?}; expected fig2, fig3, fig4, fig5 or custom", p.get_ref()),
            )
        })?,
        None => ExperimentSpec::custom(network),
    };
    if let Some(s) = &raw.sweep {
        spec.sweep = s
            .get_ref()
            .parse::<SweepVariable>()
            .map_err(|e| lines.invalid("experiment.sweep", s, e.to_string()))?;
    }
    if let Some(v) = &raw.values {
        spec.sweep_values = v.get_ref().clone();
    }
    if let Some(b) = &raw.beta_db {
        spec.beta_db = b.get_ref().clone();
    }
    if let Some(m) = &raw.metric {
        spec.metric = m
            .get_ref()
            .parse::<Metric>()
            .map_err(|e| lines.invalid("experiment.metric", m, e.to_string()))?;
    }
    if let Some(a) = &raw.path_loss_exps {
        spec.path_loss_exps = a.get_ref().clone();
    }
    if let Some(s) = &raw.schemes {
        spec.schemes = s
            .get_ref()
            .iter()
            .map(|x| x.parse::<AssociationScheme>())
            .collect::<Result<_>>()
            .map_err(|e| lines.invalid("experiment.schemes", s, e.to_string()))?;
    }
    if let Some(f) = &raw.fadings {
        let sr = sr_params_of(network);
        spec.fadings = f
            .get_ref()
            .iter()
            .map(|x| parse_fading(x, sr))
            .collect::<Result<_>>()
            .map_err(|e| lines.invalid("experiment.fadings", f, e.to_string()))?;
    }
    if let Some(t) = &raw.trials {
        spec.trials = *t.get_ref();
    }
    if let Some(s) = raw.seed {
        spec.seed = s;
    }
    if let Some(p) = &raw.partitions {
        spec.partitions = *p.get_ref();
    }
    let mut anchors = HashMap::new();
    for (field, line) in [
        ("sweep_values", raw.values.as_ref().map(|v| line_of(lines.source, v.span()))),
        ("schemes", raw.schemes.as_ref().map(|v| line_of(lines.source, v.span()))),
        ("fadings", raw.fadings.as_ref().map(|v| line_of(lines.source, v.span()))),
        ("trials", raw.trials.as_ref().map(|v| line_of(lines.source, v.span()))),
        ("partitions", raw.partitions.as_ref().map(|v| line_of(lines.source, v.span()))),
        ("beta_db", raw.beta_db.as_ref().map(|v| line_of(lines.source, v.span()))),
        ("path_loss_exps", raw.path_loss_exps.as_ref().map(|v| line_of(lines.source, v.span()))),
    ] {
        if let Some(l) = line {
            anchors.insert(format!("experiment.{field}"), l);
        }
    }
    spec.validate().map_err(|e| match e {
        Error::Validation { field, message, .. } => {
            let line = anchors.get(&field).copied();
            Error::Validation { field, message, line }
        }
        other => other,
    })?;
    Ok(spec)
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_config(&text)
}

/// Text of the bundled three-tier configuration.
pub const TABLE2_CFG: &str = include_str!("../../configs/table2.cfg");
