//! Central record of numeric tolerances.

use std::env;

use super::quadrature::QuadOptions;

/// Environment variable selecting the tolerance profile (`default` or `strict`).
pub const PROFILE_ENV: &str = "LEO_TOLERANCE_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Default,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Association probabilities and conditional pdfs.
    pub association: QuadOptions,
    /// Outer distance integral of every coverage evaluation.
    pub coverage: QuadOptions,
    /// Gil-Pelaez inner integral, absolute.
    pub gil_pelaez_abs: f64,
    /// Hard cap on Gil-Pelaez half-period panels.
    pub gil_pelaez_max_panels: usize,
    /// Tail bound of the shadowed-Rician CDF series.
    pub sr_series_tail: f64,
    /// Hard cap on shadowed-Rician series terms.
    pub sr_series_max_terms: usize,
}

impl Tolerances {
    pub fn default_profile() -> Self {
        Self {
            association: QuadOptions::new(1e-9, 1e-7),
            coverage: QuadOptions::new(1e-9, 1e-7),
            gil_pelaez_abs: 1e-6,
            gil_pelaez_max_panels: 100_000,
            sr_series_tail: 1e-10,
            sr_series_max_terms: 10_000,
        }
    }

    /// Ten times tighter everywhere.
    pub fn strict_profile() -> Self {
        let d = Self::default_profile();
        Self {
            association: QuadOptions::new(d.association.abs_tol * 0.1, d.association.rel_tol * 0.1),
            coverage: QuadOptions::new(d.coverage.abs_tol * 0.1, d.coverage.rel_tol * 0.1),
            gil_pelaez_abs: d.gil_pelaez_abs * 0.1,
            sr_series_tail: d.sr_series_tail * 0.1,
            ..d
        }
    }

    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::Default => Self::default_profile(),
            Profile::Strict => Self::strict_profile(),
        }
    }

    /// Profile named by `LEO_TOLERANCE_PROFILE`; unset or unrecognised values give the default.
    pub fn from_env() -> Self {
        Self::for_profile(profile_from_env())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::default_profile()
    }
}

pub fn parse_profile(name: &str) -> Option<Profile> {
    match name.trim().to_ascii_lowercase().as_str() {
        "default" => Some(Profile::Default),
        "strict" => Some(Profile::Strict),
        _ => None,
    }
}

pub fn profile_from_env() -> Profile {
    match env::var(PROFILE_ENV) {
        Ok(v) => parse_profile(&v).unwrap_or_else(|| {
            log::warn!("unknown {PROFILE_ENV}={v:?}, using default");
            Profile::Default
        }),
        Err(_) => Profile::Default,
    }
}
