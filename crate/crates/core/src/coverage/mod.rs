//! Coverage probability P{SINR ≥ β} under each association scheme and fading
//! model, and the ergodic spectral efficiency derived from it.
//!
//! Every evaluation conditions on tier k serving at distance r. The serving
//! state is then the unfaded intended power S(r) plus one exclusion radius
//! per tier, and the conditional coverage is averaged over the joint density
//! of (serving tier, serving distance):
//!
//! * shadowed Rician: 1 − F_h(β(Ĩ + σ²)/S) with Ĩ the conditional mean
//!   interference (an approximation, labelled `approx`);
//! * Rayleigh: e^{−βσ²/S}·L_I(β/S), exact;
//! * non-fading: P{S − βI ≥ βσ²} by Gil-Pelaez inversion, exact.

pub mod interference;
mod rate;

use std::cell::RefCell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::association::{AssociationModel, AssociationScheme};
use crate::channel::{FadingModel, SrCdf};
use crate::geometry::NetworkModel;
use crate::numerics::oscillatory::{oscillatory_semiinf, OscillatoryOptions};
use crate::numerics::quadrature::{adaptive_quad_with, QuadOptions};
use crate::numerics::tolerance::Tolerances;
use crate::{Error, Result};

pub use interference::{
    chernoff_lower_nonfading, chernoff_upper_nonfading, interference_variance, log_laplace_nonfading, log_laplace_rayleigh, mean_interference, theta, varpi,
};
pub use rate::{ergodic_rate, SpectralEfficiency};

/// Mean interference under DbA with the server at distance r0.
pub fn mean_interference_dba(r0: f64, network: &NetworkModel) -> f64 {
    let radii: Vec<f64> = (0..network.num_tiers()).map(|j| r0.max(network.altitude(j))).collect();
    mean_interference(network, &radii, network.fading.mean_gain())
}

/// Mean interference under PbA when the serving average power is ξ: tier j's
/// satellites all deliver less than ξ, i.e. lie beyond (ϱ_j/ξ)^{1/α}.
pub fn mean_interference_pba(xi: f64, network: &NetworkModel) -> f64 {
    let alpha = network.path_loss_exp;
    let radii: Vec<f64> = (0..network.num_tiers())
        .map(|j| {
            crate::association::PowerBounds::new(network, j)
                .distance_at(xi, alpha)
                .max(network.altitude(j))
        })
        .collect();
    mean_interference(network, &radii, network.fading.mean_gain())
}

/// Mean interference under RbA with tier `k` serving at r0.
pub fn mean_interference_rba(r0: f64, k: usize, network: &NetworkModel) -> f64 {
    let radii: Vec<f64> = (0..network.num_tiers())
        .map(|j| if j == k { r0 } else { network.altitude(j) })
        .collect();
    mean_interference(network, &radii, network.fading.mean_gain())
}

/// One coverage evaluation request.
#[derive(Debug, Clone)]
pub struct CoverageQuery {
    pub scheme: AssociationScheme,
    pub fading: FadingModel,
    /// Linear SINR thresholds, strictly positive and ascending.
    pub beta_grid: Vec<f64>,
    pub network: NetworkModel,
}

impl CoverageQuery {
    pub fn validate(&self) -> Result<()> {
        if self.beta_grid.is_empty() {
            return Err(Error::invalid("beta_grid", "empty"));
        }
        if self.beta_grid.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::invalid("beta_grid", "thresholds must be positive and finite"));
        }
        if self.beta_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("beta_grid", "thresholds must be strictly ascending"));
        }
        Ok(())
    }
}

/// Whether a curve rests on the mean-interference approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisKind {
    Exact,
    Approx,
}

impl AnalysisKind {
    pub fn of(fading: &FadingModel) -> Self {
        match fading {
            FadingModel::ShadowedRician(_) => AnalysisKind::Approx,
            _ => AnalysisKind::Exact,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AnalysisKind::Exact => "exact",
            AnalysisKind::Approx => "approx",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageCurve {
    pub scheme: AssociationScheme,
    pub kind: AnalysisKind,
    pub beta_grid: Vec<f64>,
    /// Conditional coverage given association with each tier, `[tier][beta]`.
    pub per_tier: Vec<Vec<f64>>,
    pub assoc: Vec<f64>,
    /// Σ_k assoc[k]·per_tier[k][β].
    pub total: Vec<f64>,
    /// True where some quadrature missed its tolerance.
    pub flagged: Vec<bool>,
}

impl CoverageCurve {
    pub fn any_flagged(&self) -> bool {
        self.flagged.iter().any(|&f| f)
    }
}

/// Unfaded intended power and per-tier exclusion radii for a server of tier
/// k at distance r.
#[derive(Debug, Clone)]
pub struct ServingState {
    pub signal: f64,
    pub radii: Vec<f64>,
}

/// Evaluates coverage for one network and fading model; caches the
/// association normalizers and the shadowed-Rician series.
#[derive(Debug, Clone)]
pub struct CoverageEngine {
    network: NetworkModel,
    assoc: AssociationModel,
    sr: Option<SrCdf>,
    tol: Tolerances,
}

/// Result of one conditional coverage evaluation.
#[derive(Debug, Clone, Copy)]
struct Point {
    value: f64,
    converged: bool,
}

impl CoverageEngine {
    pub fn new(network: &NetworkModel, tol: Tolerances) -> Result<Self> {
        let assoc = AssociationModel::new(network, tol.association)?;
        let sr = match network.fading {
            FadingModel::ShadowedRician(p) => Some(SrCdf::new(p, tol.sr_series_tail)?),
            _ => None,
        };
        Ok(Self {
            network: network.clone(),
            assoc,
            sr,
            tol,
        })
    }

    /// Engine for `network` with its fading replaced.
    pub fn with_fading(network: &NetworkModel, fading: FadingModel, tol: Tolerances) -> Result<Self> {
        let mut n = network.clone();
        n.fading = fading;
        Self::new(&n, tol)
    }

    pub fn network(&self) -> &NetworkModel {
        &self.network
    }

    pub fn association(&self) -> &AssociationModel {
        &self.assoc
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn kind(&self) -> AnalysisKind {
        AnalysisKind::of(&self.network.fading)
    }

    pub fn serving_state(&self, scheme: AssociationScheme, k: usize, r: f64) -> ServingState {
        let n = &self.network;
        ServingState {
            signal: n.intended_coef(k) * r.powf(-n.path_loss_exp),
            radii: (0..n.num_tiers()).map(|j| self.assoc.exclusion(scheme, k, j, r)).collect(),
        }
    }

    /// Coverage conditioned on one serving state.
    pub fn conditional_coverage(&self, state: &ServingState, beta: f64) -> Result<(f64, bool)> {
        let n = &self.network;
        let noise = n.noise_power_w;
        match n.fading {
            FadingModel::ShadowedRician(_) => {
                let mean = mean_interference(n, &state.radii, n.fading.mean_gain());
                let x = beta * (mean + noise) / state.signal;
                let f = self.sr.as_ref().expect("series built for shadowed Rician").cdf(x)?;
                Ok((1.0 - f, true))
            }
            FadingModel::Rayleigh => {
                let s = beta / state.signal;
                let ln = log_laplace_rayleigh(n, &state.radii, s)? - s * noise;
                Ok((ln.exp(), true))
            }
            FadingModel::NonFading => self.gil_pelaez(state, beta),
        }
    }

    /// P{S − βI ≥ βσ²} for deterministic link gains.
    ///
    /// With τ = tS the inversion reads
    /// 1/2 + (1/π)∫₀^∞ Im{e^{iτ(1 − βσ²/S)}·L_I(iτβ/S)}/τ dτ.
    fn gil_pelaez(&self, state: &ServingState, beta: f64) -> Result<(f64, bool)> {
        let n = &self.network;
        let x = beta * n.noise_power_w / state.signal;
        if x >= 1.0 {
            // Interference is non-negative, so the signal alone cannot clear the threshold.
            return Ok((0.0, true));
        }
        let interferers = state
            .radii
            .iter()
            .enumerate()
            .any(|(j, &a)| a < n.max_distance(j) && n.interfering_coef(j) > 0.0);
        if !interferers {
            return Ok((1.0, true));
        }
        let scale = beta / state.signal;
        let mean = mean_interference(n, &state.radii, 1.0) * scale;
        let sd = interference_variance(n, &state.radii, 1.0).sqrt() * scale;
        let margin = 1.0 - x;
        // Skip the inversion when a Chernoff bound already pins the answer.
        let cutoff = (self.tol.gil_pelaez_abs * 1e-2).ln();
        if mean < margin && interference::chernoff_upper_nonfading(n, &state.radii, scale, margin) < cutoff {
            return Ok((1.0, true));
        }
        if mean > margin && interference::chernoff_lower_nonfading(n, &state.radii, scale, margin)? < cutoff {
            return Ok((0.0, true));
        }
        let omega = (margin - mean).abs().max(2.0 * sd).max(margin * 1e-3);

        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let integrand = |tau: f64| -> Complex64 {
            match log_laplace_nonfading(n, &state.radii, Complex64::new(0.0, tau * scale)) {
                Ok(ln) => (ln + Complex64::new(0.0, tau * margin)).exp(),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(f64::NAN, f64::NAN)
                }
            }
        };
        let opts = OscillatoryOptions {
            abs_tol: self.tol.gil_pelaez_abs * std::f64::consts::PI,
            max_panels: self.tol.gil_pelaez_max_panels,
        };
        let q = oscillatory_semiinf(integrand, omega, &opts);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let p = 0.5 + q.value / std::f64::consts::PI;
        Ok((clamp_probability(p), q.converged))
    }

    /// Conditional coverage of tier `k` at threshold `beta`.
    fn tier_point(&self, scheme: AssociationScheme, k: usize, beta: f64, opts: &QuadOptions) -> Result<Point> {
        let assoc = self.assoc.probabilities(scheme)[k];
        if assoc == 0.0 {
            return Ok(Point {
                value: 0.0,
                converged: true,
            });
        }
        let pts = self.assoc.breakpoints(scheme, k);
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let inner_ok = RefCell::new(true);
        let q = adaptive_quad_with(
            |r: f64| {
                let density = self.assoc.joint_density(scheme, k, r);
                if density == 0.0 {
                    return 0.0;
                }
                let state = self.serving_state(scheme, k, r);
                match self.conditional_coverage(&state, beta) {
                    Ok((v, ok)) => {
                        if !ok {
                            *inner_ok.borrow_mut() = false;
                        }
                        v * density
                    }
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            &pts,
            opts,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let normalizer = match scheme {
            AssociationScheme::Rba => 1.0,
            _ => assoc,
        };
        Ok(Point {
            value: clamp_probability(q.value / normalizer),
            converged: q.converged && inner_ok.into_inner(),
        })
    }

    fn outer_options(&self) -> QuadOptions {
        match self.network.fading {
            FadingModel::NonFading => {
                let floor = self.tol.gil_pelaez_abs;
                QuadOptions::new(
                    self.tol.coverage.abs_tol.max(floor),
                    self.tol.coverage.rel_tol.max(floor),
                )
            }
            _ => self.tol.coverage,
        }
    }

    /// Conditional coverage of tier `k`; the flag is false if any quadrature missed its target.
    pub fn tier_coverage(&self, scheme: AssociationScheme, k: usize, beta: f64) -> Result<(f64, bool)> {
        let p = self.tier_point(scheme, k, beta, &self.outer_options())?;
        Ok((p.value, p.converged))
    }

    /// Total coverage Σ_k A_k·P_k(β) and its convergence flag.
    pub fn total_coverage(&self, scheme: AssociationScheme, beta: f64) -> Result<(f64, bool)> {
        let assoc = self.assoc.probabilities(scheme);
        let mut total = 0.0;
        let mut ok = true;
        for (k, &a) in assoc.iter().enumerate() {
            let (v, c) = self.tier_coverage(scheme, k, beta)?;
            total += a * v;
            ok &= c;
        }
        Ok((total, ok))
    }

    /// Full curve over `betas`; grid points run in parallel.
    pub fn curve(&self, scheme: AssociationScheme, betas: &[f64]) -> Result<CoverageCurve> {
        let k_count = self.network.num_tiers();
        let opts = self.outer_options();
        let cells: Vec<(usize, usize)> = (0..k_count).flat_map(|k| (0..betas.len()).map(move |b| (k, b))).collect();
        let points: Vec<Point> = cells
            .par_iter()
            .map(|&(k, b)| self.tier_point(scheme, k, betas[b], &opts))
            .collect::<Result<_>>()?;
        let mut per_tier = vec![vec![0.0; betas.len()]; k_count];
        let mut flagged = vec![false; betas.len()];
        for (&(k, b), p) in cells.iter().zip(&points) {
            per_tier[k][b] = p.value;
            flagged[b] |= !p.converged;
        }
        let assoc = self.assoc.probabilities(scheme).to_vec();
        let total = (0..betas.len())
            .map(|b| (0..k_count).map(|k| assoc[k] * per_tier[k][b]).sum())
            .collect();
        Ok(CoverageCurve {
            scheme,
            kind: self.kind(),
            beta_grid: betas.to_vec(),
            per_tier,
            assoc,
            total,
            flagged,
        })
    }

    /// Average ergodic rate Σ_k A_k ∫₀^∞ P_k(β)/(1+β) dβ in nats/s/Hz.
    pub fn spectral_efficiency(&self, scheme: AssociationScheme) -> Result<SpectralEfficiency> {
        let assoc = self.assoc.probabilities(scheme).to_vec();
        let alpha = self.network.path_loss_exp;
        let opts = self.outer_options();
        let per_tier = (0..self.network.num_tiers())
            .into_par_iter()
            .map(|k| {
                let failure: RefCell<Option<Error>> = RefCell::new(None);
                let flag = RefCell::new(true);
                let q = ergodic_rate(
                    |beta| match self.tier_point(scheme, k, beta, &opts) {
                        Ok(p) => {
                            if !p.converged {
                                *flag.borrow_mut() = false;
                            }
                            p.value
                        }
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            f64::NAN
                        }
                    },
                    alpha,
                    1e-6,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                Ok((q.value, q.abs_error, q.converged && flag.into_inner()))
            })
            .collect::<Result<Vec<_>>>()?;
        let total = per_tier.iter().zip(&assoc).map(|(p, a)| a * p.0).sum();
        let abs_error = per_tier.iter().zip(&assoc).map(|(p, a)| a * p.1).sum();
        Ok(SpectralEfficiency {
            scheme,
            total,
            per_tier: per_tier.iter().map(|p| p.0).collect(),
            assoc,
            abs_error,
            converged: per_tier.iter().all(|p| p.2),
        })
    }
}

fn clamp_probability(p: f64) -> f64 {
    if p < -1e-4 || p > 1.0 + 1e-4 {
        log::warn!("coverage value {p} clamped to [0, 1]");
    }
    p.clamp(0.0, 1.0)
}

/// Coverage curve under the shadowed-Rician mean-interference approximation.
pub fn coverage_sr(scheme: AssociationScheme, query: &CoverageQuery) -> Result<CoverageCurve> {
    if !matches!(query.fading, FadingModel::ShadowedRician(_)) {
        return Err(Error::invalid("fading", "coverage_sr needs shadowed-Rician fading"));
    }
    coverage_with(scheme, query)
}

/// Exact coverage curve under Rayleigh fading.
pub fn coverage_rayleigh(scheme: AssociationScheme, query: &CoverageQuery) -> Result<CoverageCurve> {
    if query.fading != FadingModel::Rayleigh {
        return Err(Error::invalid("fading", "coverage_rayleigh needs Rayleigh fading"));
    }
    coverage_with(scheme, query)
}

/// Exact coverage curve without fading, by Gil-Pelaez inversion.
pub fn coverage_nonfading(scheme: AssociationScheme, query: &CoverageQuery) -> Result<CoverageCurve> {
    if query.fading != FadingModel::NonFading {
        return Err(Error::invalid("fading", "coverage_nonfading needs the non-fading model"));
    }
    coverage_with(scheme, query)
}

/// Coverage for any fading model in `query`.
pub fn coverage(query: &CoverageQuery) -> Result<CoverageCurve> {
    coverage_with(query.scheme, query)
}

fn coverage_with(scheme: AssociationScheme, query: &CoverageQuery) -> Result<CoverageCurve> {
    query.validate()?;
    let engine = CoverageEngine::with_fading(&query.network, query.fading, Tolerances::from_env())?;
    engine.curve(scheme, &query.beta_grid)
}

/// Ergodic rate for `scheme` under the network's own fading model.
pub fn spectral_efficiency(scheme: AssociationScheme, fading: FadingModel, network: &NetworkModel) -> Result<SpectralEfficiency> {
    CoverageEngine::with_fading(network, fading, Tolerances::from_env())?.spectral_efficiency(scheme)
}

/// `count` thresholds evenly spaced in dB from `lo_db` to `hi_db`, as linear ratios.
pub fn beta_grid_db(lo_db: f64, hi_db: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![crate::channel::db_to_linear(lo_db)];
    }
    (0..count)
        .map(|i| crate::channel::db_to_linear(lo_db + (hi_db - lo_db) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Default threshold grid: 81 points from −20 to 40 dB.
pub fn default_beta_grid() -> Vec<f64> {
    beta_grid_db(-20.0, 40.0, 81)
}

#[cfg(test)]
mod tests;
