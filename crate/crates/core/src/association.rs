//! Association schemes, their tier probabilities and the serving-link laws
//! they induce.
//!
//! Every scheme picks among the per-tier nearest satellites (the candidates).
//! Conditioning on tier k serving at distance r constrains the other
//! candidates, which is captured by one exclusion radius per tier:
//! no tier-j satellite lies closer than that radius. The same radii feed the
//! interference integrals of the coverage module.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::geometry::{contact_distance_pdf, NetworkModel};
use crate::numerics::quadrature::{adaptive_quad_with, QuadOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssociationScheme {
    /// Nearest candidate.
    Dba,
    /// Candidate with the largest average received power.
    Pba,
    /// Uniformly random candidate tier.
    Rba,
}

impl AssociationScheme {
    pub const ALL: [AssociationScheme; 3] = [AssociationScheme::Dba, AssociationScheme::Pba, AssociationScheme::Rba];

    pub fn label(self) -> &'static str {
        match self {
            AssociationScheme::Dba => "dba",
            AssociationScheme::Pba => "pba",
            AssociationScheme::Rba => "rba",
        }
    }
}

impl fmt::Display for AssociationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AssociationScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dba" => Ok(AssociationScheme::Dba),
            "pba" => Ok(AssociationScheme::Pba),
            "rba" => Ok(AssociationScheme::Rba),
            other => Err(Error::invalid("schemes", format!("unknown scheme {other:?}"))),
        }
    }
}

/// Range of the average received power ξ = ϱ·r^{−α} from one tier's candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBounds {
    pub xi_min: f64,
    pub xi_max: f64,
    /// ϱ_k = h̄·P_k·G_m,k·G_m^U·u^{−α}, so that ξ = ϱ_k·r_km^{−α}.
    pub rho: f64,
}

impl PowerBounds {
    pub fn new(network: &NetworkModel, k: usize) -> Self {
        let rho = network.fading.mean_gain() * network.intended_coef(k);
        let alpha = network.path_loss_exp;
        PowerBounds {
            xi_min: rho * network.max_distance(k).powf(-alpha),
            xi_max: rho * network.altitude(k).powf(-alpha),
            rho,
        }
    }

    /// Distance at which this tier's candidate delivers average power ξ.
    pub fn distance_at(&self, xi: f64, alpha: f64) -> f64 {
        (self.rho / xi).powf(1.0 / alpha)
    }
}

/// Density of the average received power from tier `k`'s candidate; 0
/// outside (ξ_min, ξ_max].
pub fn avg_power_pdf(xi: f64, k: usize, network: &NetworkModel) -> f64 {
    let pb = PowerBounds::new(network, k);
    if !(xi > pb.xi_min && xi <= pb.xi_max) {
        return 0.0;
    }
    let alpha = network.path_loss_exp;
    let c = network.hazard(k);
    let h = network.altitude(k);
    let r2 = (pb.rho / xi).powf(2.0 / alpha);
    2.0 * c / alpha * pb.rho.powf(2.0 / alpha) * xi.powf(-(2.0 + alpha) / alpha) * (-c * (r2 - h * h)).exp()
}

/// Exclusion radius for tier `j` given that tier `k` serves at distance `r`.
///
/// * DbA: nobody is nearer than the server, so max(r, H_j).
/// * PbA: tier j's candidate delivers less average power, so it lies beyond
///   r·(ϱ_j/ϱ_k)^{1/α} (never below H_j).
/// * RbA: only the serving tier is constrained (its candidate is the nearest
///   in that tier); other tiers start at H_j.
pub fn exclusion_radius(scheme: AssociationScheme, network: &NetworkModel, k: usize, j: usize, r: f64) -> f64 {
    let h = network.altitude(j);
    match scheme {
        AssociationScheme::Dba => r.max(h),
        AssociationScheme::Pba => {
            let ratio = PowerBounds::new(network, j).rho / PowerBounds::new(network, k).rho;
            (r * ratio.powf(1.0 / network.path_loss_exp)).max(h)
        }
        AssociationScheme::Rba => {
            if j == k {
                r
            } else {
                h
            }
        }
    }
}

/// Per-tier probabilities and cached normalizers for all three schemes.
#[derive(Debug, Clone)]
pub struct AssociationModel {
    network: NetworkModel,
    bounds: Vec<PowerBounds>,
    /// (ϱ_j/ϱ_k)^{1/α} indexed [k][j].
    pba_scale: Vec<Vec<f64>>,
    dba: Vec<f64>,
    pba: Vec<f64>,
    rba: Vec<f64>,
    opts: QuadOptions,
}

impl AssociationModel {
    pub fn new(network: &NetworkModel, opts: QuadOptions) -> Result<Self> {
        network.validate()?;
        let k_count = network.num_tiers();
        let bounds: Vec<PowerBounds> = (0..k_count).map(|k| PowerBounds::new(network, k)).collect();
        let alpha = network.path_loss_exp;
        let pba_scale = (0..k_count)
            .map(|k| (0..k_count).map(|j| (bounds[j].rho / bounds[k].rho).powf(1.0 / alpha)).collect())
            .collect();
        let mut model = Self {
            network: network.clone(),
            bounds,
            pba_scale,
            dba: Vec::new(),
            pba: Vec::new(),
            rba: vec![1.0 / k_count as f64; k_count],
            opts,
        };
        model.dba = (0..k_count)
            .map(|k| model.integrate_mass(AssociationScheme::Dba, k))
            .collect::<Result<_>>()?;
        model.pba = (0..k_count).map(|k| model.pba_mass_in_power(k)).collect::<Result<_>>()?;
        Ok(model)
    }

    pub fn network(&self) -> &NetworkModel {
        &self.network
    }

    pub fn bounds(&self, k: usize) -> PowerBounds {
        self.bounds[k]
    }

    pub fn probabilities(&self, scheme: AssociationScheme) -> &[f64] {
        match scheme {
            AssociationScheme::Dba => &self.dba,
            AssociationScheme::Pba => &self.pba,
            AssociationScheme::Rba => &self.rba,
        }
    }

    /// Exclusion radius with the PbA power ratios taken from the cache.
    pub fn exclusion(&self, scheme: AssociationScheme, k: usize, j: usize, r: f64) -> f64 {
        let h = self.network.altitude(j);
        match scheme {
            AssociationScheme::Dba => r.max(h),
            AssociationScheme::Pba => (r * self.pba_scale[k][j]).max(h),
            AssociationScheme::Rba => {
                if j == k {
                    r
                } else {
                    h
                }
            }
        }
    }

    /// Joint density of {tier k serves} and {serving distance ≈ r}:
    /// f_D(r; k)·Π_{j≠k} P{tier-j candidate beyond its exclusion radius}.
    /// For RbA the tier choice is independent, so this is f_D(r; k) alone and
    /// the 1/K factor stays in the association probability.
    pub fn joint_density(&self, scheme: AssociationScheme, k: usize, r: f64) -> f64 {
        let n = &self.network;
        let base = contact_distance_pdf(r, n.tier(k), n.earth_radius_km);
        if base == 0.0 || scheme == AssociationScheme::Rba {
            return base;
        }
        let mut p = base;
        for j in 0..n.num_tiers() {
            if j != k {
                p *= n.survival(j, self.exclusion(scheme, k, j, r));
            }
        }
        p
    }

    /// Serving-distance density conditioned on association with tier `k`.
    pub fn serving_distance_pdf(&self, scheme: AssociationScheme, k: usize, r: f64) -> f64 {
        match scheme {
            AssociationScheme::Rba => self.joint_density(scheme, k, r),
            _ => {
                let a = self.probabilities(scheme)[k];
                if a > 0.0 {
                    self.joint_density(scheme, k, r) / a
                } else {
                    0.0
                }
            }
        }
    }

    /// DbA density of the serving distance given that tier k serves.
    pub fn cond_distance_pdf_dba(&self, r: f64, k: usize) -> f64 {
        self.serving_distance_pdf(AssociationScheme::Dba, k, r)
    }

    /// RbA conditional density: the tier's own contact-distance density.
    pub fn cond_distance_pdf_rba(&self, r: f64, k: usize) -> f64 {
        self.serving_distance_pdf(AssociationScheme::Rba, k, r)
    }

    /// PbA conditional density of the serving average power ξ.
    pub fn cond_power_pdf_pba(&self, xi: f64, k: usize) -> f64 {
        let a = self.pba[k];
        if a > 0.0 {
            self.pba_power_integrand(k, xi) / a
        } else {
            0.0
        }
    }

    /// Points in [H_k, R_max_k] where the joint density has kinks: the
    /// distances at which some other tier's exclusion radius crosses H_j or R_max_j.
    pub fn breakpoints(&self, scheme: AssociationScheme, k: usize) -> Vec<f64> {
        let n = &self.network;
        let (lo, hi) = (n.altitude(k), n.max_distance(k));
        let mut pts = vec![lo, hi];
        if scheme != AssociationScheme::Rba {
            for j in 0..n.num_tiers() {
                if j == k {
                    continue;
                }
                let scale = match scheme {
                    AssociationScheme::Pba => self.pba_scale[k][j],
                    _ => 1.0,
                };
                for edge in [n.altitude(j), n.max_distance(j)] {
                    let r = edge / scale;
                    if r > lo && r < hi {
                        pts.push(r);
                    }
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    fn integrate_mass(&self, scheme: AssociationScheme, k: usize) -> Result<f64> {
        let pts = self.breakpoints(scheme, k);
        let q = adaptive_quad_with(|r: f64| self.joint_density(scheme, k, r), &pts, &self.opts);
        let target = self.opts.target(q.value.abs());
        q.into_result(&format!("{scheme} association, tier {}", k + 1), target)
    }

    fn pba_power_integrand(&self, k: usize, xi: f64) -> f64 {
        let n = &self.network;
        let base = avg_power_pdf(xi, k, n);
        if base == 0.0 {
            return 0.0;
        }
        let alpha = n.path_loss_exp;
        let mut p = base;
        for j in 0..n.num_tiers() {
            if j != k {
                p *= n.survival(j, self.bounds[j].distance_at(xi, alpha));
            }
        }
        p
    }

    /// PbA association probability as an integral over the serving power.
    fn pba_mass_in_power(&self, k: usize) -> Result<f64> {
        let b = self.bounds[k];
        let mut pts = vec![b.xi_min, b.xi_max];
        for (j, bj) in self.bounds.iter().enumerate() {
            if j != k {
                for edge in [bj.xi_min, bj.xi_max] {
                    if edge > b.xi_min && edge < b.xi_max {
                        pts.push(edge);
                    }
                }
            }
        }
        let q = adaptive_quad_with(|xi: f64| self.pba_power_integrand(k, xi), &pts, &self.opts);
        let target = self.opts.target(q.value.abs());
        q.into_result(&format!("pba association, tier {}", k + 1), target)
    }
}

/// DbA tier probabilities.
pub fn assoc_prob_dba(network: &NetworkModel) -> Result<Vec<f64>> {
    Ok(AssociationModel::new(network, default_opts())?.dba)
}

/// PbA tier probabilities.
pub fn assoc_prob_pba(network: &NetworkModel) -> Result<Vec<f64>> {
    Ok(AssociationModel::new(network, default_opts())?.pba)
}

/// RbA tier probabilities: 1/K each.
pub fn assoc_prob_rba(network: &NetworkModel) -> Vec<f64> {
    let k = network.num_tiers();
    vec![1.0 / k as f64; k]
}

fn default_opts() -> QuadOptions {
    crate::numerics::tolerance::Tolerances::from_env().association
}
