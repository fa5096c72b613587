//! Multi-tier spherical constellation scene and the per-tier nearest-satellite
//! distance law.
//!
//! Lengths are kilometres throughout. A tier's nearest-satellite distance r
//! on [H, R_max] has CDF 1 − exp(−c(r² − H²)) with hazard coefficient
//! c = πλ(R⊕+H)/R⊕; mass beyond R_max is the invisibility event.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::FadingModel;
use crate::{Error, Result};

/// One spherical shell of satellites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierConfig {
    pub altitude_km: f64,
    pub mean_count: f64,
    pub tx_power_w: f64,
    /// Satellite main-lobe gain, linear.
    pub main_lobe_gain: f64,
    /// Satellite side-lobe gain, linear.
    pub side_lobe_gain: f64,
}

impl TierConfig {
    pub fn validate(&self, index: usize) -> Result<()> {
        let field = |name: &str| format!("tiers[{index}].{name}");
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(field(name), format!("must be positive and finite, got {v}")))
            }
        };
        positive(self.altitude_km, "altitude_km")?;
        positive(self.mean_count, "mean_count")?;
        positive(self.tx_power_w, "tx_power_w")?;
        positive(self.side_lobe_gain, "side_lobe_gain")?;
        positive(self.main_lobe_gain, "main_lobe_gain")?;
        if self.main_lobe_gain < self.side_lobe_gain {
            return Err(Error::invalid(
                field("main_lobe_gain"),
                format!("main lobe {} below side lobe {}", self.main_lobe_gain, self.side_lobe_gain),
            ));
        }
        Ok(())
    }
}

/// Distance unit fed to the path-loss law r^{−α}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathLossUnit {
    /// Metres: ℓ(r) = (1000·r_km)^{−α}.
    #[default]
    #[serde(alias = "metre", alias = "meter")]
    M,
    /// Kilometres: ℓ(r) = r_km^{−α}.
    #[serde(alias = "kilometre", alias = "kilometer")]
    Km,
}

impl PathLossUnit {
    /// Factor converting kilometres into the path-loss distance unit.
    pub fn scale(self) -> f64 {
        match self {
            PathLossUnit::M => 1000.0,
            PathLossUnit::Km => 1.0,
        }
    }
}

/// A complete multi-tier scene seen from the typical ground user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub tiers: Vec<TierConfig>,
    pub earth_radius_km: f64,
    pub path_loss_exp: f64,
    pub noise_power_w: f64,
    pub user_main_gain: f64,
    pub user_side_gain: f64,
    pub fading: FadingModel,
    #[serde(default)]
    pub path_loss_unit: PathLossUnit,
}

impl NetworkModel {
    /// Builds and validates a model.
    pub fn new(
        tiers: Vec<TierConfig>,
        earth_radius_km: f64,
        path_loss_exp: f64,
        noise_power_w: f64,
        user_main_gain: f64,
        user_side_gain: f64,
        fading: FadingModel,
    ) -> Result<Self> {
        let model = Self {
            tiers,
            earth_radius_km,
            path_loss_exp,
            noise_power_w,
            user_main_gain,
            user_side_gain,
            fading,
            path_loss_unit: PathLossUnit::default(),
        };
        model.validate()?;
        Ok(model)
    }

    /// The three-tier simulation setup: 500/600/700 km, 500/1000/1500
    /// satellites, α = 3, power-adjusted from 32 W, 47/27 dBi satellite and
    /// 10/0 dBi user gains, σ² = −81.4 dBm, shadowed-Rician (0.158, 19.4, 1.59).
    pub fn table2() -> Self {
        let alpha = 3.0;
        let altitudes = [500.0, 600.0, 700.0];
        let counts = [500.0, 1000.0, 1500.0];
        let tiers = altitudes
            .iter()
            .zip(counts)
            .map(|(&h, n)| TierConfig {
                altitude_km: h,
                mean_count: n,
                tx_power_w: 32.0 * (h / altitudes[0]).powf(alpha),
                main_lobe_gain: crate::channel::db_to_linear(47.0),
                side_lobe_gain: crate::channel::db_to_linear(27.0),
            })
            .collect();
        Self {
            tiers,
            earth_radius_km: 6371.0,
            path_loss_exp: alpha,
            noise_power_w: crate::channel::dbm_to_watts(-81.4),
            user_main_gain: crate::channel::db_to_linear(10.0),
            user_side_gain: crate::channel::db_to_linear(0.0),
            fading: FadingModel::table2_shadowed_rician(),
            path_loss_unit: PathLossUnit::M,
        }
    }

    /// Checks every invariant; returns advisory warnings that do not block use.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.tiers.is_empty() {
            return Err(Error::invalid("tiers", "at least one tier is required"));
        }
        for (i, t) in self.tiers.iter().enumerate() {
            t.validate(i)?;
        }
        for (i, w) in self.tiers.windows(2).enumerate() {
            if !(w[0].altitude_km < w[1].altitude_km) {
                return Err(Error::invalid(
                    format!("tiers[{}].altitude_km", i + 1),
                    format!(
                        "altitudes must be strictly ascending ({} after {})",
                        w[1].altitude_km, w[0].altitude_km
                    ),
                ));
            }
        }
        if !(self.earth_radius_km > 0.0 && self.earth_radius_km.is_finite()) {
            return Err(Error::invalid("earth_radius_km", "must be positive"));
        }
        if !(self.path_loss_exp > 2.0 && self.path_loss_exp.is_finite()) {
            return Err(Error::invalid(
                "path_loss_exp",
                format!("must exceed 2, got {}", self.path_loss_exp),
            ));
        }
        if !(self.noise_power_w >= 0.0 && self.noise_power_w.is_finite()) {
            return Err(Error::invalid("noise_power_w", "must be non-negative"));
        }
        if !(self.user_main_gain > 0.0) || !(self.user_side_gain >= 0.0) {
            return Err(Error::invalid("user_main_gain", "user gains must be positive"));
        }
        if self.user_main_gain < self.user_side_gain {
            return Err(Error::invalid("user_main_gain", "main lobe below side lobe"));
        }
        self.fading.validate()?;

        let mut warnings = Vec::new();
        let top = self.tiers.last().unwrap().altitude_km;
        let rmax1 = self.max_distance(0);
        if top > rmax1 {
            warnings.push(format!(
                "highest altitude {top} km exceeds the lowest tier's horizon distance {rmax1:.1} km; \
                 the ordering H_K <= R_max_1 assumed by the closed forms does not hold"
            ));
        }
        Ok(warnings)
    }

    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    pub fn tier(&self, k: usize) -> &TierConfig {
        &self.tiers[k]
    }

    pub fn altitude(&self, k: usize) -> f64 {
        self.tiers[k].altitude_km
    }

    /// R_max of tier `k`.
    pub fn max_distance(&self, k: usize) -> f64 {
        max_visible_distance_unchecked(self.tiers[k].altitude_km, self.earth_radius_km)
    }

    /// c_k = πλ_k(R⊕+H_k)/R⊕.
    pub fn hazard(&self, k: usize) -> f64 {
        hazard_coefficient(&self.tiers[k], self.earth_radius_km)
    }

    /// P{no tier-`k` satellite closer than r}; distances are clamped to the
    /// visible support, so the value at R_max and beyond is the invisibility mass.
    pub fn survival(&self, k: usize, r: f64) -> f64 {
        let h = self.altitude(k);
        let rr = r.clamp(h, self.max_distance(k));
        (-self.hazard(k) * (rr * rr - h * h)).exp()
    }

    /// Path loss ℓ(r) with r in km.
    pub fn path_loss(&self, r_km: f64) -> f64 {
        (r_km * self.path_loss_unit.scale()).powf(-self.path_loss_exp)
    }

    /// u^{−α}: factor converting r_km^{−α} into the configured path-loss unit.
    pub fn unit_factor(&self) -> f64 {
        self.path_loss_unit.scale().powf(-self.path_loss_exp)
    }

    /// P_k·G_m,k·G_m^U·u^{−α}: unfaded intended received power is this times r_km^{−α}.
    pub fn intended_coef(&self, k: usize) -> f64 {
        let t = &self.tiers[k];
        t.tx_power_w * t.main_lobe_gain * self.user_main_gain * self.unit_factor()
    }

    /// P_j·G_s,j·G_s^U·u^{−α}: unfaded interfering power is this times r_km^{−α}.
    pub fn interfering_coef(&self, j: usize) -> f64 {
        let t = &self.tiers[j];
        t.tx_power_w * t.side_lobe_gain * self.user_side_gain * self.unit_factor()
    }

    /// Copy with every tier's mean count replaced.
    pub fn with_counts(&self, counts: &[f64]) -> Self {
        let mut m = self.clone();
        for (t, &n) in m.tiers.iter_mut().zip(counts) {
            t.mean_count = n;
        }
        m
    }
}

fn max_visible_distance_unchecked(h: f64, r_earth: f64) -> f64 {
    (h * h + 2.0 * h * r_earth).sqrt()
}

/// R_max = sqrt(H² + 2HR⊕): the distance to a satellite on the local horizon.
pub fn max_visible_distance(h: f64, r_earth: f64) -> Result<f64> {
    if !(h > 0.0) || !(r_earth > 0.0) {
        return Err(Error::domain(
            "max_visible_distance",
            format!("altitude {h} and radius {r_earth} must be positive"),
        ));
    }
    Ok(max_visible_distance_unchecked(h, r_earth))
}

/// λ = N / (4π(R⊕+H)²) in km⁻².
pub fn tier_density(n: f64, h: f64, r_earth: f64) -> f64 {
    n / (4.0 * PI * (r_earth + h).powi(2))
}

/// πλ(R⊕+H)/R⊕: the hazard coefficient of the contact-distance law in r².
pub fn hazard_coefficient(tier: &TierConfig, r_earth: f64) -> f64 {
    let h = tier.altitude_km;
    PI * tier_density(tier.mean_count, h, r_earth) * (r_earth + h) / r_earth
}

/// Density of the distance to the nearest tier satellite; 0 outside [H, R_max).
pub fn contact_distance_pdf(r: f64, tier: &TierConfig, r_earth: f64) -> f64 {
    let h = tier.altitude_km;
    if !(r >= h && r < max_visible_distance_unchecked(h, r_earth)) {
        return 0.0;
    }
    let c = hazard_coefficient(tier, r_earth);
    2.0 * c * r * (-c * (r * r - h * h)).exp()
}

/// P{nearest tier satellite within r}; 0 below H, flat at the visibility
/// probability beyond R_max.
pub fn contact_distance_cdf(r: f64, tier: &TierConfig, r_earth: f64) -> f64 {
    let h = tier.altitude_km;
    if !(r > h) {
        return 0.0;
    }
    let rr = r.min(max_visible_distance_unchecked(h, r_earth));
    let c = hazard_coefficient(tier, r_earth);
    (-(-c * (rr * rr - h * h)).exp_m1()).clamp(0.0, 1.0)
}

/// Probability that at least one tier satellite is above the horizon.
pub fn visibility_probability(tier: &TierConfig, r_earth: f64) -> f64 {
    -(-tier.mean_count / (2.0 * (r_earth / tier.altitude_km + 1.0))).exp_m1()
}
