//! Fading laws, sectorized antenna gains and the tier power-adjusting rule.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::NetworkModel;
use crate::numerics::gamma::{ln_gamma, regularized_lower_gamma};
use crate::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

/// Shadowed-Rician parameters: 2b is the scattered power, Ω the average LoS
/// power and m the Nakagami shape of the LoS amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowedRician {
    pub b: f64,
    pub omega: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FadingModel {
    ShadowedRician(ShadowedRician),
    Rayleigh,
    NonFading,
}

impl FadingModel {
    pub fn table2_shadowed_rician() -> Self {
        FadingModel::ShadowedRician(ShadowedRician {
            b: 0.158,
            omega: 19.4,
            m: 1.59,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let FadingModel::ShadowedRician(p) = self {
            if !(p.b > 0.0 && p.b.is_finite()) {
                return Err(Error::invalid("fading.b", format!("must be positive, got {}", p.b)));
            }
            if !(p.omega >= 0.0 && p.omega.is_finite()) {
                return Err(Error::invalid("fading.omega", format!("must be non-negative, got {}", p.omega)));
            }
            if !(p.m > 0.0 && p.m.is_finite()) {
                return Err(Error::invalid("fading.m", format!("must be positive, got {}", p.m)));
            }
        }
        Ok(())
    }

    /// Mean power gain h̄.
    pub fn mean_gain(&self) -> f64 {
        match self {
            FadingModel::ShadowedRician(p) => 2.0 * p.b + p.omega,
            FadingModel::Rayleigh | FadingModel::NonFading => 1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FadingModel::ShadowedRician(_) => "sr",
            FadingModel::Rayleigh => "rayleigh",
            FadingModel::NonFading => "none",
        }
    }

    /// Precomputed sampler; build once, draw many times.
    pub fn sampler(&self) -> FadingSampler {
        match *self {
            FadingModel::ShadowedRician(p) => FadingSampler::ShadowedRician {
                los: Gamma::new(p.m, p.omega.max(f64::MIN_POSITIVE) / p.m).expect("validated shape"),
                los_zero: p.omega == 0.0,
                scatter: Normal::new(0.0, p.b.sqrt()).expect("validated scale"),
            },
            FadingModel::Rayleigh => FadingSampler::Rayleigh,
            FadingModel::NonFading => FadingSampler::NonFading,
        }
    }

    /// One power-gain realization.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    ShadowedRician {
        los: Gamma<f64>,
        los_zero: bool,
        scatter: Normal<f64>,
    },
    Rayleigh,
    NonFading,
}

impl FadingSampler {
    /// Shadowed Rician: |A + X + iY|² with A² ~ Gamma(m, Ω/m) and X, Y ~ N(0, b).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingSampler::ShadowedRician { los, los_zero, scatter } => {
                let a = if *los_zero { 0.0 } else { los.sample(rng).sqrt() };
                let x = a + scatter.sample(rng);
                let y = scatter.sample(rng);
                x * x + y * y
            }
            FadingSampler::Rayleigh => Exp1.sample(rng),
            FadingSampler::NonFading => 1.0,
        }
    }
}

/// Hard cap on shadowed-Rician series terms.
pub const SR_MAX_TERMS: usize = 10_000;

/// The shadowed-Rician CDF series with its mixture weights precomputed:
///
/// F(x) = Σ_z w_z·P(z+1, x/2b),  w_z = (1−δ)^m (m)_z/z! δ^z,  δ = Ω/(2bm+Ω),
///
/// which is the printed series with γ(z+1, ·)/Γ(z+1) written as the
/// regularized gamma P. Weights are negative-binomial probabilities.
#[derive(Debug, Clone)]
pub struct SrCdf {
    params: ShadowedRician,
    ln_weights: Vec<f64>,
    /// ln Γ(n+1) for n = 0..=terms.
    ln_factorial: Vec<f64>,
}

impl SrCdf {
    /// Series truncated where the geometric bound on the remaining weights
    /// drops below `tail`.
    pub fn new(params: ShadowedRician, tail: f64) -> Result<Self> {
        let terms = sr_truncation(&params, tail)?;
        Self::with_terms(params, terms)
    }

    /// Series with exactly `terms` terms (z = 0..terms−1).
    pub fn with_terms(params: ShadowedRician, terms: usize) -> Result<Self> {
        FadingModel::ShadowedRician(params).validate()?;
        let terms = terms.max(1);
        let delta = params.omega / (2.0 * params.b * params.m + params.omega);
        let m = params.m;
        let lg_m = ln_gamma(m)?;
        let head = m * (1.0 - delta).ln();
        let mut ln_weights = Vec::with_capacity(terms);
        for z in 0..terms {
            let zf = z as f64;
            let w = if z == 0 {
                head
            } else if delta == 0.0 {
                f64::NEG_INFINITY
            } else {
                head + ln_gamma(m + zf)? - lg_m - ln_gamma(zf + 1.0)? + zf * delta.ln()
            };
            ln_weights.push(w);
        }
        let ln_factorial = (0..=terms).map(|n| ln_gamma(n as f64 + 1.0)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            ln_weights,
            ln_factorial,
        })
    }

    pub fn terms(&self) -> usize {
        self.ln_weights.len()
    }

    pub fn params(&self) -> ShadowedRician {
        self.params
    }

    /// P{h ≤ x}.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::domain("sr_cdf", format!("gain {x} must be non-negative")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(self.ln_weights.iter().map(|w| w.exp()).sum::<f64>().min(1.0));
        }
        let y = x / (2.0 * self.params.b);
        // P(n, y) for n beyond y + 12√y + 60 is below e^{−60}; start there.
        let reach = (y + 12.0 * y.sqrt() + 60.0).ceil() as usize;
        let top = self.terms().min(reach.max(1));
        // Downward recurrence P(n, y) = P(n+1, y) + e^{−y} yⁿ/n! adds positive terms only.
        let mut p = regularized_lower_gamma(top as f64, y)?; // P(top, y)
        let ln_y = y.ln();
        let mut sum = 0.0;
        for z in (0..top).rev() {
            // p currently holds P(z+1, y)
            sum += self.ln_weights[z].exp() * p;
            if z > 0 {
                let n = z as f64;
                p += (n * ln_y - y - self.ln_factorial[z]).exp();
            }
        }
        Ok(sum.clamp(0.0, 1.0))
    }
}

/// Number of series terms z* such that the geometric bound
/// w_{z*}/(1 − ratio) on the neglected weights is below `tail`.
pub fn sr_truncation(params: &ShadowedRician, tail: f64) -> Result<usize> {
    FadingModel::ShadowedRician(*params).validate()?;
    let delta = params.omega / (2.0 * params.b * params.m + params.omega);
    if delta == 0.0 {
        return Ok(1);
    }
    let m = params.m;
    let mut ln_w = m * (1.0 - delta).ln();
    for z in 0..SR_MAX_TERMS {
        let zf = z as f64;
        // ln w_{z+1} from ln w_z
        ln_w += ((m + zf) / (zf + 1.0)).ln() + delta.ln();
        let ratio = (delta * (m + zf + 1.0) / (zf + 2.0)).max(delta);
        if ratio < 1.0 && ln_w.exp() / (1.0 - ratio) < tail {
            return Ok(z + 1);
        }
    }
    Err(Error::SeriesTruncation {
        function: "sr_cdf",
        terms: SR_MAX_TERMS,
    })
}

/// Shadowed-Rician CDF with the default 1e-10 tail bound.
pub fn sr_cdf(x: f64, params: &ShadowedRician) -> Result<f64> {
    SrCdf::new(*params, 1e-10)?.cdf(x)
}

/// Shadowed-Rician CDF with an explicit number of series terms.
pub fn sr_cdf_with_terms(x: f64, params: &ShadowedRician, terms: usize) -> Result<f64> {
    SrCdf::with_terms(*params, terms)?.cdf(x)
}

/// P_k = P_1·(G_m,1/G_m,k)·(H_k/H_1)^α: every tier then delivers the same
/// boresight power at the sub-satellite point.
pub fn adjusted_powers(base_tier_power: f64, network: &NetworkModel) -> Vec<f64> {
    let first = &network.tiers[0];
    network
        .tiers
        .iter()
        .map(|t| {
            base_tier_power * (first.main_lobe_gain / t.main_lobe_gain)
                * (t.altitude_km / first.altitude_km).powf(network.path_loss_exp)
        })
        .collect()
}

/// Copy of `network` with powers set by [`adjusted_powers`].
pub fn with_adjusted_powers(base_tier_power: f64, network: &NetworkModel) -> NetworkModel {
    let mut m = network.clone();
    for (t, p) in m.tiers.iter_mut().zip(adjusted_powers(base_tier_power, network)) {
        t.tx_power_w = p;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkRole {
    Intended,
    Interfering,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGain {
    pub role: LinkRole,
    pub value: f64,
}

/// Main-lobe product for the intended link, side-lobe product otherwise.
pub fn link_gain(role: LinkRole, tier: usize, network: &NetworkModel) -> LinkGain {
    let t = &network.tiers[tier];
    let value = match role {
        LinkRole::Intended => t.main_lobe_gain * network.user_main_gain,
        LinkRole::Interfering => t.side_lobe_gain * network.user_side_gain,
    };
    LinkGain { role, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table2() -> ShadowedRician {
        ShadowedRician {
            b: 0.158,
            omega: 19.4,
            m: 1.59,
        }
    }

    #[test]
    fn conversions() {
        assert!((db_to_linear(47.0) + 0.0 - 10f64.powf(4.7)).abs() < 1e-6);
        assert!((dbm_to_watts(-81.4) - 7.244e-12).abs() < 1e-15);
        assert!((linear_to_db(db_to_linear(13.2)) - 13.2).abs() < 1e-12);
        assert!((watts_to_dbm(dbm_to_watts(-81.4)) + 81.4).abs() < 1e-12);
    }

    #[test]
    fn mean_gains() {
        assert!((FadingModel::table2_shadowed_rician().mean_gain() - 19.716).abs() < 1e-12);
        assert_eq!(FadingModel::Rayleigh.mean_gain(), 1.0);
        assert_eq!(FadingModel::NonFading.mean_gain(), 1.0);
    }

    #[test]
    fn sr_cdf_simple_values() {
        assert_eq!(sr_cdf(0.0, &table2()).unwrap(), 0.0);
        let expo = ShadowedRician {
            b: 0.5,
            omega: 0.0,
            m: 2.3,
        };
        assert!((sr_cdf(1.0, &expo).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!(sr_cdf(-1.0, &table2()).is_err());
    }

    #[test]
    fn sr_cdf_rayleigh_degeneration() {
        let expo = ShadowedRician {
            b: 0.5,
            omega: 0.0,
            m: 1.59,
        };
        let f = SrCdf::new(expo, 1e-10).unwrap();
        for i in 0..=500 {
            let x = 0.1 * i as f64;
            assert!((f.cdf(x).unwrap() - (-(-x).exp_m1())).abs() < 1e-10, "x={x}");
        }
        // A vanishing but positive LoS power approaches the same limit.
        let near = SrCdf::new(ShadowedRician { omega: 1e-12, ..expo }, 1e-10).unwrap();
        for x in [0.5, 3.0, 20.0] {
            assert!((near.cdf(x).unwrap() - (-(-x).exp_m1())).abs() < 1e-10);
        }
    }

    #[test]
    fn sr_cdf_reaches_one() {
        let p = table2();
        let hbar = 2.0 * p.b + p.omega;
        let v = sr_cdf(1e4 * hbar, &p).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn sr_truncation_is_converged() {
        let p = table2();
        let n = sr_truncation(&p, 1e-10).unwrap();
        assert!(n > 500, "the bundled scene needs more than 500 terms, got {n}");
        let short = SrCdf::with_terms(p, n).unwrap();
        let long = SrCdf::with_terms(p, 2 * n).unwrap();
        let hbar = 2.0 * p.b + p.omega;
        for x in [0.01, 0.5, 2.0, 10.0, hbar, 50.0, 200.0, 1e3, 1e4 * hbar] {
            let d = (short.cdf(x).unwrap() - long.cdf(x).unwrap()).abs();
            assert!(d < 1e-10, "x={x}: {d}");
        }
    }

    #[test]
    fn sr_cdf_is_monotone() {
        let f = SrCdf::new(table2(), 1e-10).unwrap();
        let mut prev = 0.0;
        for i in 1..2000 {
            let v = f.cdf(i as f64 * 0.05).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn sr_cdf_matches_direct_regularized_gamma() {
        // Independent evaluation: every term with statrs' regularized gamma.
        let p = table2();
        let delta = p.omega / (2.0 * p.b * p.m + p.omega);
        let n = sr_truncation(&p, 1e-10).unwrap();
        let f = SrCdf::new(p, 1e-10).unwrap();
        for x in [0.3, 5.0, 19.716, 40.0] {
            let y = x / (2.0 * p.b);
            let mut s = 0.0;
            for z in 0..n {
                let zf = z as f64;
                let lw = p.m * (1.0 - delta).ln() + ln_gamma(p.m + zf).unwrap() - ln_gamma(p.m).unwrap()
                    - ln_gamma(zf + 1.0).unwrap()
                    + zf * delta.ln();
                s += lw.exp() * regularized_lower_gamma(zf + 1.0, y).unwrap();
            }
            assert!((f.cdf(x).unwrap() - s).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn sampler_matches_series_cdf() {
        let p = table2();
        let f = SrCdf::new(p, 1e-10).unwrap();
        let sampler = FadingModel::ShadowedRician(p).sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean / 19.716 - 1.0).abs() < 0.01);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks = crate::sim::ks_statistic(&xs, |x| f.cdf(x).unwrap());
        assert!(ks < 0.002, "KS = {ks}");
    }

    #[test]
    fn sr_cdf_at_mean_matches_empirical_fraction() {
        let p = table2();
        let hbar = 2.0 * p.b + p.omega;
        let sampler = FadingModel::ShadowedRician(p).sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000_000usize;
        let below = (0..n).filter(|_| sampler.sample(&mut rng) <= hbar).count() as f64 / n as f64;
        let exact = sr_cdf(hbar, &p).unwrap();
        let se = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((below - exact).abs() < 3.0 * se, "{below} vs {exact}");
    }

    #[test]
    fn rayleigh_and_nonfading_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = FadingModel::Rayleigh.sampler();
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01);
        assert_eq!(FadingModel::NonFading.sample_gain(&mut rng), 1.0);
    }

    #[test]
    fn table2_power_adjustment() {
        let m = NetworkModel::table2();
        let p = adjusted_powers(32.0, &m);
        assert!((p[0] - 32.0).abs() < 1e-12);
        assert!((p[1] - 55.296).abs() < 1e-9);
        assert!((p[2] - 87.808).abs() < 1e-9);
        assert!((p[1] / 55.3 - 1.0).abs() < 1e-3 && (p[2] / 87.8 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn power_adjustment_edge_cases() {
        let mut m = NetworkModel::table2();
        m.tiers.truncate(1);
        assert_eq!(adjusted_powers(7.0, &m), vec![7.0]);
    }

    #[test]
    fn link_gains() {
        let m = NetworkModel::table2();
        let g = link_gain(LinkRole::Intended, 0, &m);
        assert!((g.value / 10f64.powf(5.7) - 1.0).abs() < 1e-12);
        let g = link_gain(LinkRole::Interfering, 2, &m);
        assert!((g.value / 10f64.powf(2.7) - 1.0).abs() < 1e-12);
        let mut unit = m.clone();
        for t in unit.tiers.iter_mut() {
            t.main_lobe_gain = 1.0;
            t.side_lobe_gain = 1.0;
        }
        unit.user_main_gain = 1.0;
        unit.user_side_gain = 1.0;
        assert_eq!(link_gain(LinkRole::Intended, 1, &unit).value, 1.0);
        assert_eq!(link_gain(LinkRole::Interfering, 1, &unit).value, 1.0);
    }

    proptest::proptest! {
        #[test]
        fn adjusted_powers_equalize_boresight_power(
            h1 in 300.0f64..600.0,
            dh in proptest::collection::vec(1.0f64..400.0, 1..5),
            gains in proptest::collection::vec(1.0f64..1e5, 5),
            alpha in 2.1f64..5.0,
            p1 in 0.1f64..500.0,
        ) {
            let mut m = NetworkModel::table2();
            m.path_loss_exp = alpha;
            let mut h = h1;
            m.tiers = std::iter::once(0.0).chain(dh.iter().copied()).enumerate().map(|(i, d)| {
                h += d;
                crate::geometry::TierConfig {
                    altitude_km: h,
                    mean_count: 100.0,
                    tx_power_w: 1.0,
                    main_lobe_gain: gains[i],
                    side_lobe_gain: 1.0,
                }
            }).collect();
            let p = adjusted_powers(p1, &m);
            let reference = p[0] * m.tiers[0].main_lobe_gain * m.tiers[0].altitude_km.powf(-alpha);
            for (k, t) in m.tiers.iter().enumerate() {
                let v = p[k] * t.main_lobe_gain * t.altitude_km.powf(-alpha);
                proptest::prop_assert!((v / reference - 1.0).abs() < 1e-12);
            }
        }
    }
}
