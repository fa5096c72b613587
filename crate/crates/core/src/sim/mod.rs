//! Monte Carlo constellation simulator: an independent check on the
//! association, distance and coverage analysis.
//!
//! Satellites of each tier form a Poisson point process on their shell. Only
//! user-to-satellite distances are kept, since every quantity of interest
//! depends on positions through distance alone.

mod estimate;
mod stats;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::association::AssociationScheme;
use crate::channel::FadingSampler;
use crate::geometry::NetworkModel;

pub use estimate::{estimate, simulate, SchemeEstimate, SimSummary, BLOCK_TRIALS, MIN_TRIALS};
pub use stats::{ks_statistic, EstimateWithCI};

/// User-to-satellite distance for a satellite at cos-colatitude `u` on a
/// shell of radius R + H, by the law of cosines.
fn distance_at(u: f64, h: f64, r_earth: f64) -> f64 {
    let shell = r_earth + h;
    (r_earth * r_earth + shell * shell - 2.0 * r_earth * shell * u).max(h * h).sqrt()
}

/// Distances from the user to every satellite of every tier, visible or not:
/// count ~ Poisson(N_k), cos-colatitude uniform on [−1, 1].
pub fn sample_constellation<R: Rng + ?Sized>(network: &NetworkModel, rng: &mut R) -> Vec<Vec<f64>> {
    network
        .tiers
        .iter()
        .map(|t| {
            let count = Poisson::new(t.mean_count).expect("validated count").sample(rng) as usize;
            (0..count)
                .map(|_| distance_at(rng.random_range(-1.0..=1.0), t.altitude_km, network.earth_radius_km))
                .collect()
        })
        .collect()
}

/// Samples only the satellites above the user's horizon.
///
/// A tier's visible satellites are the points of its process in the cap
/// cos θ ≥ R/(R+H), which is again Poisson with mean N·H/(2(R+H)) and
/// uniform cos-colatitude on the cap. Distributionally identical to filtering
/// [`sample_constellation`] and far cheaper.
#[derive(Debug, Clone)]
pub struct VisibleSampler {
    counts: Vec<Option<Poisson<f64>>>,
    cos_min: Vec<f64>,
    altitude: Vec<f64>,
    r_earth: f64,
}

impl VisibleSampler {
    pub fn new(network: &NetworkModel) -> Self {
        let r = network.earth_radius_km;
        let mut counts = Vec::new();
        let mut cos_min = Vec::new();
        for t in &network.tiers {
            let h = t.altitude_km;
            let mean = t.mean_count * h / (2.0 * (r + h));
            counts.push(Poisson::new(mean).ok());
            cos_min.push(r / (r + h));
        }
        Self {
            counts,
            cos_min,
            altitude: network.tiers.iter().map(|t| t.altitude_km).collect(),
            r_earth: r,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<f64>> {
        (0..self.altitude.len())
            .map(|k| {
                let n = self.counts[k].map_or(0, |p| p.sample(rng) as usize);
                let lo = self.cos_min[k];
                (0..n)
                    .map(|_| distance_at(lo + (1.0 - lo) * rng.random::<f64>(), self.altitude[k], self.r_earth))
                    .collect()
            })
            .collect()
    }
}

/// Convenience wrapper around [`VisibleSampler`].
pub fn sample_visible<R: Rng + ?Sized>(network: &NetworkModel, rng: &mut R) -> Vec<Vec<f64>> {
    VisibleSampler::new(network).sample(rng)
}

/// The satellite a scheme selected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Serving {
    pub tier: usize,
    pub distance_km: f64,
    /// Average received power h̄·P_k·G·G_U·ℓ(r) used by PbA.
    pub xi: f64,
}

/// One snapshot realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Nearest visible distance per tier, +∞ when a tier has none in view.
    pub per_tier_nearest_km: Vec<f64>,
    /// Choice of each scheme, indexed like [`AssociationScheme::ALL`].
    pub serving: [Serving; 3],
    pub sinr: [f64; 3],
}

impl TrialOutcome {
    pub fn serving_for(&self, scheme: AssociationScheme) -> Serving {
        self.serving[scheme_index(scheme)]
    }

    pub fn sinr_for(&self, scheme: AssociationScheme) -> f64 {
        self.sinr[scheme_index(scheme)]
    }
}

pub(crate) fn scheme_index(scheme: AssociationScheme) -> usize {
    match scheme {
        AssociationScheme::Dba => 0,
        AssociationScheme::Pba => 1,
        AssociationScheme::Rba => 2,
    }
}

/// Draws trials for one network; sampling tables are built once.
#[derive(Debug, Clone)]
pub struct TrialRunner {
    network: NetworkModel,
    visible: VisibleSampler,
    fading: FadingSampler,
    intended: Vec<f64>,
    interfering: Vec<f64>,
    rho: Vec<f64>,
}

impl TrialRunner {
    pub fn new(network: &NetworkModel) -> Self {
        let k = network.num_tiers();
        let hbar = network.fading.mean_gain();
        Self {
            network: network.clone(),
            visible: VisibleSampler::new(network),
            fading: network.fading.sampler(),
            intended: (0..k).map(|j| network.intended_coef(j)).collect(),
            interfering: (0..k).map(|j| network.interfering_coef(j)).collect(),
            rho: (0..k).map(|j| hbar * network.intended_coef(j)).collect(),
        }
    }

    pub fn network(&self) -> &NetworkModel {
        &self.network
    }

    /// One snapshot; `None` when no tier has a satellite in view.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<TrialOutcome> {
        let sats = self.visible.sample(rng);
        let gains: Vec<Vec<f64>> = sats
            .iter()
            .map(|tier| tier.iter().map(|_| self.fading.sample(rng)).collect())
            .collect();
        let tiers_in_view = sats.iter().filter(|t| !t.is_empty()).count();
        if tiers_in_view == 0 {
            return None;
        }
        let pick = rng.random_range(0..tiers_in_view);
        self.evaluate(&sats, &gains, pick)
    }

    /// Outcome for a given scene: `sats[k]` are tier-k distances, `gains[k]`
    /// their fading draws, and `rba_pick` indexes the tiers in view for RbA.
    pub fn evaluate(&self, sats: &[Vec<f64>], gains: &[Vec<f64>], rba_pick: usize) -> Option<TrialOutcome> {
        let alpha = self.network.path_loss_exp;
        let mut total_interference = 0.0;
        for (j, tier) in sats.iter().enumerate() {
            for (d, h) in tier.iter().zip(&gains[j]) {
                total_interference += self.interfering[j] * h * d.powf(-alpha);
            }
        }

        let nearest: Vec<Option<usize>> = sats
            .iter()
            .map(|tier| {
                tier.iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i)
            })
            .collect();
        let candidates: Vec<usize> = (0..sats.len()).filter(|&k| nearest[k].is_some()).collect();
        if candidates.is_empty() {
            return None;
        }
        let dist = |k: usize| sats[k][nearest[k].expect("candidate")];
        let xi = |k: usize| self.rho[k] * dist(k).powf(-alpha);

        let dba = *candidates
            .iter()
            .min_by(|&&a, &&b| dist(a).total_cmp(&dist(b)))
            .expect("nonempty");
        let pba = *candidates
            .iter()
            .max_by(|&&a, &&b| xi(a).total_cmp(&xi(b)))
            .expect("nonempty");
        let rba = candidates[rba_pick.min(candidates.len() - 1)];

        let mut serving = [Serving {
            tier: 0,
            distance_km: 0.0,
            xi: 0.0,
        }; 3];
        let mut sinr = [0.0; 3];
        for (slot, k) in [dba, pba, rba].into_iter().enumerate() {
            let i = nearest[k].expect("candidate");
            let (d, h) = (sats[k][i], gains[k][i]);
            let path = d.powf(-alpha);
            let interference = (total_interference - self.interfering[k] * h * path).max(0.0);
            serving[slot] = Serving {
                tier: k,
                distance_km: d,
                xi: xi(k),
            };
            sinr[slot] = self.intended[k] * h * path / (interference + self.network.noise_power_w);
        }

        Some(TrialOutcome {
            per_tier_nearest_km: (0..sats.len())
                .map(|k| nearest[k].map_or(f64::INFINITY, |_| dist(k)))
                .collect(),
            serving,
            sinr,
        })
    }

    /// Aggregate interference from satellites of tier j farther than
    /// `radii[j]`, with fresh fading draws.
    pub fn interference<R: Rng + ?Sized>(&self, radii: &[f64], rng: &mut R) -> f64 {
        let alpha = self.network.path_loss_exp;
        let sats = self.visible.sample(rng);
        let mut total = 0.0;
        for (j, tier) in sats.iter().enumerate() {
            for &d in tier {
                let h = self.fading.sample(rng);
                if d > radii[j] {
                    total += self.interfering[j] * h * d.powf(-alpha);
                }
            }
        }
        total
    }
}

/// One snapshot under the network's fading model.
pub fn run_trial<R: Rng + ?Sized>(network: &NetworkModel, rng: &mut R) -> Option<TrialOutcome> {
    TrialRunner::new(network).run(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingModel;
    use crate::geometry::{contact_distance_cdf, TierConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn full_sphere_count_is_poisson_mean() {
        let n = NetworkModel::table2();
        let mut r = rng(1);
        let draws = 10_000;
        let total: usize = (0..draws).map(|_| sample_constellation(&n, &mut r)[0].len()).sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - 500.0).abs() < 3.0 * (500.0f64 / draws as f64).sqrt(), "{mean}");
    }

    #[test]
    fn visible_count_matches_cap_fraction() {
        let n = NetworkModel::table2();
        let expect = 500.0 / (2.0 * (6371.0 / 500.0 + 1.0));
        let mut r = rng(2);
        let draws = 20_000;
        let full: usize = (0..draws)
            .map(|_| sample_constellation(&n, &mut r)[0].iter().filter(|&&d| d <= n.max_distance(0)).count())
            .sum();
        let cap: usize = (0..draws).map(|_| sample_visible(&n, &mut r)[0].len()).sum();
        let se = 3.0 * (expect / draws as f64).sqrt();
        assert!((full as f64 / draws as f64 - expect).abs() < se);
        assert!((cap as f64 / draws as f64 - expect).abs() < se);
    }

    #[test]
    fn nearest_distance_follows_contact_law() {
        let n = NetworkModel::table2();
        let s = VisibleSampler::new(&n);
        let mut r = rng(3);
        let mut near: Vec<f64> = (0..20_000)
            .filter_map(|_| s.sample(&mut r)[1].iter().copied().min_by(f64::total_cmp))
            .collect();
        near.sort_by(f64::total_cmp);
        let d = ks_statistic(&near, |x| contact_distance_cdf(x, n.tier(1), n.earth_radius_km));
        assert!(d < 0.015, "{d}");
    }

    #[test]
    fn lone_satellite_without_fading_gives_snr() {
        let mut n = NetworkModel::table2();
        n.fading = FadingModel::NonFading;
        let runner = TrialRunner::new(&n);
        let d = 812.5;
        let o = runner.evaluate(&[vec![], vec![d], vec![]], &[vec![], vec![1.0], vec![]], 0).unwrap();
        let snr = n.intended_coef(1) * d.powf(-n.path_loss_exp) / n.noise_power_w;
        for x in o.sinr {
            assert_eq!(x, snr);
        }
        assert_eq!(o.per_tier_nearest_km[0], f64::INFINITY);
        assert!(runner.evaluate(&[vec![], vec![], vec![]], &[vec![], vec![], vec![]], 0).is_none());
    }

    #[test]
    fn interference_excludes_only_the_server() {
        let mut n = NetworkModel::table2();
        n.fading = FadingModel::NonFading;
        let runner = TrialRunner::new(&n);
        let sats = [vec![900.0, 600.0], vec![700.0], vec![]];
        let gains = [vec![1.0, 1.0], vec![1.0], vec![]];
        let o = runner.evaluate(&sats, &gains, 1).unwrap();
        let a = n.path_loss_exp;
        // DbA serves tier 1 at 600 km; the other tier-1 satellite and tier 2 interfere.
        let i = n.interfering_coef(0) * 900f64.powf(-a) + n.interfering_coef(1) * 700f64.powf(-a);
        let expect = n.intended_coef(0) * 600f64.powf(-a) / (i + n.noise_power_w);
        assert!((o.sinr[0] / expect - 1.0).abs() < 1e-12);
        assert_eq!(o.serving[2].tier, 1);
    }

    #[test]
    fn equal_shells_make_dba_and_pba_agree() {
        let mut n = NetworkModel::table2();
        let t = n.tiers[0].clone();
        n.tiers = vec![t.clone(), TierConfig { altitude_km: t.altitude_km + 1e-9, ..t }];
        let runner = TrialRunner::new(&n);
        let mut r = rng(5);
        for _ in 0..2000 {
            if let Some(o) = runner.run(&mut r) {
                assert_eq!(o.serving[0], o.serving[1]);
                assert_eq!(o.sinr[0], o.sinr[1]);
            }
        }
    }

    #[test]
    fn outcome_invariants() {
        let n = NetworkModel::table2();
        let runner = TrialRunner::new(&n);
        let mut r = rng(6);
        for _ in 0..2000 {
            let o = runner.run(&mut r).expect("the bundled scene always has a satellite in view");
            for s in o.serving {
                assert!(s.distance_km >= n.altitude(s.tier) && s.distance_km <= n.max_distance(s.tier));
                assert_eq!(s.distance_km, o.per_tier_nearest_km[s.tier]);
            }
            assert!(o.sinr.iter().all(|&x| x >= 0.0));
            let best = o.serving[1];
            assert!(o.per_tier_nearest_km.iter().enumerate().all(|(k, &d)| {
                !d.is_finite() || best.xi >= runner.rho[k] * d.powf(-n.path_loss_exp)
            }));
        }
    }
}
