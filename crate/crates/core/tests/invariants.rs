//! Property tests over randomized constellations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use leo_hetnet::association::{AssociationModel, AssociationScheme};
use leo_hetnet::channel::{db_to_linear, FadingModel};
use leo_hetnet::coverage::CoverageEngine;
use leo_hetnet::geometry::NetworkModel;
use leo_hetnet::numerics::Tolerances;
use leo_hetnet::sim::TrialRunner;

fn scene(counts: [f64; 3]) -> NetworkModel {
    NetworkModel::table2().with_counts(&counts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn association_probabilities_sum_to_one(a in 50.0..3000.0f64, b in 50.0..3000.0f64, c in 50.0..3000.0f64) {
        let n = scene([a, b, c]);
        let m = AssociationModel::new(&n, Tolerances::default_profile().association).unwrap();
        for s in AssociationScheme::ALL {
            let p = m.probabilities(s);
            prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-4, "{s:?} {p:?}");
        }
    }

    #[test]
    fn coverage_is_a_survival_function(a in 50.0..3000.0f64, b in 50.0..3000.0f64, c in 50.0..3000.0f64) {
        let n = scene([a, b, c]);
        let betas: Vec<f64> = [-20.0, -5.0, 5.0, 15.0, 30.0].iter().map(|&d| db_to_linear(d)).collect();
        for fading in [FadingModel::Rayleigh, FadingModel::table2_shadowed_rician()] {
            let e = CoverageEngine::with_fading(&n, fading, Tolerances::default_profile()).unwrap();
            for s in AssociationScheme::ALL {
                let curve = e.curve(s, &betas).unwrap();
                prop_assert!(curve.total.iter().all(|&p| (0.0..=1.0).contains(&p)));
                prop_assert!(curve.total.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{s:?} {:?}", curve.total);
            }
        }
    }

    #[test]
    fn simulated_choices_follow_their_rules(seed in any::<u64>()) {
        let n = NetworkModel::table2();
        let runner = TrialRunner::new(&n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let Some(o) = runner.run(&mut rng) else { continue };
            let dba = o.serving_for(AssociationScheme::Dba);
            let nearest = o.per_tier_nearest_km.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(dba.distance_km, nearest);
            let pba = o.serving_for(AssociationScheme::Pba);
            let best_xi = (0..3)
                .filter(|&k| o.per_tier_nearest_km[k].is_finite())
                .map(|k| n.fading.mean_gain() * n.intended_coef(k) * o.per_tier_nearest_km[k].powf(-n.path_loss_exp))
                .fold(0.0, f64::max);
            prop_assert!((pba.xi - best_xi).abs() <= 1e-12 * best_xi);
            let rba = o.serving_for(AssociationScheme::Rba);
            prop_assert!(o.per_tier_nearest_km[rba.tier] == rba.distance_km);
            for s in AssociationScheme::ALL {
                prop_assert!(o.sinr_for(s) >= 0.0 && o.sinr_for(s).is_finite());
            }
        }
    }
}
