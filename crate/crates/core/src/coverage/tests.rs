use super::*;
use crate::association::AssociationScheme::{Dba, Pba, Rba};
use crate::geometry::contact_distance_cdf;

fn engine(network: &NetworkModel, fading: FadingModel) -> CoverageEngine {
    CoverageEngine::with_fading(network, fading, Tolerances::default()).unwrap()
}

/// The bundled scene with interfering links switched off.
fn quiet_network() -> NetworkModel {
    let mut n = NetworkModel::table2();
    for t in &mut n.tiers {
        t.side_lobe_gain = 1e-30;
    }
    n.user_side_gain = 1e-30;
    n
}

#[test]
fn noise_only_rayleigh_matches_direct_quadrature() {
    let n = quiet_network();
    let e = engine(&n, FadingModel::Rayleigh);
    let noise = n.noise_power_w;
    for scheme in AssociationScheme::ALL {
        for beta in [0.1, 10.0, 1000.0] {
            for k in 0..3 {
                let (v, ok) = e.tier_coverage(scheme, k, beta).unwrap();
                assert!(ok);
                let assoc = e.association();
                let opts = QuadOptions::new(0.0, 1e-12);
                let q = adaptive_quad_with(
                    |r: f64| {
                        let s = n.intended_coef(k) * r.powf(-n.path_loss_exp);
                        (-beta * noise / s).exp() * assoc.joint_density(scheme, k, r)
                    },
                    &assoc.breakpoints(scheme, k),
                    &opts,
                );
                let norm = if scheme == Rba { 1.0 } else { assoc.probabilities(scheme)[k] };
                assert!((v - q.value / norm).abs() < 1e-8, "{scheme} k={k} β={beta}: {v} vs {}", q.value / norm);
            }
        }
    }
}

#[test]
fn noise_only_nonfading_is_a_distance_threshold() {
    let n = quiet_network();
    let e = engine(&n, FadingModel::NonFading);
    let alpha = n.path_loss_exp;
    for beta_db in [10.0, 30.0, 40.0] {
        let beta = crate::channel::db_to_linear(beta_db);
        for k in 0..3 {
            let r_star = (n.intended_coef(k) / (beta * n.noise_power_w)).powf(1.0 / alpha);
            let (v, _) = e.tier_coverage(Rba, k, beta).unwrap();
            let expect = contact_distance_cdf(r_star.min(n.max_distance(k)), n.tier(k), n.earth_radius_km);
            assert!((v - expect).abs() < 1e-4, "β={beta_db} dB k={k}: {v} vs {expect}");
        }
    }
}

/// P{I ≤ y} for a radial PPP of mean count μ on [a, b] with unfaded powers
/// g·r^{−α}, by conditioning on at most two points (μ kept small).
fn few_point_cdf(y: f64, g: f64, alpha: f64, a: f64, b: f64, mu: f64) -> f64 {
    let span = b * b - a * a;
    let single = |y: f64| -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let rho = (g / y).powf(1.0 / alpha).clamp(a, b);
        (b * b - rho * rho) / span
    };
    let pair = adaptive_quad_with(
        |r: f64| 2.0 * r / span * single(y - g * r.powf(-alpha)),
        &[a, (g / y).powf(1.0 / alpha).clamp(a, b), b],
        &QuadOptions::new(1e-13, 1e-12),
    )
    .value;
    (-mu as f64).exp() * (1.0 + mu * single(y) + mu * mu / 2.0 * pair)
}

#[test]
fn gil_pelaez_matches_few_point_oracle() {
    // One sparse tier: at most a handful of interferers, so the interference
    // distribution is available by direct conditioning.
    let mut n = NetworkModel::table2();
    n.tiers.truncate(1);
    let a = 1500.0;
    let b = n.max_distance(0);
    let mu_target = 0.01;
    let c_per_n = n.hazard(0) / n.tiers[0].mean_count;
    n.tiers[0].mean_count = mu_target / (c_per_n * (b * b - a * a));
    let mu = n.hazard(0) * (b * b - a * a);
    let e = engine(&n, FadingModel::NonFading);
    let g = n.interfering_coef(0);
    let alpha = n.path_loss_exp;
    let b_over = g * a.powf(-alpha);
    for frac in [0.3, 0.8, 1.5] {
        // Threshold y on I placed relative to the strongest possible interferer.
        let y = frac * b_over;
        let beta = 2.0;
        let signal = beta * (y + n.noise_power_w);
        let state = ServingState {
            signal,
            radii: vec![a],
        };
        let (v, ok) = e.conditional_coverage(&state, beta).unwrap();
        let expect = few_point_cdf(y, g, alpha, a, b, mu);
        assert!(ok);
        // Three-point terms are O(μ³/6).
        assert!((v - expect).abs() < 2e-6, "frac={frac}: {v} vs {expect}");
    }
}

#[test]
fn nonfading_signal_below_noise_gives_zero() {
    let n = NetworkModel::table2();
    let e = engine(&n, FadingModel::NonFading);
    let state = ServingState {
        signal: n.noise_power_w * 0.5,
        radii: vec![600.0, 600.0, 700.0],
    };
    assert_eq!(e.conditional_coverage(&state, 2.0).unwrap().0, 0.0);
}

#[test]
fn single_tier_dba_and_pba_coincide() {
    let mut n = NetworkModel::table2();
    n.tiers.truncate(1);
    let betas = beta_grid_db(-10.0, 30.0, 9);
    for fading in [FadingModel::Rayleigh, FadingModel::table2_shadowed_rician()] {
        let e = engine(&n, fading);
        let d = e.curve(Dba, &betas).unwrap();
        let p = e.curve(Pba, &betas).unwrap();
        for (x, y) in d.total.iter().zip(&p.total) {
            assert!((x - y).abs() < 1e-6, "{} {x} vs {y}", fading.label());
        }
    }
}

#[test]
fn identical_tiers_make_dba_and_pba_coincide() {
    let mut n = NetworkModel::table2();
    let t = n.tiers[0].clone();
    n.tiers = vec![t.clone(), t];
    n.tiers[1].altitude_km += 1e-9;
    let betas = beta_grid_db(-10.0, 30.0, 5);
    let e = engine(&n, FadingModel::Rayleigh);
    let d = e.curve(Dba, &betas).unwrap();
    let p = e.curve(Pba, &betas).unwrap();
    for (x, y) in d.total.iter().zip(&p.total) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn curves_are_assembled_bounded_and_monotone() {
    let n = NetworkModel::table2();
    let betas = beta_grid_db(-20.0, 40.0, 13);
    for fading in [FadingModel::Rayleigh, FadingModel::table2_shadowed_rician()] {
        let e = engine(&n, fading);
        for scheme in AssociationScheme::ALL {
            let c = e.curve(scheme, &betas).unwrap();
            assert!(!c.any_flagged());
            for b in 0..betas.len() {
                let sum: f64 = (0..3).map(|k| c.assoc[k] * c.per_tier[k][b]).sum();
                assert!((sum - c.total[b]).abs() < 1e-12);
            }
            for row in &c.per_tier {
                assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
                assert!(row.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{scheme} {row:?}");
            }
        }
    }
}

#[test]
fn limits_in_threshold_and_noise() {
    let n = NetworkModel::table2();
    for fading in [FadingModel::Rayleigh, FadingModel::table2_shadowed_rician(), FadingModel::NonFading] {
        let e = engine(&n, fading);
        let (low, _) = e.total_coverage(Dba, 1e-7).unwrap();
        assert!(low > 0.999, "{}: {low}", fading.label());
    }
    let mut loud = n.clone();
    loud.noise_power_w = 1e3;
    for fading in [FadingModel::Rayleigh, FadingModel::table2_shadowed_rician(), FadingModel::NonFading] {
        let e = engine(&loud, fading);
        let (v, _) = e.total_coverage(Pba, 1.0).unwrap();
        assert!(v < 1e-6, "{}: {v}", fading.label());
    }
}

#[test]
fn mean_interference_monotonicity() {
    let n = NetworkModel::table2();
    let rs: Vec<f64> = (0..60).map(|i| 500.0 + 45.0 * i as f64).collect();
    for w in rs.windows(2) {
        assert!(mean_interference_dba(w[1], &n) <= mean_interference_dba(w[0], &n));
        assert!(mean_interference_rba(w[1], 0, &n) <= mean_interference_rba(w[0], 0, &n));
    }
    assert_eq!(mean_interference_dba(n.max_distance(2), &n), 0.0);
    let b = crate::association::PowerBounds::new(&n, 0);
    let xs: Vec<f64> = (0..60).map(|i| b.xi_min * (b.xi_max / b.xi_min).powf(i as f64 / 59.0)).collect();
    // A stronger server pushes the exclusion radii inwards.
    for w in xs.windows(2) {
        assert!(mean_interference_pba(w[1], &n) >= mean_interference_pba(w[0], &n));
    }
}

#[test]
fn query_validation() {
    let q = CoverageQuery {
        scheme: Dba,
        fading: FadingModel::Rayleigh,
        beta_grid: vec![1.0, 0.5],
        network: NetworkModel::table2(),
    };
    assert!(q.validate().is_err());
    assert!(coverage_sr(Dba, &CoverageQuery { beta_grid: vec![1.0], ..q.clone() }).is_err());
    assert!(CoverageQuery { beta_grid: vec![], ..q.clone() }.validate().is_err());
    assert!(CoverageQuery { beta_grid: vec![-1.0], ..q }.validate().is_err());
}

#[test]
fn default_grid_shape() {
    let g = default_beta_grid();
    assert_eq!(g.len(), 81);
    assert!((g[0] - 0.01).abs() < 1e-15);
    assert!((g[80] - 1e4).abs() < 1e-9);
}
