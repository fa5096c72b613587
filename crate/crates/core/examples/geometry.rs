//! Per-tier visibility and contact-distance statistics for the bundled scene.

use leo_hetnet::geometry::{contact_distance_cdf, visibility_probability, NetworkModel};

fn main() {
    let n = NetworkModel::table2();
    for k in 0..n.num_tiers() {
        let t = n.tier(k);
        let median = {
            let (mut lo, mut hi) = (n.altitude(k), n.max_distance(k));
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if contact_distance_cdf(mid, t, n.earth_radius_km) < 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        println!(
            "tier {}: H = {} km, N = {}, horizon {:.0} km, P(visible) = {:.6}, median nearest distance {:.1} km",
            k + 1,
            t.altitude_km,
            t.mean_count,
            n.max_distance(k),
            visibility_probability(t, n.earth_radius_km),
            median
        );
    }
}
