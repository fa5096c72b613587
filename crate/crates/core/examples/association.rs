//! Tier association probabilities and mean serving distance per scheme.

use leo_hetnet::association::{AssociationModel, AssociationScheme};
use leo_hetnet::geometry::NetworkModel;
use leo_hetnet::numerics::{adaptive_quad, Tolerances};

fn main() -> leo_hetnet::Result<()> {
    let n = NetworkModel::table2();
    let m = AssociationModel::new(&n, Tolerances::default_profile().association)?;
    for s in AssociationScheme::ALL {
        let p = m.probabilities(s);
        let means: Vec<String> = (0..n.num_tiers())
            .map(|k| {
                let r = adaptive_quad(|r: f64| r * m.serving_distance_pdf(s, k, r), n.altitude(k), n.max_distance(k), 1e-9, 1e-9);
                format!("{:.0} km", r.value)
            })
            .collect();
        println!("{:>3}: P(tier) = {:.4?}, mean serving distance {}", s.label(), p, means.join(" / "));
    }
    Ok(())
}
