//! Ergodic rate as the base-tier power grows under the power adjusting rule.

use leo_hetnet::association::AssociationScheme;
use leo_hetnet::channel::{with_adjusted_powers, FadingModel};
use leo_hetnet::coverage::CoverageEngine;
use leo_hetnet::geometry::NetworkModel;
use leo_hetnet::numerics::Tolerances;

fn main() -> leo_hetnet::Result<()> {
    let mut base = NetworkModel::table2();
    base.path_loss_exp = 2.5;
    println!("P1 [W]   dba     pba     rba   (nats/s/Hz, Rayleigh, alpha = 2.5)");
    for p1 in [1.0, 10.0, 100.0, 1000.0] {
        let n = with_adjusted_powers(p1, &base);
        let e = CoverageEngine::with_fading(&n, FadingModel::Rayleigh, Tolerances::default_profile())?;
        let rates: Vec<String> = AssociationScheme::ALL
            .iter()
            .map(|&s| e.spectral_efficiency(s).map(|r| format!("{:.4}", r.total)))
            .collect::<Result<_, _>>()?;
        println!("{p1:>6}  {}", rates.join("  "));
    }
    Ok(())
}
