//! Coverage probability under each fading model and association scheme.

use leo_hetnet::association::AssociationScheme;
use leo_hetnet::channel::FadingModel;
use leo_hetnet::coverage::{beta_grid_db, CoverageEngine};
use leo_hetnet::geometry::NetworkModel;
use leo_hetnet::numerics::Tolerances;

fn main() -> leo_hetnet::Result<()> {
    let n = NetworkModel::table2();
    let betas = beta_grid_db(-10.0, 30.0, 5);
    for fading in [FadingModel::table2_shadowed_rician(), FadingModel::Rayleigh, FadingModel::NonFading] {
        let e = CoverageEngine::with_fading(&n, fading, Tolerances::default_profile())?;
        println!("{} ({})", fading.label(), e.kind().label());
        for s in AssociationScheme::ALL {
            let c = e.curve(s, &betas)?;
            let cells: Vec<String> = c.total.iter().map(|p| format!("{p:.4}")).collect();
            println!("  {:>3} at -10/0/10/20/30 dB: {}", s.label(), cells.join("  "));
        }
    }
    Ok(())
}
