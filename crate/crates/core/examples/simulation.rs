//! Monte Carlo coverage with confidence intervals beside the exact analysis.

use leo_hetnet::association::AssociationScheme;
use leo_hetnet::channel::FadingModel;
use leo_hetnet::coverage::{beta_grid_db, CoverageEngine};
use leo_hetnet::geometry::NetworkModel;
use leo_hetnet::numerics::Tolerances;
use leo_hetnet::sim::simulate;

fn main() -> leo_hetnet::Result<()> {
    let mut n = NetworkModel::table2();
    n.fading = FadingModel::Rayleigh;
    let betas = beta_grid_db(-10.0, 30.0, 9);
    let sim = simulate(&n, &betas, 50_000, 7, 4)?;
    println!("{} valid trials, {} with nothing in view", sim.valid_trials, sim.invisible_trials);
    let e = CoverageEngine::with_fading(&n, n.fading, Tolerances::default_profile())?;
    for s in AssociationScheme::ALL {
        let analytic = e.curve(s, &betas)?;
        println!("{}:", s.label());
        for (i, b) in betas.iter().enumerate() {
            let m = &sim.scheme(s).coverage[i];
            println!("  {:>5.1} dB  analysis {:.4}  simulation {:.4} ± {:.4}", 10.0 * b.log10(), analytic.total[i], m.mean, m.half_width_95);
        }
    }
    Ok(())
}
