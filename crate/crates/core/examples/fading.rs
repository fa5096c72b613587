//! Shadowed-Rician gain distribution: series CDF against sampled gains.

use leo_hetnet::channel::{FadingModel, SrCdf};
use leo_hetnet::numerics::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> leo_hetnet::Result<()> {
    let model = FadingModel::table2_shadowed_rician();
    let FadingModel::ShadowedRician(params) = model else { unreachable!() };
    let cdf = SrCdf::new(params, Tolerances::default_profile().sr_series_tail)?;
    let sampler = model.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws: Vec<f64> = (0..200_000).map(|_| sampler.sample(&mut rng)).collect();
    println!("mean gain {:.3} (sampled {:.3}), series terms {}", model.mean_gain(), draws.iter().sum::<f64>() / draws.len() as f64, cdf.terms());
    for x in [1.0, 5.0, 10.0, 20.0, 30.0, 40.0] {
        let empirical = draws.iter().filter(|&&g| g <= x).count() as f64 / draws.len() as f64;
        println!("F({x:>4}) = {:.5}  empirical {empirical:.5}", cdf.cdf(x)?);
    }
    Ok(())
}
