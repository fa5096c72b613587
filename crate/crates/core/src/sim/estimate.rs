//! Coverage, association and rate estimates over many trials.
//!
//! Trials are cut into fixed blocks of [`BLOCK_TRIALS`]; block b draws from
//! ChaCha8 stream b of the run seed. Block summaries hold integer counts and
//! float sums that are merged in block order, so the estimate depends only
//! on (seed, trials) and not on how many workers ran the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::stats::EstimateWithCI;
use super::{scheme_index, TrialRunner};
use crate::association::AssociationScheme;
use crate::channel::FadingModel;
use crate::geometry::NetworkModel;
use crate::{Error, Result};

pub const BLOCK_TRIALS: u64 = 4096;

/// Minimum number of trials accepted by [`simulate`].
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct SchemeEstimate {
    pub scheme: AssociationScheme,
    /// P{SINR ≥ β} per grid point.
    pub coverage: Vec<EstimateWithCI>,
    /// E[ln(1 + SINR)] in nats/s/Hz.
    pub rate: EstimateWithCI,
    /// Frequency with which each tier serves.
    pub assoc: Vec<EstimateWithCI>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimSummary {
    pub beta_grid: Vec<f64>,
    pub schemes: Vec<SchemeEstimate>,
    /// Trials with at least one satellite in view; the denominators above.
    pub valid_trials: u64,
    /// Trials with nothing in view, excluded from the estimates.
    pub invisible_trials: u64,
}

impl SimSummary {
    pub fn scheme(&self, scheme: AssociationScheme) -> &SchemeEstimate {
        self.schemes.iter().find(|s| s.scheme == scheme).expect("all schemes simulated")
    }
}

#[derive(Debug, Clone)]
struct Block {
    /// covered[s][i]: trials of scheme s with SINR ≥ β_i.
    covered: Vec<Vec<u64>>,
    served: Vec<Vec<u64>>,
    rate_sum: [f64; 3],
    rate_sq: [f64; 3],
    valid: u64,
    invisible: u64,
}

impl Block {
    fn new(betas: usize, tiers: usize) -> Self {
        Self {
            covered: vec![vec![0; betas + 1]; 3],
            served: vec![vec![0; tiers]; 3],
            rate_sum: [0.0; 3],
            rate_sq: [0.0; 3],
            valid: 0,
            invisible: 0,
        }
    }

    fn merge(&mut self, other: &Block) {
        for s in 0..3 {
            for (a, b) in self.covered[s].iter_mut().zip(&other.covered[s]) {
                *a += b;
            }
            for (a, b) in self.served[s].iter_mut().zip(&other.served[s]) {
                *a += b;
            }
            self.rate_sum[s] += other.rate_sum[s];
            self.rate_sq[s] += other.rate_sq[s];
        }
        self.valid += other.valid;
        self.invisible += other.invisible;
    }
}

fn run_block(runner: &TrialRunner, betas: &[f64], seed: u64, block: u64, trials: u64) -> Block {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut out = Block::new(betas.len(), runner.network().num_tiers());
    for _ in 0..trials {
        let Some(o) = runner.run(&mut rng) else {
            out.invisible += 1;
            continue;
        };
        out.valid += 1;
        for s in 0..3 {
            // Counts of thresholds cleared, stored as a histogram and
            // accumulated into survival counts at the end.
            let cleared = betas.partition_point(|&b| b <= o.sinr[s]);
            out.covered[s][cleared] += 1;
            out.served[s][o.serving[s].tier] += 1;
            let r = o.sinr[s].ln_1p();
            out.rate_sum[s] += r;
            out.rate_sq[s] += r * r;
        }
    }
    out
}

/// Simulates every scheme at once under the network's fading model.
///
/// `partitions` is the number of worker threads; it has no effect on the
/// result.
pub fn simulate(network: &NetworkModel, beta_grid: &[f64], trials: u64, seed: u64, partitions: usize) -> Result<SimSummary> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid("trials", format!("need at least {MIN_TRIALS}, got {trials}")));
    }
    if partitions == 0 {
        return Err(Error::invalid("partitions", "must be at least 1"));
    }
    if beta_grid.windows(2).any(|w| !(w[0] < w[1])) || beta_grid.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::invalid("beta_grid", "thresholds must be positive and strictly ascending"));
    }
    network.validate()?;
    let runner = TrialRunner::new(network);
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(partitions)
        .build()
        .map_err(|e| Error::invalid("partitions", e.to_string()))?;
    let summaries: Vec<Block> = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let n = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
                run_block(&runner, beta_grid, seed, b, n)
            })
            .collect()
    });
    let mut total = Block::new(beta_grid.len(), network.num_tiers());
    for b in &summaries {
        total.merge(b);
    }

    let n = total.valid;
    let schemes = AssociationScheme::ALL
        .iter()
        .map(|&scheme| {
            let s = scheme_index(scheme);
            let hist = &total.covered[s];
            // covered at β_i = trials that cleared more than i thresholds.
            let mut coverage = vec![EstimateWithCI::proportion(0, n); beta_grid.len()];
            let mut above = 0;
            for i in (0..beta_grid.len()).rev() {
                above += hist[i + 1];
                coverage[i] = EstimateWithCI::proportion(above, n);
            }
            SchemeEstimate {
                scheme,
                coverage,
                rate: EstimateWithCI::from_moments(total.rate_sum[s], total.rate_sq[s], n),
                assoc: total.served[s].iter().map(|&c| EstimateWithCI::proportion(c, n)).collect(),
            }
        })
        .collect();
    Ok(SimSummary {
        beta_grid: beta_grid.to_vec(),
        schemes,
        valid_trials: n,
        invisible_trials: total.invisible,
    })
}

/// Estimate for one scheme and fading model.
pub fn estimate(
    network: &NetworkModel,
    scheme: AssociationScheme,
    fading: FadingModel,
    beta_grid: &[f64],
    trials: u64,
    seed: u64,
    partitions: usize,
) -> Result<SchemeEstimate> {
    let mut n = network.clone();
    n.fading = fading;
    let summary = simulate(&n, beta_grid, trials, seed, partitions)?;
    Ok(summary.scheme(scheme).clone())
}
