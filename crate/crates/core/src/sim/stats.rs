use serde::Serialize;

/// Kolmogorov–Smirnov distance between the empirical CDF of `sorted` and `cdf`.
pub fn ks_statistic<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// A Monte Carlo mean with its normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: u64,
}

impl EstimateWithCI {
    /// Proportion `hits / trials`; half-width 1.96·sqrt(p(1−p)/n).
    pub fn proportion(hits: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self {
                mean: f64::NAN,
                half_width_95: f64::NAN,
                trials,
            };
        }
        let p = hits as f64 / trials as f64;
        Self {
            mean: p,
            half_width_95: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Sample mean from a running sum and sum of squares.
    pub fn from_moments(sum: f64, sum_sq: f64, trials: u64) -> Self {
        let n = trials as f64;
        let mean = sum / n;
        let var = ((sum_sq - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
        Self {
            mean,
            half_width_95: 1.96 * (var / n).sqrt(),
            trials,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width_95
    }
}
