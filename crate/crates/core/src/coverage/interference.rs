//! Aggregate interference from the satellites of each tier lying between an
//! exclusion radius a_j and the horizon distance R_max_j.
//!
//! With g_j the unfaded interfering coefficient (power = g_j·r^{−α}) and c_j the
//! tier hazard coefficient, the interferers form a radial PPP of intensity
//! 2c_j·x on [a_j, R_max_j]. Mean, variance and Laplace transforms follow from
//! Campbell's theorem and the probability generating functional.

use num_complex::Complex64;

use crate::geometry::NetworkModel;
use crate::numerics::expint::gen_exp_integral;
use crate::numerics::gamma::gamma_real;
use crate::numerics::hypergeometric::gauss_2f1;
use crate::numerics::quadrature::adaptive_quad;
use crate::Result;

/// Σ_j 2c_j·h̄·g_j·(a_j^{2−α} − R_max_j^{2−α})/(α−2), each tier clamped at 0.
///
/// `mean_gain` is h̄ of the interfering links.
pub fn mean_interference(network: &NetworkModel, radii: &[f64], mean_gain: f64) -> f64 {
    let alpha = network.path_loss_exp;
    radii
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let rmax = network.max_distance(j);
            if a >= rmax {
                return 0.0;
            }
            let diff = a.powf(2.0 - alpha) - rmax.powf(2.0 - alpha);
            (2.0 * network.hazard(j) * mean_gain * network.interfering_coef(j) * diff / (alpha - 2.0)).max(0.0)
        })
        .sum()
}

/// Variance of the aggregate unfaded interference (second Campbell moment),
/// scaled by the second moment of the fading gain.
pub fn interference_variance(network: &NetworkModel, radii: &[f64], gain_second_moment: f64) -> f64 {
    let alpha = network.path_loss_exp;
    radii
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let rmax = network.max_distance(j);
            if a >= rmax {
                return 0.0;
            }
            let g = network.interfering_coef(j);
            let diff = a.powf(2.0 - 2.0 * alpha) - rmax.powf(2.0 - 2.0 * alpha);
            (2.0 * network.hazard(j) * gain_second_moment * g * g * diff / (2.0 * alpha - 2.0)).max(0.0)
        })
        .sum()
}

/// ϖ(r, w) = r^{2−α}·₂F₁(1, (α−2)/α; 2−2/α; −w·r^{−α}).
pub fn varpi(r: f64, w: f64, alpha: f64) -> Result<f64> {
    let b = (alpha - 2.0) / alpha;
    Ok(r.powf(2.0 - alpha) * gauss_2f1(1.0, b, 1.0 + b, -w * r.powf(-alpha))?)
}

/// ln E[e^{−sI}] for unit-mean exponential fading on every interfering link:
/// −Σ_j 2c_j·s·g_j·(ϖ(a_j) − ϖ(R_max_j))/(α−2) with ϖ evaluated at w = s·g_j.
pub fn log_laplace_rayleigh(network: &NetworkModel, radii: &[f64], s: f64) -> Result<f64> {
    let alpha = network.path_loss_exp;
    let mut total = 0.0;
    for (j, &a) in radii.iter().enumerate() {
        let rmax = network.max_distance(j);
        let g = network.interfering_coef(j);
        if a >= rmax || g == 0.0 || s == 0.0 {
            continue;
        }
        let w = s * g;
        let span = varpi(a, w, alpha)? - varpi(rmax, w, alpha)?;
        total -= 2.0 * network.hazard(j) * w * span / (alpha - 2.0);
    }
    Ok(total)
}

/// ϑ(r, z) = r²(α − 2E_{1+2/α}(z·r^{−α})) + 2z^{2/α}Γ(−2/α), with z = s·g the
/// product of transform variable and interfering coefficient.
///
/// dϑ/dr = 2αr(1 − e^{−z r^{−α}}), so ∫_a^b (1 − e^{−z x^{−α}}) x dx = (ϑ(b) − ϑ(a))/(2α).
pub fn theta(r: f64, z: Complex64, alpha: f64) -> Result<Complex64> {
    let p = 1.0 + 2.0 / alpha;
    let e = gen_exp_integral(p, z * r.powf(-alpha))?;
    let constant = z.powf(2.0 / alpha) * (2.0 * gamma_real(-2.0 / alpha)?);
    Ok((Complex64::new(alpha, 0.0) - e * 2.0) * (r * r) + constant)
}

/// ln E[e^{−sI}] for non-fading links and complex s with Re s ≥ 0:
/// Σ_j (c_j/α)(ϑ_j(a_j) − ϑ_j(R_max_j)). The constant Γ term cancels in the
/// difference and is omitted.
pub fn log_laplace_nonfading(network: &NetworkModel, radii: &[f64], s: Complex64) -> Result<Complex64> {
    let alpha = network.path_loss_exp;
    let p = 1.0 + 2.0 / alpha;
    let mut total = Complex64::new(0.0, 0.0);
    for (j, &a) in radii.iter().enumerate() {
        let rmax = network.max_distance(j);
        let g = network.interfering_coef(j);
        if a >= rmax || g == 0.0 {
            continue;
        }
        let z = s * g;
        let part = |r: f64| -> Result<Complex64> {
            Ok((Complex64::new(alpha, 0.0) - gen_exp_integral(p, z * r.powf(-alpha))? * 2.0) * (r * r))
        };
        total += (part(a)? - part(rmax)?) * (network.hazard(j) / alpha);
    }
    Ok(total)
}

/// Minimum of a unimodal function of ln θ on [lo, hi] by golden-section search.
fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Chernoff bound on ln P{s·I ≥ t} for non-fading links, minimised over θ > 0
/// of −θt + ln E[e^{θsI}]. The moment generating function is integrated
/// directly since the closed form does not continue to negative arguments.
pub fn chernoff_upper_nonfading(network: &NetworkModel, radii: &[f64], s: f64, t: f64) -> f64 {
    let alpha = network.path_loss_exp;
    // Largest single-interferer contribution; keeps θ·sI from overflowing.
    let peak = radii
        .iter()
        .enumerate()
        .filter(|(j, &a)| a < network.max_distance(*j))
        .map(|(j, &a)| s * network.interfering_coef(j) * a.powf(-alpha))
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return f64::NEG_INFINITY;
    }
    let log_mgf = |theta: f64| -> f64 {
        radii
            .iter()
            .enumerate()
            .filter(|(j, &a)| a < network.max_distance(*j))
            .map(|(j, &a)| {
                let w = theta * s * network.interfering_coef(j);
                let q = adaptive_quad(|x: f64| (w * x.powf(-alpha)).exp_m1() * x, a, network.max_distance(j), 0.0, 1e-10);
                2.0 * network.hazard(j) * q.value
            })
            .sum()
    };
    let hi = (600.0 / peak).ln();
    golden_min(|u| -u.exp() * t + log_mgf(u.exp()), hi - 40.0, hi)
}

/// Chernoff bound on ln P{s·I ≤ t} for non-fading links, minimised over θ > 0
/// of θt + ln E[e^{−θsI}].
pub fn chernoff_lower_nonfading(network: &NetworkModel, radii: &[f64], s: f64, t: f64) -> Result<f64> {
    let mut failure = None;
    let centre = (1.0 / t).ln();
    let v = golden_min(
        |u| match log_laplace_nonfading(network, radii, Complex64::new(u.exp() * s, 0.0)) {
            Ok(l) => u.exp() * t + l.re,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        centre - 20.0,
        centre + 30.0,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
