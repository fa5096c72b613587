//! Semi-infinite integrals ∫₀^∞ Im{f(t)}/t dt of oscillatory integrands.
//!
//! The half-line is cut into half-period panels of the dominant oscillation
//! and each panel is integrated adaptively. When the integrand decays the
//! plain panel sum converges and is returned. Otherwise the partial sums are
//! accelerated by Abel damping: the same panels are integrated against
//! e^{−εt} for a geometric ladder of ε, each damped sum converges absolutely,
//! and the ladder is extrapolated to ε = 0 by Neville's scheme. Unlike
//! epsilon-type transforms this also handles mixtures of incommensurate
//! frequencies, whose panel sums converge only logarithmically.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use super::quadrature::{adaptive_quad, QuadValue, QuadratureResult};

#[derive(Debug, Clone, Copy)]
pub struct OscillatoryOptions {
    /// Absolute error target for the whole integral.
    pub abs_tol: f64,
    /// Hard cap on the number of half-period panels.
    pub max_panels: usize,
}

impl Default for OscillatoryOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-6,
            max_panels: 100_000,
        }
    }
}

/// Number of damped levels; level k uses ε = ω·2^{−k−FIRST_LEVEL}.
const LEVELS: usize = 8;
const FIRST_LEVEL: i32 = 1;

/// Undamped integrand followed by its damped copies, integrated together so
/// that every level shares the same function evaluations.
#[derive(Debug, Clone, Copy)]
struct Ladder([f64; LEVELS + 1]);

impl Add for Ladder {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Ladder {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Mul<f64> for Ladder {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= k;
        }
        self
    }
}

impl QuadValue for Ladder {
    fn zero() -> Self {
        Ladder([0.0; LEVELS + 1])
    }
    fn magnitude(self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn is_finite_value(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Neville extrapolation of (x_i, y_i) to x = 0. Returns the estimate using all
/// points and the one using all but the last.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let extrapolate = |m: usize| {
        let mut p = ys[..m].to_vec();
        for k in 1..m {
            for i in 0..m - k {
                p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
            }
        }
        p[0]
    };
    (extrapolate(n), extrapolate(n - 1))
}

/// ∫₀^∞ Im{f(t)}/t dt.
///
/// `omega` is the angular frequency of the dominant oscillation; panels are
/// π/ω wide. Im f(t) must vanish like O(t) at the origin.
pub fn oscillatory_semiinf<F>(mut f: F, omega: f64, opts: &OscillatoryOptions) -> QuadratureResult<f64>
where
    F: FnMut(f64) -> Complex64,
{
    let omega = omega.abs().max(1e-300);
    let width = PI / omega;
    let eps: [f64; LEVELS] = std::array::from_fn(|k| omega * 2f64.powi(-(k as i32) - FIRST_LEVEL));
    let panel_tol = opts.abs_tol * 1e-4;
    let mut sums = Ladder::zero();
    let mut quad_error = 0.0;
    let mut evaluations = 0;
    let mut small_panels = 0;
    let mut peak_panel: f64 = 0.0;

    for i in 0..opts.max_panels {
        let lo = i as f64 * width;
        let hi = lo + width;
        let panel = adaptive_quad(
            |t: f64| {
                let g = f(t).im / t;
                let mut out = [0.0; LEVELS + 1];
                out[0] = g;
                for (o, e) in out[1..].iter_mut().zip(eps) {
                    *o = g * (-e * t).exp();
                }
                Ladder(out)
            },
            lo,
            hi,
            panel_tol,
            1e-12,
        );
        evaluations += panel.evaluations;
        quad_error += panel.abs_error;
        sums = sums + panel.value;

        let contribution = panel.value.0[0].abs();
        peak_panel = peak_panel.max(contribution);
        small_panels = if contribution < panel_tol { small_panels + 1 } else { 0 };
        if i >= 4 && small_panels >= 4 {
            // The integrand has decayed: the plain sum is the answer.
            let abs_error = quad_error + 4.0 * panel_tol;
            return QuadratureResult {
                value: sums.0[0],
                abs_error,
                evaluations,
                converged: abs_error <= opts.abs_tol,
            };
        }

        // Geometric bound on what the most weakly damped level still lacks.
        let e_min = eps[LEVELS - 1];
        let tail = peak_panel * (-e_min * hi).exp() / (1.0 - (-e_min * width).exp());
        if tail < panel_tol {
            let (best, previous) = neville_at_zero(&eps, &sums.0[1..]);
            let abs_error = (best - previous).abs() + quad_error * 10.0 + tail;
            return QuadratureResult {
                value: best,
                abs_error,
                evaluations,
                converged: abs_error <= opts.abs_tol,
            };
        }
    }

    let (best, previous) = neville_at_zero(&eps, &sums.0[1..]);
    QuadratureResult {
        value: best,
        abs_error: (best - previous).abs(),
        evaluations,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn dirichlet_integral() {
        let r = oscillatory_semiinf(|t| Complex64::new(0.0, 3.0 * t).exp(), 3.0, &Default::default());
        assert!(r.converged);
        assert!((r.value - FRAC_PI_2).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn difference_of_dirichlet_integrals() {
        let r = oscillatory_semiinf(
            |t| Complex64::new(0.0, t).exp() - Complex64::new(0.0, 2.0 * t).exp(),
            1.0,
            &Default::default(),
        );
        assert!(r.converged);
        assert!(r.value.abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn exponential_tail_by_inversion() {
        // P{X ≥ x} = 1/2 + (1/π) ∫₀^∞ Im{e^{−itx} φ(t)}/t dt, φ(t) = 1/(1 − it).
        let x = 1.0;
        let r = oscillatory_semiinf(
            |t| Complex64::new(0.0, -t * x).exp() / Complex64::new(1.0, -t),
            1.0,
            &Default::default(),
        );
        assert!(r.converged);
        let tail = 0.5 + r.value / PI;
        assert!((tail - (-1.0f64).exp()).abs() < 1e-5, "{tail}");
    }

    #[test]
    fn panel_cap_is_flagged() {
        let opts = OscillatoryOptions {
            abs_tol: 1e-14,
            max_panels: 5,
        };
        let r = oscillatory_semiinf(|t| Complex64::new(0.0, t).exp(), 1.0, &opts);
        assert!(!r.converged);
        assert!(r.value.is_finite());
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        let xs = [0.5, 0.25, 0.125, 0.0625];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x + x * x * x).collect();
        let (v, _) = neville_at_zero(&xs, &ys);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
