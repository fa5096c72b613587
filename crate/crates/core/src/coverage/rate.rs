use serde::Serialize;

use crate::association::AssociationScheme;
use crate::numerics::quadrature::{adaptive_quad_with, QuadOptions, QuadratureResult};

/// Upper end of the integrated range in u = ln(1 + β), about 60 dB.
const U_MAX: f64 = 13.815510557964274;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralEfficiency {
    pub scheme: AssociationScheme,
    /// Nats/s/Hz.
    pub total: f64,
    pub per_tier: Vec<f64>,
    pub assoc: Vec<f64>,
    pub abs_error: f64,
    pub converged: bool,
}

/// ∫₀^∞ P(β)/(1+β) dβ = ∫₀^∞ P(e^u − 1) du for a coverage function P.
///
/// The range beyond 60 dB is closed with the interference-limited tail
/// P ∝ β^{−2/α}, whose integral in u is P(u_max)·α/2.
pub fn ergodic_rate<F: FnMut(f64) -> f64>(mut coverage: F, alpha: f64, abs_tol: f64) -> QuadratureResult<f64> {
    let pts = [0.0, 1.0, 2.5, 5.0, 8.0, U_MAX];
    let mut q = adaptive_quad_with(|u: f64| coverage(u.exp_m1()), &pts, &QuadOptions::new(abs_tol, 1e-7));
    let tail = coverage(U_MAX.exp_m1()) * alpha / 2.0;
    q.value += tail;
    q.evaluations += 1;
    q
}
