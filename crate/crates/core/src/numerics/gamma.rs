//! Gamma-family functions, backed by `statrs` with explicit domain checks.

use crate::{Error, Result};

/// Γ(x) for any real `x` that is not a non-positive integer.
///
/// Negative arguments go through the reflection formula, e.g. Γ(−2/α) in the
/// non-fading interference transform.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gamma_real", format!("non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::domain("gamma_real", format!("pole at {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("ln_gamma", format!("argument {x} must be positive")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ t^{s−1} e^{−t} dt (not regularized).
pub fn lower_inc_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain("lower_inc_gamma", format!("shape {s} must be positive")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain("lower_inc_gamma", format!("argument {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return gamma_real(s);
    }
    Ok(statrs::function::gamma::gamma_lr(s, x) * statrs::function::gamma::gamma(s))
}

/// Regularized lower incomplete gamma P(s, x) = γ(s, x)/Γ(s).
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) {
        return Err(Error::domain(
            "regularized_lower_gamma",
            format!("need s > 0 and x >= 0, got s={s}, x={x}"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(statrs::function::gamma::gamma_lr(s, x))
}
