//! Gauss hypergeometric ₂F₁(a, b; c; x) on the non-positive real axis.
//!
//! Three evaluation routes:
//! * the defining series, for |x| < 1;
//! * Pfaff's transformation ₂F₁(a,b;c;x) = (1−x)^{−a} ₂F₁(a, c−b; c; x/(x−1)),
//!   valid for every x < 0;
//! * the 1/x connection formula, only for the family a = 1, c = b + 1 with
//!   0 < b < 1 (the Rayleigh interference transform), for x < −1.

use std::f64::consts::PI;

use crate::{Error, Result};

const MAX_TERMS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyp2f1Route {
    Direct,
    Pfaff,
    Inversion,
}

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c == c.round()
}

fn series(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term == 0.0 || term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesTruncation {
        function: "gauss_2f1",
        terms: MAX_TERMS,
    })
}

/// True when (a, b, c) belongs to the family ₂F₁(1, b; b+1; ·) with 0 < b < 1.
fn is_rayleigh_family(a: f64, b: f64, c: f64) -> bool {
    a == 1.0 && b > 0.0 && b < 1.0 && (c - (b + 1.0)).abs() <= 1e-14
}

fn inversion(b: f64, x: f64) -> Result<f64> {
    // ₂F₁(1,b;b+1;x) = b/(b−1)·(−x)^{−1}·₂F₁(1, 1−b; 2−b; 1/x) + πb/sin(πb)·(−x)^{−b}
    let tail = series(1.0, 1.0 - b, 2.0 - b, 1.0 / x)?;
    Ok(b / (b - 1.0) / (-x) * tail + PI * b / (PI * b).sin() * (-x).powf(-b))
}

/// Evaluate ₂F₁ through an explicitly chosen route.
pub fn gauss_2f1_via(a: f64, b: f64, c: f64, x: f64, route: Hyp2f1Route) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::domain("gauss_2f1", format!("c = {c} is a non-positive integer")));
    }
    if !(x <= 0.0) {
        return Err(Error::domain("gauss_2f1", format!("x = {x} outside (-inf, 0]")));
    }
    match route {
        Hyp2f1Route::Direct => {
            if x <= -1.0 {
                return Err(Error::domain("gauss_2f1", format!("direct series diverges at x = {x}")));
            }
            series(a, b, c, x)
        }
        Hyp2f1Route::Pfaff => {
            let w = x / (x - 1.0);
            Ok((1.0 - x).powf(-a) * series(a, c - b, c, w)?)
        }
        Hyp2f1Route::Inversion => {
            if !is_rayleigh_family(a, b, c) {
                return Err(Error::domain(
                    "gauss_2f1",
                    format!("1/x route only supports (1, b; b+1) with 0<b<1, got ({a}, {b}; {c})"),
                ));
            }
            if x >= -1.0 {
                return Err(Error::domain("gauss_2f1", format!("1/x route needs x < -1, got {x}")));
            }
            inversion(b, x)
        }
    }
}

/// ₂F₁(a, b; c; x) for x ≤ 0, picking the fastest-converging route.
///
/// Outside the (1, b; b+1) family only |x| up to about 10 is supported; beyond
/// that Pfaff's series converges too slowly and a domain error is returned.
pub fn gauss_2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if x >= -0.5 {
        gauss_2f1_via(a, b, c, x, Hyp2f1Route::Direct)
    } else if x >= -2.0 || (!is_rayleigh_family(a, b, c) && x >= -10.0) {
        gauss_2f1_via(a, b, c, x, Hyp2f1Route::Pfaff)
    } else if is_rayleigh_family(a, b, c) {
        gauss_2f1_via(a, b, c, x, Hyp2f1Route::Inversion)
    } else {
        Err(Error::domain(
            "gauss_2f1",
            format!("unsupported parameters ({a}, {b}; {c}) at x = {x}"),
        ))
    }
}
