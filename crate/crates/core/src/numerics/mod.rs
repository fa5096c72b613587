//! Special functions and quadrature engines.

pub mod expint;
pub mod gamma;
pub mod hypergeometric;
pub mod oscillatory;
pub mod quadrature;
pub mod tolerance;

pub use expint::gen_exp_integral;
pub use gamma::{gamma_real, ln_gamma, lower_inc_gamma, regularized_lower_gamma};
pub use hypergeometric::{gauss_2f1, gauss_2f1_via, Hyp2f1Route};
pub use oscillatory::{oscillatory_semiinf, OscillatoryOptions};
pub use quadrature::{adaptive_quad, adaptive_quad_with, QuadOptions, QuadratureResult};
pub use tolerance::{Profile, Tolerances};
