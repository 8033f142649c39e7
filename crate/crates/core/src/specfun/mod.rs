//! Special functions and quadrature used by the analytic formulas.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod expint;
mod gamma;
pub mod quad;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use expint::exp_integral_e1;
pub use gamma::{digamma, ln_gamma, ln_upper_inc_gamma_reg, upper_inc_gamma_reg, EULER_GAMMA};
pub use quad::{integrate, Integral, QuadratureSpec};

pub(crate) use bessel::ln_bessel_k_raw;
pub(crate) use expint::exp_integral_e1_raw;
pub(crate) use gamma::{
    digamma_raw, ln_factorial_minus_one, ln_gamma_raw, ln_upper_inc_gamma_reg_raw, upper_inc_gamma_reg_raw,
};
