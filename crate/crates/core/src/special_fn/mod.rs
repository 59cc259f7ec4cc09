//! Scalar special functions, random-variate kernels and quadrature.

mod expint;
mod gamma_fn;
mod quad;
mod variates;

use std::f64::consts::PI;

pub use expint::{exp_integral_e1, inv_e1};
pub use gamma_fn::{erfc, ln_gamma, lower_gamma, reg_lower_gamma, reg_upper_gamma};
pub use quad::{quad_adaptive, quad_adaptive_detail, quad_substituted, QuadOutcome, QuadratureSpec, Substitution};
pub use variates::{sample_beta, sample_gamma};

pub(crate) use expint::ln_e1_unchecked;
pub(crate) use gamma_fn::{gamma_unchecked, ln_gamma_unchecked, ln_upper_gamma_large_x};
pub(crate) use variates::{sample_beta_split, sample_beta_unchecked};

use crate::error::{ensure, Result};

/// Density of the positive 1/2-stable law with Laplace transform `e^{-c√λ}`:
/// `(c / 2√π) t^{-3/2} exp(-c²/4t)`.
pub fn levy_half_density(t: f64, c: f64) -> Result<f64> {
    ensure!(t > 0.0, "levy_half_density requires t > 0, got {t}");
    ensure!(c > 0.0, "levy_half_density requires c > 0, got {c}");
    Ok(levy_half_density_unchecked(t, c))
}

#[inline]
pub(crate) fn levy_half_density_unchecked(t: f64, c: f64) -> f64 {
    let q = c * c / (4.0 * t);
    if q > 745.0 {
        return 0.0;
    }
    c / (2.0 * PI.sqrt()) * t.powf(-1.5) * (-q).exp()
}
