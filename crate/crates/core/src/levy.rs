//! The four Lévy densities and the functionals the samplers need:
//! density, tail mass, inverse tail, Laplace exponent and small-jump mean.
//!
//! | family        | ρ(x)                                   |
//! |---------------|----------------------------------------|
//! | `Stable`      | `C α x^{-α-1}`                         |
//! | `Gamma`       | `θ e^{-x} / x`                         |
//! | `TruncStable` | `α x^{-α-1}` on `(0, 1)`               |
//! | `GenGamma`    | `α / Γ(1-α) · x^{-α-1} e^{-x}`          |

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::special_fn::{
    gamma_unchecked, inv_e1, ln_e1_unchecked, ln_upper_gamma_large_x, reg_lower_gamma, reg_upper_gamma,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LevyFamily {
    Stable { alpha: f64, c: f64 },
    Gamma { theta: f64 },
    TruncStable { alpha: f64 },
    GenGamma { alpha: f64 },
}

fn check_alpha(alpha: f64) -> Result<()> {
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
    Ok(())
}

impl LevyFamily {
    pub fn stable(alpha: f64, c: f64) -> Result<Self> {
        let f = LevyFamily::Stable { alpha, c };
        f.validate()?;
        Ok(f)
    }

    pub fn gamma(theta: f64) -> Result<Self> {
        let f = LevyFamily::Gamma { theta };
        f.validate()?;
        Ok(f)
    }

    pub fn trunc_stable(alpha: f64) -> Result<Self> {
        let f = LevyFamily::TruncStable { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn gen_gamma(alpha: f64) -> Result<Self> {
        let f = LevyFamily::GenGamma { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LevyFamily::Stable { alpha, c } => {
                check_alpha(alpha)?;
                ensure!(c > 0.0 && c.is_finite(), "stable scale C must be positive, got {c}");
            }
            LevyFamily::Gamma { theta } => {
                ensure!(theta > 0.0 && theta.is_finite(), "theta must be positive, got {theta}");
            }
            LevyFamily::TruncStable { alpha } | LevyFamily::GenGamma { alpha } => check_alpha(alpha)?,
        }
        Ok(())
    }

    /// Stability index, when the family has one.
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            LevyFamily::Stable { alpha, .. } | LevyFamily::TruncStable { alpha } | LevyFamily::GenGamma { alpha } => {
                Some(alpha)
            }
            LevyFamily::Gamma { .. } => None,
        }
    }

    /// Short name used in provenance records and the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            LevyFamily::Stable { .. } => "stable",
            LevyFamily::Gamma { .. } => "gamma",
            LevyFamily::TruncStable { .. } => "trunc-stable",
            LevyFamily::GenGamma { .. } => "gen-gamma",
        }
    }

    /// Right endpoint of the support of ρ.
    pub fn support_end(&self) -> f64 {
        match self {
            LevyFamily::TruncStable { .. } => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// ρ(x).
    pub fn rho(&self, x: f64) -> Result<f64> {
        ensure!(x > 0.0, "rho requires x > 0, got {x}");
        Ok(self.rho_unchecked(x))
    }

    #[inline]
    pub(crate) fn rho_unchecked(&self, x: f64) -> f64 {
        match *self {
            LevyFamily::Stable { alpha, c } => c * alpha * x.powf(-alpha - 1.0),
            LevyFamily::Gamma { theta } => theta * (-x).exp() / x,
            LevyFamily::TruncStable { alpha } => {
                if x < 1.0 {
                    alpha * x.powf(-alpha - 1.0)
                } else {
                    0.0
                }
            }
            LevyFamily::GenGamma { alpha } => alpha / gamma_unchecked(1.0 - alpha) * x.powf(-alpha - 1.0) * (-x).exp(),
        }
    }

    /// Tail mass `Λ̄(x) = ∫_x^∞ ρ`.
    pub fn tail_mass(&self, x: f64) -> Result<f64> {
        ensure!(x > 0.0, "tail_mass requires x > 0, got {x}");
        Ok(match *self {
            LevyFamily::Stable { alpha, c } => c * x.powf(-alpha),
            LevyFamily::Gamma { theta } => theta * ln_e1_unchecked(x).exp(),
            LevyFamily::TruncStable { alpha } => {
                if x < 1.0 {
                    x.powf(-alpha) - 1.0
                } else {
                    0.0
                }
            }
            LevyFamily::GenGamma { alpha } => gen_gamma_tail(alpha, x)?,
        })
    }

    /// The unique `x` with `Λ̄(x) = y`.
    pub fn inv_tail(&self, y: f64) -> Result<f64> {
        ensure!(y > 0.0 && y.is_finite(), "inv_tail requires a finite y > 0, got {y}");
        match *self {
            LevyFamily::Stable { alpha, c } => Ok((c / y).powf(1.0 / alpha)),
            LevyFamily::Gamma { theta } => inv_e1(y / theta),
            LevyFamily::TruncStable { alpha } => Ok((1.0 + y).powf(-1.0 / alpha)),
            LevyFamily::GenGamma { alpha } => gen_gamma_inv_tail(alpha, y),
        }
    }

    /// Laplace exponent `ψ(λ) = ∫ (1 - e^{-λx}) ρ(x) dx`.
    pub fn laplace_exponent(&self, lambda: f64) -> Result<f64> {
        ensure!(lambda >= 0.0, "laplace_exponent requires lambda >= 0, got {lambda}");
        if lambda == 0.0 {
            return Ok(0.0);
        }
        Ok(match *self {
            LevyFamily::Stable { alpha, c } => c * gamma_unchecked(1.0 - alpha) * lambda.powf(alpha),
            LevyFamily::Gamma { theta } => theta * lambda.ln_1p(),
            LevyFamily::GenGamma { alpha } => (alpha * lambda.ln_1p()).exp_m1(),
            LevyFamily::TruncStable { alpha } => {
                // λ^α γ(1-α, λ) - (1 - e^{-λ})
                let lower = reg_lower_gamma(1.0 - alpha, lambda)? * gamma_unchecked(1.0 - alpha);
                lambda.powf(alpha) * lower + (-lambda).exp_m1()
            }
        })
    }

    /// Small-jump mean `m(ε) = ∫_0^ε x ρ(x) dx`.
    pub fn small_jump_mean(&self, eps: f64) -> Result<f64> {
        ensure!(eps > 0.0, "small_jump_mean requires eps > 0, got {eps}");
        Ok(match *self {
            LevyFamily::Stable { alpha, c } => c * alpha * eps.powf(1.0 - alpha) / (1.0 - alpha),
            LevyFamily::Gamma { theta } => -theta * (-eps).exp_m1(),
            LevyFamily::TruncStable { alpha } => alpha * eps.min(1.0).powf(1.0 - alpha) / (1.0 - alpha),
            LevyFamily::GenGamma { alpha } => alpha * reg_lower_gamma(1.0 - alpha, eps)?,
        })
    }
}

/// `Λ̄(x) = α/Γ(1-α) · Γ(-α, x)`. Below 1 via `Γ(-α, x) = (x^{-α}e^{-x} - Γ(1-α, x))/α`,
/// above 1 by the continued fraction for `Γ(-α, x)` directly, avoiding the
/// cancellation the recurrence suffers in the tail.
fn gen_gamma_tail(alpha: f64, x: f64) -> Result<f64> {
    let g = gamma_unchecked(1.0 - alpha);
    if x < 1.0 {
        Ok(x.powf(-alpha) * (-x).exp() / g - reg_upper_gamma(1.0 - alpha, x)?)
    } else {
        Ok(alpha / g * ln_upper_gamma_large_x(-alpha, x)?.exp())
    }
}

fn gen_gamma_inv_tail(alpha: f64, y: f64) -> Result<f64> {
    let fam = LevyFamily::GenGamma { alpha };
    let target = y.ln();
    let h = |x: f64| -> Result<f64> { Ok(gen_gamma_tail(alpha, x)?.ln() - target) };

    // the stable part dominates near zero: Λ̄(x) ≈ x^{-α}/Γ(1-α); far out the
    // tail decays like e^{-x}, so the root lies below 1 - ln y
    let mut x = (y * gamma_unchecked(1.0 - alpha)).powf(-1.0 / alpha).min(1.0 + (-y.ln()).max(0.0));
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("inv_tail: y = {y} out of representable range")));
    }
    let (mut lo, mut hi) = (x, x);
    while h(lo)? < 0.0 {
        lo *= 0.5;
        ensure!(lo > 0.0, "inv_tail: y = {y} too large");
    }
    while h(hi)? > 0.0 {
        hi *= 2.0;
        ensure!(hi.is_finite(), "inv_tail: y = {y} too small");
    }
    for _ in 0..200 {
        let hx = h(x)?;
        if hx == 0.0 {
            return Ok(x);
        }
        if hx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // d/dx ln Λ̄ = -ρ/Λ̄
        let slope = -fam.rho_unchecked(x) / gen_gamma_tail(alpha, x)?;
        let mut next = x - hx / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 * x {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Convergence { what: "generalised gamma inverse tail", estimate: x, error: hi - lo })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::{quad_adaptive, quad_substituted, QuadratureSpec, Substitution};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid() -> Vec<LevyFamily> {
        vec![
            LevyFamily::Stable { alpha: 0.5, c: 1.0 },
            LevyFamily::Stable { alpha: 0.3, c: 2.0 },
            LevyFamily::Stable { alpha: 0.8, c: 0.7 },
            LevyFamily::Gamma { theta: 1.0 },
            LevyFamily::Gamma { theta: 2.5 },
            LevyFamily::TruncStable { alpha: 0.5 },
            LevyFamily::TruncStable { alpha: 0.25 },
            LevyFamily::GenGamma { alpha: 0.5 },
            LevyFamily::GenGamma { alpha: 0.3 },
            LevyFamily::GenGamma { alpha: 0.7 },
        ]
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-11, max_subdivisions: 2000 }
    }

    /// ∫_0^b g with the x^{-α} singularity at zero removed by a power map.
    fn quad_from_zero(fam: &LevyFamily, g: impl Fn(f64) -> f64, b: f64) -> f64 {
        let p = fam.alpha().map_or(1.0, |a| 1.0 / (1.0 - a));
        let b1 = b.min(1.0);
        let head = quad_substituted(&g, 0.0, b1, Substitution::PowerLeft(p), &spec()).unwrap();
        let tail = if b > 1.0 { quad_adaptive(&g, 1.0, b, &spec()).unwrap() } else { 0.0 };
        head + tail
    }

    #[test]
    fn rho_examples() {
        assert_relative_eq!(LevyFamily::Stable { alpha: 0.5, c: 1.0 }.rho(1.0).unwrap(), 0.5);
        assert_eq!(LevyFamily::TruncStable { alpha: 0.5 }.rho(2.0).unwrap(), 0.0);
        // mpmath: 0.5/Γ(0.5) e^{-1}
        assert_relative_eq!(
            LevyFamily::GenGamma { alpha: 0.5 }.rho(1.0).unwrap(),
            0.103_776_874_355_148_675_8,
            max_relative = 1e-13
        );
        assert!(LevyFamily::Gamma { theta: 1.0 }.rho(0.0).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(LevyFamily::stable(1.0, 1.0).is_err());
        assert!(LevyFamily::stable(0.5, 0.0).is_err());
        assert!(LevyFamily::gamma(-1.0).is_err());
        assert!(LevyFamily::trunc_stable(0.0).is_err());
        assert!(LevyFamily::gen_gamma(0.5).is_ok());
    }

    #[test]
    fn tail_mass_examples() {
        assert_relative_eq!(LevyFamily::Stable { alpha: 0.5, c: 1.0 }.tail_mass(4.0).unwrap(), 0.5);
        assert_eq!(LevyFamily::TruncStable { alpha: 0.3 }.tail_mass(1.0).unwrap(), 0.0);
        assert_relative_eq!(
            LevyFamily::Gamma { theta: 2.0 }.tail_mass(1.0).unwrap(),
            2.0 * 0.219_383_934_395_520_273_7,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gen_gamma_tail_reference_values() {
        // α/Γ(1-α) ∫_x^∞ u^{-α-1} e^{-u} du, mpmath quadrature
        let cases = [
            (0.5, 0.1, 0.959_621_412_696_784_776),
            (0.5, 0.5, 0.166_630_941_175_372_597),
            (0.5, 2.0, 0.008_490_702_616_829_637_55),
            (0.5, 5.0, 0.000_134_671_062_501_518_685),
            (0.3, 0.1, 0.601_664_632_371_614_266),
            (0.3, 2.0, 0.008_432_603_570_979_123_74),
            (0.7, 0.1, 1.061_816_257_784_382_485),
            (0.7, 2.0, 0.005_821_827_224_573_477_32),
        ];
        for (alpha, x, want) in cases {
            assert_relative_eq!(
                LevyFamily::GenGamma { alpha }.tail_mass(x).unwrap(),
                want,
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn tail_mass_matches_quadrature() {
        for fam in grid() {
            for x in [0.1, 0.5, 2.0] {
                if x >= fam.support_end() {
                    continue;
                }
                let end = fam.support_end();
                let q = quad_adaptive(|u| fam.rho_unchecked(u), x, end, &spec()).unwrap();
                assert_relative_eq!(fam.tail_mass(x).unwrap(), q, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn inv_tail_roundtrip() {
        for fam in grid() {
            for x in [1e-4, 0.01, 0.1, 0.5, 0.9, 2.0, 7.0] {
                if x >= fam.support_end() {
                    continue;
                }
                let y = fam.tail_mass(x).unwrap();
                assert_relative_eq!(fam.inv_tail(y).unwrap(), x, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn inv_tail_examples() {
        assert_relative_eq!(LevyFamily::Stable { alpha: 0.5, c: 1.0 }.inv_tail(1.0).unwrap(), 1.0);
        let near_one = LevyFamily::TruncStable { alpha: 0.5 }.inv_tail(1e-12).unwrap();
        assert!(near_one < 1.0 && (1.0 - near_one) < 1e-11);
        assert_relative_eq!(
            LevyFamily::Gamma { theta: 1.0 }.inv_tail(0.219_383_934_395_520_27).unwrap(),
            1.0,
            epsilon = 1e-6
        );
        assert!(LevyFamily::Gamma { theta: 1.0 }.inv_tail(0.0).is_err());
    }

    #[test]
    fn laplace_exponent_examples() {
        for fam in grid() {
            assert_eq!(fam.laplace_exponent(0.0).unwrap(), 0.0);
        }
        assert_relative_eq!(
            LevyFamily::Gamma { theta: 2.0 }.laplace_exponent(std::f64::consts::E - 1.0).unwrap(),
            2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            LevyFamily::Stable { alpha: 0.5, c: 1.0 }.laplace_exponent(1.0).unwrap(),
            PI.sqrt(),
            epsilon = 1e-8
        );
        assert!(LevyFamily::Gamma { theta: 2.0 }.laplace_exponent(-1.0).is_err());
    }

    #[test]
    fn laplace_exponent_matches_quadrature() {
        for fam in grid() {
            for lambda in [0.5, 1.0, 2.0] {
                let g = |x: f64| -(-lambda * x).exp_m1() * fam.rho_unchecked(x);
                let q = quad_from_zero(&fam, g, 1.0)
                    + if fam.support_end() > 1.0 { quad_adaptive(g, 1.0, f64::INFINITY, &spec()).unwrap() } else { 0.0 };
                assert_relative_eq!(fam.laplace_exponent(lambda).unwrap(), q, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn small_jump_mean_matches_quadrature() {
        for fam in grid() {
            for eps in [0.05f64, 0.5, 0.99, 3.0] {
                let q = quad_from_zero(&fam, |x| x * fam.rho_unchecked(x), eps.min(fam.support_end()));
                assert_relative_eq!(fam.small_jump_mean(eps).unwrap(), q, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn small_jump_mean_examples() {
        assert_relative_eq!(LevyFamily::Stable { alpha: 0.5, c: 1.0 }.small_jump_mean(1.0).unwrap(), 1.0);
        assert_relative_eq!(LevyFamily::Gamma { theta: 3.0 }.small_jump_mean(800.0).unwrap(), 3.0);
        assert_relative_eq!(LevyFamily::TruncStable { alpha: 0.5 }.small_jump_mean(1.0).unwrap(), 1.0);
        assert!(LevyFamily::TruncStable { alpha: 0.5 }.small_jump_mean(0.0).is_err());
    }

    #[test]
    fn laplace_exponent_nondecreasing_and_concave() {
        for fam in grid() {
            let h = 0.05;
            let psi: Vec<f64> = (0..200).map(|i| fam.laplace_exponent(i as f64 * h).unwrap()).collect();
            for w in psi.windows(3) {
                assert!(w[1] >= w[0]);
                let second = w[2] - 2.0 * w[1] + w[0];
                assert!(second <= 1e-12 * w[1].abs().max(1.0), "{fam:?}: {second}");
            }
        }
    }

    #[test]
    fn integrability_conditions() {
        // infinite mass near 0, finite tail, finite small-jump mean
        for fam in grid() {
            assert!(fam.tail_mass(1e-12).unwrap() > 20.0);
            assert!(fam.tail_mass(0.5).unwrap().is_finite());
            assert!(fam.small_jump_mean(1.0).unwrap().is_finite());
        }
    }
}
