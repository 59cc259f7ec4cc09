//! Densities, constants and moment formulas for the remaining-sum chain.
//!
//! Pointwise densities need `g_r`, the density of the total of `BN(r, ρ)`.
//! It is available here for the stable family with `α = 1/2`, where the
//! Poisson total at intensity `v` has the closed Lévy kernel with scale
//! `c(v) = v C Γ(1/2)`, and `g_r` is that kernel mixed over `v ~ Gamma(r, 1)`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::levy::LevyFamily;
use crate::point_process::{sample_nb_jumps, DEFAULT_MAX_JUMPS};
use crate::special_fn::{
    ln_gamma, ln_gamma_unchecked, quad_adaptive, quad_substituted, reg_upper_gamma, sample_beta_unchecked,
    QuadratureSpec, Substitution,
};
use crate::stats::mc_mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityContext {
    pub family: LevyFamily,
    pub r: f64,
    pub quad: QuadratureSpec,
}

impl DensityContext {
    pub fn new(family: LevyFamily, r: f64) -> Result<Self> {
        family.validate()?;
        ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
        Ok(DensityContext { family, r, quad: QuadratureSpec::default() })
    }

    pub fn with_quad(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    /// The same context with `r` replaced by `r + k`.
    pub fn shifted(&self, k: f64) -> Self {
        DensityContext { r: self.r + k, ..*self }
    }

    /// `C Γ(1/2)`, the kernel scale per unit intensity.
    fn half_stable_scale(&self) -> Result<f64> {
        match self.family {
            LevyFamily::Stable { alpha: 0.5, c } => Ok(c * PI.sqrt()),
            other => Err(Error::Unsupported(format!(
                "g_r has a closed kernel only for the stable family with alpha = 1/2, not {other:?}"
            ))),
        }
    }
}

/// `r^{[n]} = r (r+1) ⋯ (r+n−1)`, with `r^{[0]} = 1`.
pub fn ascending_factorial(r: f64, n: u32) -> Result<f64> {
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    Ok(ln_ascending_factorial(r, n).exp())
}

fn ln_ascending_factorial(r: f64, n: u32) -> f64 {
    if n <= 32 {
        (0..n).map(|i| r + i as f64).product::<f64>().ln()
    } else {
        ln_gamma_unchecked(r + n as f64) - ln_gamma_unchecked(r)
    }
}

/// `Θ(x) = x ρ(x)`.
pub fn theta_fn(fam: &LevyFamily, x: f64) -> Result<f64> {
    ensure!(x > 0.0, "theta_fn requires x > 0, got {x}");
    Ok(x * fam.rho(x)?)
}

/// `∫_0^∞ f` for a density that may blow up like `t^{-β}` (`β < 1/2`) at 0
/// and decay like `t^{-3/2}` at ∞. Split at `pivot`; the left piece uses
/// `t = pivot s²`, the right piece `t = pivot / u²`.
fn integrate_positive_axis<F: Fn(f64) -> f64>(f: F, pivot: f64, spec: &QuadratureSpec) -> Result<f64> {
    let left = quad_substituted(&f, 0.0, pivot, Substitution::PowerLeft(2.0), spec)?;
    let right = quad_adaptive(
        |u: f64| if u <= 0.0 { 0.0 } else { f(pivot / (u * u)) * 2.0 * pivot / (u * u * u) },
        0.0,
        1.0,
        spec,
    )?;
    Ok(left + right)
}

/// `∫_0^∞ y^{a−1} e^{−s y} h(y) dy` for a bounded, fast-decaying `h`, split
/// near the bulk of the integrand.
fn mixture_integral<H: Fn(f64) -> f64>(a: f64, s: f64, h: H, spec: &QuadratureSpec) -> Result<f64> {
    let f = |y: f64| if y <= 0.0 { 0.0 } else { ((a - 1.0) * y.ln() - s * y).exp() * h(y) };
    // y^{a-1} e^{-sy} peaks at (a-1)/s; keep a breakpoint within the Gaussian-ish bulk of h
    let split = if s > 0.0 { (a.max(1.0) / s).clamp(0.25, 4.0) } else { 4.0 };
    let sub = if a < 1.0 { Substitution::PowerLeft(2.0 / a) } else { Substitution::Identity };
    let head = quad_substituted(f, 0.0, split, sub, spec)?;
    let tail = quad_adaptive(f, split, f64::INFINITY, spec)?;
    Ok(head + tail)
}

/// Density of the `BN(r, ρ)` total at `t` (stable, `α = 1/2`).
///
/// With `s = 2√t / (C√π)` and `v = s y`,
/// `g_r(t) = s^r / (√π Γ(r) t) ∫ y^r e^{−y² − s y} dy`.
pub fn g_r_density(ctx: &DensityContext, t: f64) -> Result<f64> {
    let c0 = ctx.half_stable_scale()?;
    ensure!(t > 0.0 && t.is_finite(), "g_r requires finite t > 0, got {t}");
    let r = ctx.r;
    let s = 2.0 * t.sqrt() / c0;
    let integral = mixture_integral(r + 1.0, s, |y| (-y * y).exp(), &ctx.quad)?;
    let ln_pref = r * s.ln() - 0.5 * PI.ln() - ln_gamma_unchecked(r) - t.ln();
    Ok(ln_pref.exp() * integral)
}

/// Distribution function of the `BN(r, ρ)` total (stable, `α = 1/2`):
/// `∫ erfc(c(v) / 2√t) γ_r(v) dv`.
pub fn g_r_cdf(ctx: &DensityContext, t: f64) -> Result<f64> {
    marginal_tn_cdf(ctx, 0, t)
}

/// `∫_0^∞ e^{−λt} g_r(t) dt` by quadrature of the density.
pub fn g_r_laplace_transform(ctx: &DensityContext, lambda: f64) -> Result<f64> {
    ensure!(lambda >= 0.0 && lambda.is_finite(), "lambda must be nonnegative, got {lambda}");
    ctx.half_stable_scale()?;
    let pivot = if lambda > 0.0 { (1.0 / lambda).min(1.0) } else { 1.0 };
    integrate_positive_axis(
        |t| if t.is_finite() && t > 0.0 { (-lambda * t).exp() * g_r_density(ctx, t).unwrap_or(f64::NAN) } else { 0.0 },
        pivot,
        &ctx.quad,
    )
}

/// `g_r(t) − r ∫_0^t ρ(v) g_{r+1}(t−v) (v/t) dv`; zero up to quadrature error.
pub fn g_r_recursion_residual(ctx: &DensityContext, t: f64) -> Result<f64> {
    let lhs = g_r_density(ctx, t)?;
    let next = ctx.shifted(1.0);
    let fam = ctx.family;
    let f = |v: f64| {
        if v <= 0.0 || v >= t {
            return 0.0;
        }
        fam.rho_unchecked(v) * v / t * g_r_density(&next, t - v).unwrap_or(f64::NAN)
    };
    let half = 0.5 * t;
    let rhs = quad_substituted(f, 0.0, half, Substitution::PowerLeft(2.0), &ctx.quad)?
        + quad_substituted(f, half, t, Substitution::PowerRight(2.0), &ctx.quad)?;
    Ok(lhs - ctx.r * rhs)
}

/// Joint density of `(T_0, …, T_n)` at a strictly decreasing `ts`:
/// `r^{[n]} g_{r+n}(t_n) Π Θ(t_i − t_{i+1}) / t_i`.
pub fn joint_remaining_density(ctx: &DensityContext, ts: &[f64]) -> Result<f64> {
    ensure!(!ts.is_empty(), "need at least one remaining sum");
    ensure!(ts.iter().all(|&t| t > 0.0 && t.is_finite()), "remaining sums must be positive");
    ensure!(ts.windows(2).all(|w| w[0] > w[1]), "remaining sums must be strictly decreasing");
    let n = (ts.len() - 1) as u32;
    let mut value = ascending_factorial(ctx.r, n)? * g_r_density(&ctx.shifted(n as f64), ts[n as usize])?;
    for w in ts.windows(2) {
        value *= theta_fn(&ctx.family, w[0] - w[1])? / w[0];
    }
    Ok(value)
}

/// Transition density of the remaining-sum chain from `T_n = t` to `T_{n+1} = t1`:
/// `(r+n) Θ(t − t1)/t · g_{r+n+1}(t1) / g_{r+n}(t)`.
pub fn transition_density(ctx: &DensityContext, n: u32, t: f64, t1: f64) -> Result<f64> {
    ensure!(t1 > 0.0 && t1 < t, "transition needs 0 < t1 < t, got t = {t}, t1 = {t1}");
    let here = ctx.shifted(n as f64);
    let rn = here.r;
    Ok(rn * theta_fn(&ctx.family, t - t1)? / t * g_r_density(&here.shifted(1.0), t1)? / g_r_density(&here, t)?)
}

/// Density of the first size-biased pick as a fraction `w` of `T_0 = t`:
/// `r Θ(t w) g_{r+1}(t (1−w)) / g_r(t)`.
pub fn first_pick_density(ctx: &DensityContext, w: f64, t: f64) -> Result<f64> {
    ensure!(w > 0.0 && w < 1.0, "w must lie in (0, 1), got {w}");
    ensure!(t > 0.0 && t.is_finite(), "t must be positive, got {t}");
    Ok(ctx.r * theta_fn(&ctx.family, t * w)? * g_r_density(&ctx.shifted(1.0), t * (1.0 - w))?
        / g_r_density(ctx, t)?)
}

/// `∫_0^1 f̃_r(w | t) dw`.
pub fn first_pick_mass(ctx: &DensityContext, t: f64) -> Result<f64> {
    let base = g_r_density(ctx, t)?;
    let next = ctx.shifted(1.0);
    let fam = ctx.family;
    let f = |w: f64| {
        if w <= 0.0 || w >= 1.0 {
            return 0.0;
        }
        fam.rho_unchecked(t * w) * t * w * g_r_density(&next, t * (1.0 - w)).unwrap_or(f64::NAN)
    };
    let mass = quad_substituted(f, 0.0, 0.5, Substitution::PowerLeft(2.0), &ctx.quad)?
        + quad_substituted(f, 0.5, 1.0, Substitution::PowerRight(2.0), &ctx.quad)?;
    Ok(ctx.r * mass / base)
}

fn stable_params(fam: &LevyFamily) -> Result<(f64, f64)> {
    match *fam {
        LevyFamily::Stable { alpha, c } => Ok((alpha, c)),
        other => Err(Error::Unsupported(format!("the remaining-sum marginals need the stable family, not {other:?}"))),
    }
}

/// `L_n = r^{[n]} (C Γ(1−α))^n Γ(nα+1) / Γ(n+1)`.
pub fn l_n_constant(alpha: f64, c: f64, r: f64, n: u32) -> Result<f64> {
    LevyFamily::stable(alpha, c)?;
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    let nf = n as f64;
    let ln = ln_ascending_factorial(r, n) + nf * (c.ln() + ln_gamma(1.0 - alpha)?) + ln_gamma(nf * alpha + 1.0)?
        - ln_gamma(nf + 1.0)?;
    Ok(ln.exp())
}

/// `E[T^{−nα}]` for `T` the `BN(r+n, ρ_α)` total: `1 / L_n`.
pub fn inverse_moment(alpha: f64, c: f64, r: f64, n: u32) -> Result<f64> {
    ensure!(n >= 1, "inverse_moment needs n >= 1");
    Ok(1.0 / l_n_constant(alpha, c, r, n)?)
}

/// Density of `T_n`, the sum left after `n` size-biased picks from `BN(r, ρ_α)`:
/// `L_n t^{−nα} g_{r+n}(t)`.
pub fn marginal_tn_density(ctx: &DensityContext, n: u32, t: f64) -> Result<f64> {
    let (alpha, c) = stable_params(&ctx.family)?;
    ensure!(t > 0.0 && t.is_finite(), "t must be positive, got {t}");
    Ok(l_n_constant(alpha, c, ctx.r, n)? * t.powf(-(n as f64) * alpha) * g_r_density(&ctx.shifted(n as f64), t)?)
}

/// Distribution function of `T_n` (stable, `α = 1/2`). Integrating the Lévy
/// kernel against `t^{−n/2}` in closed form leaves one quadrature over the
/// mixing variable:
/// `L_n ∫ γ_{r+n}(v) c/(2√π) (4/c²)^{(n+1)/2} Γ((n+1)/2, c²/4x) dv` with `c = c0 v`.
pub fn marginal_tn_cdf(ctx: &DensityContext, n: u32, x: f64) -> Result<f64> {
    let c0 = ctx.half_stable_scale()?;
    ensure!(x >= 0.0, "x must be nonnegative, got {x}");
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let (alpha, c) = stable_params(&ctx.family)?;
    let rn = ctx.r + n as f64;
    let a = 0.5 * (n as f64 + 1.0);
    // with v = s y, s = 2√x/c0: c²/4x = y², and the v-powers collect into y^{r−1}
    let s = 2.0 * x.sqrt() / c0;
    let h = |y: f64| reg_upper_gamma(a, y * y).unwrap_or(f64::NAN);
    let integral = mixture_integral(ctx.r, s, h, &ctx.quad)?;
    let nf = n as f64;
    let ln_pref = l_n_constant(alpha, c, ctx.r, n)?.ln() + ln_gamma_unchecked(a) + nf * 2f64.ln()
        - 0.5 * PI.ln()
        - nf * c0.ln()
        - ln_gamma_unchecked(rn)
        + ctx.r * s.ln();
    Ok((ln_pref.exp() * integral).clamp(0.0, 1.0))
}

/// `d(u) = min_i Π_{j≥i} u_j / (1 − u_i)`.
pub fn d_min(u: &[f64]) -> Result<f64> {
    ensure!(!u.is_empty(), "d_min needs at least one fraction");
    ensure!(u.iter().all(|&x| x > 0.0 && x < 1.0), "fractions must lie in (0, 1)");
    let mut suffix = 1.0;
    let mut best = f64::INFINITY;
    for &x in u.iter().rev() {
        suffix *= x;
        best = best.min(suffix / (1.0 - x));
    }
    Ok(best)
}

/// `K_n = Γ(n+1) / (Γ^n(1−α) Γ(nα+1))`.
pub fn k_n_constant(alpha: f64, n: u32) -> Result<f64> {
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
    ensure!(n >= 1, "K_n needs n >= 1");
    let nf = n as f64;
    Ok((ln_gamma(nf + 1.0)? - nf * ln_gamma(1.0 - alpha)? - ln_gamma(nf * alpha + 1.0)?).exp())
}

/// `K_n` in its product form `Π_{i<n} Γ(1+iα) / (α^n Γ^n(1−α) Π_{i≤n} Γ(iα))`.
pub fn k_n_constant_product_form(alpha: f64, n: u32) -> Result<f64> {
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
    ensure!(n >= 1, "K_n needs n >= 1");
    let nf = n as f64;
    let mut ln = -nf * alpha.ln() - nf * ln_gamma(1.0 - alpha)?;
    for i in 0..n {
        ln += ln_gamma(1.0 + i as f64 * alpha)?;
    }
    for i in 1..=n {
        ln -= ln_gamma(i as f64 * alpha)?;
    }
    Ok(ln.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub n_samples: usize,
}

impl ConstantCheck {
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.target).abs() / self.stderr
    }
}

/// Monte Carlo estimate of `r^{[n]} E[T^{−nα} 1{T < d(U)}]` against `K_n`,
/// with `U_i ~ Beta(iα, 1−α)` independent and `T` the total of
/// `BN(r+n, ρ*_α)` (truncated stable).
pub fn trimmed_constant_check<R: Rng + ?Sized>(
    alpha: f64,
    r: f64,
    n: u32,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ConstantCheck> {
    let target = k_n_constant(alpha, n)?;
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    ensure!(n_samples >= 2, "need at least two samples");
    let fam = LevyFamily::trunc_stable(alpha)?;
    let factor = ascending_factorial(r, n)?;
    let mut u = vec![0.0; n as usize];
    let mut values = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        for (i, ui) in u.iter_mut().enumerate() {
            *ui = sample_beta_unchecked((i + 1) as f64 * alpha, 1.0 - alpha, rng);
        }
        let total = sample_nb_jumps(&fam, r + n as f64, tol, DEFAULT_MAX_JUMPS, rng)?.total();
        // Beta draws can round to 0 or 1; those have d = 0 or ∞ in the limit
        let d = if u.iter().any(|&x| x <= 0.0) {
            0.0
        } else if u.iter().any(|&x| x >= 1.0) {
            f64::INFINITY
        } else {
            d_min(&u)?
        };
        values.push(if total < d { factor * total.powf(-(n as f64) * alpha) } else { 0.0 });
    }
    let m = mc_mean(&values)?;
    Ok(ConstantCheck { estimate: m.mean, stderr: m.stderr, target, n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn ctx(r: f64) -> DensityContext {
        DensityContext::new(LevyFamily::Stable { alpha: 0.5, c: 1.0 }, r).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) {
        assert!((a - b).abs() <= rel * b.abs(), "{a} vs {b}");
    }

    #[test]
    fn ascending_factorial_examples() {
        assert_eq!(ascending_factorial(2.7, 0).unwrap(), 1.0);
        close(ascending_factorial(1.0, 4).unwrap(), 24.0, 1e-14);
        close(ascending_factorial(1.5, 3).unwrap(), 13.125, 1e-14);
        // log-gamma path: 1^{[40]} = 40!
        close(ascending_factorial(1.0, 40).unwrap(), 8.159152832478977e47, 1e-10);
    }

    #[test]
    fn theta_examples() {
        let st = LevyFamily::Stable { alpha: 0.3, c: 2.0 };
        close(theta_fn(&st, 1.7).unwrap(), 2.0 * 0.3 * 1.7f64.powf(-0.3), 1e-14);
        close(theta_fn(&LevyFamily::Gamma { theta: 1.5 }, 0.4).unwrap(), 1.5 * (-0.4f64).exp(), 1e-14);
        assert_eq!(theta_fn(&LevyFamily::TruncStable { alpha: 0.5 }, 1.2).unwrap(), 0.0);
    }

    #[test]
    fn g_r_reference_values() {
        // independent high-precision quadrature of the Gamma-mixed Lévy kernel
        for (r, t, want) in [
            (1.0, 1.0, 0.13235165941533595),
            (2.0, 0.5, 0.13845645679115091),
            (1.5, 3.0, 0.051834456178600454),
            (1.0, 0.01, 2.8840814431047251),
            (3.0, 2.0, 0.044856045452860441),
            (2.0, 1.0, 0.1017005434789919),
        ] {
            close(g_r_density(&ctx(r), t).unwrap(), want, 1e-8);
        }
    }

    #[test]
    fn g_r_small_t_behaviour() {
        // g_r(t) ~ t^{r/2 - 1} near 0: blows up for r = 1, tends to 0 for r = 3
        let a = g_r_density(&ctx(1.0), 1e-6).unwrap();
        let b = g_r_density(&ctx(1.0), 1e-8).unwrap();
        close(b / a, 10.0, 1e-2);
        assert!(g_r_density(&ctx(3.0), 1e-8).unwrap() < 1e-3);
    }

    #[test]
    fn g_r_cdf_reference_values() {
        for (r, x, want) in [(1.0, 1.0, 0.41579500090963781), (2.0, 2.0, 0.23352545666630004), (1.0, 0.1, 0.17330080375504088)] {
            close(g_r_cdf(&ctx(r), x).unwrap(), want, 1e-8);
        }
    }

    #[test]
    fn marginal_t1_cdf_reference_values() {
        for (x, want) in [(0.5, 0.4747615166364357), (1.0, 0.58420499909036219), (4.0, 0.78979019596468078)] {
            close(marginal_tn_cdf(&ctx(1.0), 1, x).unwrap(), want, 1e-8);
        }
    }

    #[test]
    fn marginal_cdf_agrees_with_density_quadrature() {
        let c = ctx(1.0);
        for n in [0, 1, 2] {
            let x = 1.3;
            let f = |t: f64| if t <= 0.0 { 0.0 } else { marginal_tn_density(&c, n, t).unwrap() };
            let direct = quad_substituted(f, 0.0, x, Substitution::PowerLeft(4.0), &c.quad).unwrap();
            close(marginal_tn_cdf(&c, n, x).unwrap(), direct, 1e-6);
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        for r in [1.0, 2.0] {
            let c = ctx(r);
            close(integrate_positive_axis(|t| g_r_density(&c, t).unwrap(), 1.0, &c.quad).unwrap(), 1.0, 1e-5);
            let m1 = integrate_positive_axis(|t| marginal_tn_density(&c, 1, t).unwrap(), 1.0, &c.quad).unwrap();
            close(m1, 1.0, 1e-4);
        }
    }

    #[test]
    fn laplace_transform_matches_closed_form() {
        for (r, lam, want) in [(1.0, 1.0, 0.36069130588896484), (2.0, 0.5, 0.19695024121464437)] {
            close(g_r_laplace_transform(&ctx(r), lam).unwrap(), want, 1e-6);
        }
    }

    #[test]
    fn recursion_residual_vanishes() {
        let c = ctx(1.0);
        for t in [0.5, 1.0, 2.0] {
            let rel = g_r_recursion_residual(&c, t).unwrap().abs() / g_r_density(&c, t).unwrap();
            assert!(rel < 1e-6, "t = {t}: {rel}");
        }
    }

    #[test]
    fn joint_density_special_cases() {
        let c = ctx(1.0);
        close(joint_remaining_density(&c, &[1.2]).unwrap(), g_r_density(&c, 1.2).unwrap(), 1e-14);
        let (t0, t1) = (1.2, 0.5);
        let want = g_r_density(&c.shifted(1.0), t1).unwrap() * 0.5 * (t0 - t1).powf(-0.5) / t0;
        close(joint_remaining_density(&c, &[t0, t1]).unwrap(), want, 1e-12);
        assert!(joint_remaining_density(&c, &[0.5, 1.2]).is_err());
        // marginalising t_1 recovers g_r(t_0)
        let f = |t1: f64| if t1 <= 0.0 || t1 >= t0 { 0.0 } else { joint_remaining_density(&c, &[t0, t1]).unwrap() };
        let m = quad_substituted(f, 0.0, 0.6, Substitution::PowerLeft(2.0), &c.quad).unwrap()
            + quad_substituted(f, 0.6, t0, Substitution::PowerRight(2.0), &c.quad).unwrap();
        close(m, g_r_density(&c, t0).unwrap(), 1e-6);
    }

    #[test]
    fn transition_density_normalizes_and_matches_joint_ratio() {
        let c = ctx(1.0);
        let t = 1.0;
        let f = |t1: f64| if t1 <= 0.0 || t1 >= t { 0.0 } else { transition_density(&c, 0, t, t1).unwrap() };
        let m = quad_substituted(f, 0.0, 0.5, Substitution::PowerLeft(2.0), &c.quad).unwrap()
            + quad_substituted(f, 0.5, t, Substitution::PowerRight(2.0), &c.quad).unwrap();
        close(m, 1.0, 1e-6);
        let ratio = joint_remaining_density(&c, &[t, 0.3]).unwrap() / g_r_density(&c, t).unwrap();
        close(transition_density(&c, 0, t, 0.3).unwrap(), ratio, 1e-12);
    }

    #[test]
    fn first_pick_density_values() {
        let c = ctx(1.0);
        close(first_pick_density(&c, 0.3, 1.0).unwrap(), 0.83114080652693626, 1e-8);
        for r in [1.0, 2.0] {
            close(first_pick_mass(&ctx(r), 1.0).unwrap(), 1.0, 1e-6);
        }
        // w = 1 − t1/t turns the transition density into the pick density
        for w in [0.1, 0.5, 0.9] {
            let t = 1.7;
            close(first_pick_density(&c, w, t).unwrap(), t * transition_density(&c, 0, t, t * (1.0 - w)).unwrap(), 1e-12);
        }
    }

    #[test]
    fn unsupported_families_are_reported() {
        for fam in [LevyFamily::Gamma { theta: 1.0 }, LevyFamily::Stable { alpha: 0.3, c: 1.0 }] {
            let c = DensityContext::new(fam, 1.0).unwrap();
            assert!(matches!(g_r_density(&c, 1.0), Err(Error::Unsupported(_))));
        }
    }

    #[test]
    fn moment_constants() {
        close(l_n_constant(0.5, 1.0, 1.0, 1).unwrap(), PI / 2.0, 1e-13);
        assert_eq!(l_n_constant(0.5, 1.0, 1.0, 0).unwrap(), 1.0);
        close(inverse_moment(0.5, 1.0, 1.0, 1).unwrap(), 2.0 / PI, 1e-13);
        close(inverse_moment(0.5, 1.0, 1.0, 2).unwrap(), 1.0 / PI, 1e-13);
        for n in 1..4 {
            close(inverse_moment(0.4, 2.0, 1.5, n).unwrap() * l_n_constant(0.4, 2.0, 1.5, n).unwrap(), 1.0, 1e-14);
        }
    }

    #[test]
    fn d_min_examples() {
        assert_eq!(d_min(&[0.5, 0.5]).unwrap(), 0.5);
        close(d_min(&[0.3]).unwrap(), 0.3 / 0.7, 1e-15);
        assert!(d_min(&[]).is_err());
        assert!(d_min(&[1e-9, 1.0 - 1e-9]).unwrap() > 0.0);
    }

    #[test]
    fn k_n_forms_agree() {
        close(k_n_constant(0.5, 1).unwrap(), 2.0 / PI, 1e-13);
        for alpha in [0.3, 0.5, 0.7] {
            for n in 1..=3 {
                close(k_n_constant(alpha, n).unwrap(), k_n_constant_product_form(alpha, n).unwrap(), 1e-10);
            }
        }
    }

    #[test]
    fn trimmed_constant_identity_small_run() {
        let mut rng = stream(61, 0);
        let chk = trimmed_constant_check(0.5, 1.0, 1, 5_000, 1e-3, &mut rng).unwrap();
        assert!(chk.z_score() < 3.5, "{chk:?}");
    }
}
