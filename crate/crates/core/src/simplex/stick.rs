use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Construction, Order, Provenance, SimplexSample};
use crate::error::{ensure, Result};
use crate::levy::LevyFamily;
use crate::special_fn::{sample_beta_split, sample_gamma};

pub const DEFAULT_STICK_TERMS: usize = 100;

/// Residual-fraction stick breaking: `Ṽ_n = (1 − U_n) Π_{i<n} U_i`.
///
/// Samplers draw the broken-off fraction `1 − U_n` directly, so weights near
/// the end of a long stick do not lose precision to `1 − U` cancellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickBreaking {
    pub fractions: Vec<f64>,
    pub weights: Vec<f64>,
    /// `Π_{i≤n} U_i`, the mass not yet broken off.
    pub residual: f64,
    /// The `Gamma(r, 1)` mixing variable, for the mixed construction.
    pub mixing: Option<f64>,
    pub provenance: Provenance,
}

impl StickBreaking {
    fn run<R, F>(n_terms: usize, provenance: Provenance, mixing: Option<f64>, rng: &mut R, mut next: F) -> Self
    where
        R: Rng + ?Sized,
        F: FnMut(usize, &mut R) -> (f64, f64),
    {
        let mut fractions = Vec::with_capacity(n_terms);
        let mut weights = Vec::with_capacity(n_terms);
        let mut residual = 1.0;
        for i in 1..=n_terms {
            let (broken, kept) = next(i, rng);
            fractions.push(kept);
            weights.push(broken * residual);
            residual *= kept;
            // everything after this point is below the smallest subnormal
            if residual == 0.0 {
                break;
            }
        }
        StickBreaking { fractions, weights, residual, mixing, provenance }
    }

    /// Weights in size-biased order with the residual as deficit.
    pub fn size_biased(&self) -> SimplexSample {
        SimplexSample {
            weights: self.weights.clone(),
            deficit: self.residual,
            order: Order::SizeBiased,
            provenance: self.provenance.clone(),
        }
    }

    /// Weights sorted decreasingly. Tagged ranked only when the residual is
    /// below the smallest kept weight; otherwise [`Order::Sorted`].
    pub fn ranked(&self) -> SimplexSample {
        let mut weights = self.weights.clone();
        weights.sort_unstable_by(|a, b| b.total_cmp(a));
        let certified = weights.last().is_some_and(|&w| self.residual < w);
        SimplexSample {
            weights,
            deficit: self.residual,
            order: if certified { Order::Ranked } else { Order::Sorted },
            provenance: self.provenance.clone(),
        }
    }
}

/// `PD(α, θ)` in size-biased order: `U_i ~ Beta(θ + iα, 1 − α)`.
///
/// `α = 0` with `θ > 0` gives the one-parameter `PD(0, θ)`.
pub fn sample_pd_stick<R: Rng + ?Sized>(alpha: f64, theta: f64, n_terms: usize, rng: &mut R) -> Result<StickBreaking> {
    ensure!((0.0..1.0).contains(&alpha), "alpha must lie in [0, 1), got {alpha}");
    ensure!(theta >= 0.0 && theta.is_finite(), "theta must be nonnegative, got {theta}");
    ensure!(alpha > 0.0 || theta > 0.0, "PD(0, 0) is degenerate");
    ensure!(n_terms >= 1, "n_terms must be positive");
    let prov = Provenance::new(Construction::Stick, None, &[("alpha", alpha), ("theta", theta)]);
    Ok(StickBreaking::run(n_terms, prov, None, rng, |i, rng| {
        sample_beta_split(1.0 - alpha, theta + i as f64 * alpha, rng)
    }))
}

/// `PK^(r)(ρ_θ)` (gamma Lévy density) in size-biased order: one
/// `G ~ Gamma(r, 1)`, then `U_i` i.i.d. `Beta(Gθ, 1)`.
pub fn sample_pk_r_gamma_stick<R: Rng + ?Sized>(theta: f64, r: f64, n_terms: usize, rng: &mut R) -> Result<StickBreaking> {
    ensure!(theta > 0.0 && theta.is_finite(), "theta must be positive, got {theta}");
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    ensure!(n_terms >= 1, "n_terms must be positive");
    let g = sample_gamma(r, rng)?;
    let prov = Provenance::new(Construction::Stick, Some(LevyFamily::Gamma { theta }), &[("r", r)]);
    let shape = g * theta;
    Ok(StickBreaking::run(n_terms, prov, Some(g), rng, |_, rng| sample_beta_split(1.0, shape, rng)))
}

/// Largest weight of `PD(α, θ)`, breaking the stick until the residual can no
/// longer hold anything bigger than the current maximum.
pub fn pd_largest_weight<R: Rng + ?Sized>(alpha: f64, theta: f64, max_terms: usize, rng: &mut R) -> Result<f64> {
    ensure!((0.0..1.0).contains(&alpha), "alpha must lie in [0, 1), got {alpha}");
    ensure!(theta >= 0.0 && theta.is_finite(), "theta must be nonnegative, got {theta}");
    ensure!(alpha > 0.0 || theta > 0.0, "PD(0, 0) is degenerate");
    let mut residual = 1.0;
    let mut best: f64 = 0.0;
    for i in 1..=max_terms {
        let (broken, kept) = sample_beta_split(1.0 - alpha, theta + i as f64 * alpha, rng);
        best = best.max(broken * residual);
        residual *= kept;
        if residual < best {
            return Ok(best);
        }
    }
    Err(crate::Error::Convergence { what: "largest stick weight", estimate: best, error: residual })
}
