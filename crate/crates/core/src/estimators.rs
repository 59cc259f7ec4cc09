//! Change-of-measure expectations under the trimmed law `PD_α^(r)`.
//!
//! `E f(V^(r)) = E[(E_1^r / r!) f(V)]` with `V ~ PD(α, 0)` and `E_1` the tail
//! mass above the largest stable jump. Simulated paths carry the jumps, so
//! `E_1 = C Δ_1^{−α}` is used exactly; the limit `n V_n^α / V_1^α` is kept as
//! a convergence check.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::levy::LevyFamily;
use crate::point_process::{sample_poisson_jumps, JumpSequence, DEFAULT_MAX_JUMPS};
use crate::simplex::{normalize, sample_pd_r_trimmed, Order, SimplexSample};
use crate::special_fn::ln_gamma;
use crate::stats::mc_mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Fewest weights any sample exposed to the functional.
    pub truncation_m: usize,
}

impl McEstimate {
    /// `|a − b|` in combined standard errors.
    pub fn combined_z(&self, other: &McEstimate) -> f64 {
        (self.mean - other.mean).abs() / (self.stderr.powi(2) + other.stderr.powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum E1Branch {
    /// `Λ̄(Δ_1)` from the simulated largest jump.
    Exact,
    /// `m V_m^α / V_1^α`.
    Limit { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct E1Value {
    pub value: f64,
    pub branch: E1Branch,
}

/// `E_1` for a `PD(α, 0)` sample. With `jumps` (the stable path the sample was
/// normalised from) the exact tail mass at the largest jump is returned;
/// otherwise the limit form at index `m`, which needs `m` ranked weights. The
/// ratio does not involve the normaliser, so the deficit plays no role.
pub fn e1_statistic(sample: &SimplexSample, jumps: Option<&JumpSequence>, alpha: f64, m: usize) -> Result<E1Value> {
    if let Some(js) = jumps {
        return Ok(E1Value { value: e1_exact(js)?, branch: E1Branch::Exact });
    }
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
    ensure!(m >= 1, "m must be positive");
    ensure!(sample.order == Order::Ranked, "the limit form needs ranked weights");
    ensure!(sample.len() >= m, "sample has {} weights, fewer than m = {m}", sample.len());
    let value = m as f64 * (sample.weights[m - 1] / sample.weights[0]).powf(alpha);
    Ok(E1Value { value, branch: E1Branch::Limit { m } })
}

/// `Λ̄(Δ_1) = C Δ_1^{−α}` for a stable jump sequence generated at `v = 1`.
pub fn e1_exact(jumps: &JumpSequence) -> Result<f64> {
    ensure!(matches!(jumps.family, LevyFamily::Stable { .. }), "E_1 is defined for the stable family");
    ensure!(jumps.scale_v == 1.0, "E_1 needs the unit-intensity path");
    let first = *jumps.jumps.first().ok_or_else(|| crate::Error::domain("empty jump sequence"))?;
    jumps.family.tail_mass(first)
}

/// Functional of a weight sequence.
pub type Functional<'a> = &'a dyn Fn(&[f64]) -> f64;

/// `E[(E_1^r / r!) f(V)]` over `n_samples` draws of `PD(α, 0)`.
pub fn change_of_measure_expect<F, R>(
    f: F,
    alpha: f64,
    r: u32,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    Ok(change_of_measure_expect_many(&[&f], alpha, r, n_samples, tol, rng)?.remove(0))
}

/// As [`change_of_measure_expect`] for several functionals on shared draws.
pub fn change_of_measure_expect_many<R: Rng + ?Sized>(
    fs: &[Functional<'_>],
    alpha: f64,
    r: u32,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Vec<McEstimate>> {
    ensure!(r >= 1, "r must be a positive integer");
    ensure!(n_samples >= 2, "need at least two samples");
    ensure!(!fs.is_empty(), "no functionals given");
    let fam = LevyFamily::stable(alpha, 1.0)?;
    let ln_fact = ln_gamma(r as f64 + 1.0)?;
    let mut values = vec![Vec::with_capacity(n_samples); fs.len()];
    let mut shortest = usize::MAX;
    for _ in 0..n_samples {
        let js = sample_poisson_jumps(&fam, 1.0, tol, DEFAULT_MAX_JUMPS, rng)?;
        let sample = normalize(&js)?;
        let weight = (r as f64 * e1_exact(&js)?.ln() - ln_fact).exp();
        shortest = shortest.min(sample.len());
        for (f, vals) in fs.iter().zip(values.iter_mut()) {
            vals.push(weight * f(&sample.weights));
        }
    }
    values.iter().map(|v| summarize(v, shortest)).collect()
}

/// `E f(V^(r))` estimated directly from trimmed stable samples.
pub fn direct_trimmed_expect<F, R>(
    f: F,
    alpha: f64,
    r: u32,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    Ok(direct_trimmed_expect_many(&[&f], alpha, r, n_samples, tol, rng)?.remove(0))
}

pub fn direct_trimmed_expect_many<R: Rng + ?Sized>(
    fs: &[Functional<'_>],
    alpha: f64,
    r: u32,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<Vec<McEstimate>> {
    ensure!(n_samples >= 2, "need at least two samples");
    ensure!(!fs.is_empty(), "no functionals given");
    let mut values = vec![Vec::with_capacity(n_samples); fs.len()];
    let mut shortest = usize::MAX;
    for _ in 0..n_samples {
        let sample = sample_pd_r_trimmed(alpha, r as usize, tol, rng)?;
        shortest = shortest.min(sample.len());
        for (f, vals) in fs.iter().zip(values.iter_mut()) {
            vals.push(f(&sample.weights));
        }
    }
    values.iter().map(|v| summarize(v, shortest)).collect()
}

fn summarize(values: &[f64], shortest: usize) -> Result<McEstimate> {
    let m = mc_mean(values)?;
    Ok(McEstimate { mean: m.mean, stderr: m.stderr, n_samples: m.n, truncation_m: shortest })
}
