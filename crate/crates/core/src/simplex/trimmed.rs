use rand::Rng;

use super::{normalize_as, sample_pk, Construction, Order, Provenance, SimplexSample};
use crate::error::{ensure, Error, Result};
use crate::levy::LevyFamily;
use crate::point_process::{sample_nb_jumps, simulate, JumpSequence, DEFAULT_MAX_JUMPS};
use crate::special_fn::sample_beta_unchecked;

/// The α-stable subordinator (`C = 1`) with its `r` largest jumps removed,
/// rescaled by the `r`-th largest: points `Δ_{r+i}/Δ_r`. Conditionally on
/// `Δ_r` this is `PPP(Δ_r^{−α} ρ*_α)`, so the sequence is returned as a
/// truncated-stable jump sequence with `scale_v = Δ_r^{−α}`.
pub fn trimmed_point_process<R: Rng + ?Sized>(
    alpha: f64,
    r: usize,
    tol: f64,
    max_jumps: usize,
    rng: &mut R,
) -> Result<JumpSequence> {
    ensure!(r >= 1, "trimming needs r >= 1");
    let stable = LevyFamily::stable(alpha, 1.0)?;
    let full = simulate(&stable, 1.0, tol, max_jumps.saturating_add(r), r, rng)?;
    ensure!(full.len() > r, "fewer than {} jumps simulated", r + 1);
    let pivot = full.jumps[r - 1];
    let jumps: Vec<f64> = full.jumps[r..].iter().map(|d| d / pivot).collect();
    let kept_total = jumps.iter().sum();
    // Γ_{r+i} − Γ_r are the arrivals of the rescaled process
    let pivot_arrival = pivot.powf(-alpha);
    Ok(JumpSequence {
        family: LevyFamily::TruncStable { alpha },
        scale_v: pivot_arrival,
        jumps,
        kept_total,
        tail_bound: full.tail_bound / pivot,
        last_arrival: full.last_arrival - pivot_arrival,
    })
}

/// `PD_α^(r)` from the trimmed stable subordinator. `r = 0` is `PD(α, 0)`.
pub fn sample_pd_r_trimmed<R: Rng + ?Sized>(alpha: f64, r: usize, tol: f64, rng: &mut R) -> Result<SimplexSample> {
    let prov = Provenance::new(Construction::Trimmed, None, &[("alpha", alpha), ("r", r as f64), ("tol", tol)]);
    if r == 0 {
        let mut s = sample_pk(&LevyFamily::stable(alpha, 1.0)?, 1.0, tol, rng)?;
        s.provenance = prov;
        return Ok(s);
    }
    let js = trimmed_point_process(alpha, r, tol, DEFAULT_MAX_JUMPS, rng)?;
    normalize_as(&js, prov)
}

/// `PD_α^(r)` as `PK^(r)(ρ*_α)`; any real `r > 0`.
pub fn sample_pd_r_nbpp<R: Rng + ?Sized>(alpha: f64, r: f64, tol: f64, rng: &mut R) -> Result<SimplexSample> {
    let fam = LevyFamily::trunc_stable(alpha)?;
    let js = sample_nb_jumps(&fam, r, tol, DEFAULT_MAX_JUMPS, rng)?;
    normalize_as(&js, Provenance::new(Construction::TrimmedNbpp, Some(fam), &[("r", r), ("tol", tol)]))
}

/// `PD_α^(r)` from ratios: `R_i ~ Beta((r+i)α, 1)` independent and
/// `V_n = Π_{i<n} R_i / S` with `S = 1 + R_1 + R_1 R_2 + …`.
///
/// The series stops after term `n` once `P_n (r+n)α/(1−α)`, the conditional
/// mean of the unsummed remainder given the current product `P_n`, falls
/// below `tol` times the running sum. That estimate is added to `S` and
/// reported as the deficit. The series is summed to at least `n_terms`
/// terms and exactly `n_terms` weights are listed; summed mass beyond them
/// also goes into the deficit.
pub fn sample_pd_r_ratio<R: Rng + ?Sized>(
    alpha: f64,
    r: f64,
    n_terms: usize,
    tol: f64,
    rng: &mut R,
) -> Result<SimplexSample> {
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    ensure!(n_terms >= 1, "n_terms must be positive");
    ensure!(tol > 0.0 && tol < 1.0, "tol must lie in (0, 1), got {tol}");
    let remainder_factor = alpha / (1.0 - alpha);
    let mut products = Vec::with_capacity(n_terms.min(4096));
    let mut product = 1.0;
    let mut sum = 0.0;
    for n in 1..=DEFAULT_MAX_JUMPS {
        products.push(product);
        sum += product;
        let remainder = product * (r + n as f64) * remainder_factor;
        if n >= n_terms && remainder <= tol * sum {
            let total = sum + remainder;
            let listed = n_terms;
            let weights: Vec<f64> = products[..listed].iter().map(|p| p / total).collect();
            let listed_mass: f64 = products[..listed].iter().sum();
            return Ok(SimplexSample {
                weights,
                deficit: (total - listed_mass) / total,
                order: Order::Ranked,
                provenance: Provenance::new(
                    Construction::Ratio,
                    None,
                    &[("alpha", alpha), ("r", r), ("tol", tol), ("terms", n as f64)],
                ),
            });
        }
        product *= sample_beta_unchecked((r + n as f64) * alpha, 1.0, rng);
    }
    Err(Error::Truncation { jumps: products.len(), tail_bound: product / sum, partial: None })
}
