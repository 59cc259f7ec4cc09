//! Ordered jumps of `PPP(vρ)` and of the negative binomial process `BN(r, ρ)`.
//!
//! Jumps are produced largest first from unit-rate arrivals `Γ_1 < Γ_2 < …`
//! through `Δ_i = Λ̄^{-1}(Γ_i / v)`. Simulation stops at the first `N` with
//! `v·m(Δ_N) <= tol · Σ_{i<=N} Δ_i`, where `m` is the small-jump mean: the
//! expected mass still missing, given `Δ_N`, is exactly `v·m(Δ_N)`, and that
//! number is carried as `tail_bound` instead of being spread over the jumps.
//!
//! The generalised gamma process is obtained by thinning the stable process
//! `ρ_S(x) = α/Γ(1-α) x^{-α-1}`, keeping a proposal `x` with probability
//! `e^{-x}`; this avoids a numerical root solve per jump.

use rand::Rng;
use rand_distr::{Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::levy::LevyFamily;
use crate::special_fn::{gamma_unchecked, reg_lower_gamma, sample_gamma};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_JUMPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSequence {
    pub family: LevyFamily,
    /// Intensity multiplier `v` of the Poisson process that was simulated.
    pub scale_v: f64,
    /// `Δ_1 > Δ_2 > … > Δ_N`.
    pub jumps: Vec<f64>,
    pub kept_total: f64,
    /// Expected mass of the jumps below `Δ_N`, `v·m(Δ_N)`.
    pub tail_bound: f64,
    pub last_arrival: f64,
}

impl JumpSequence {
    /// Kept mass plus the certified tail estimate.
    pub fn total(&self) -> f64 {
        self.kept_total + self.tail_bound
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn smallest(&self) -> Option<f64> {
        self.jumps.last().copied()
    }

    /// Continue the same path from `last_arrival` until at least `count`
    /// jumps are present. The arrivals after any time form a fresh Poisson
    /// process, so this is the path that a longer simulation would have
    /// produced.
    pub fn extend_to<R: Rng + ?Sized>(&mut self, count: usize, rng: &mut R) -> Result<()> {
        if self.jumps.len() >= count {
            return Ok(());
        }
        let kernel = Kernel::new(&self.family, self.scale_v);
        let mut gamma = self.last_arrival;
        while self.jumps.len() < count {
            gamma += rng.sample::<f64, _>(Exp1);
            let Some(delta) = kernel.jump(gamma, rng)? else { continue };
            ensure!(delta > 0.0, "jumps underflowed after {} of {count}", self.jumps.len());
            self.jumps.push(delta);
            self.kept_total += delta;
        }
        self.tail_bound = kernel.tail_within(gamma, self.jumps[self.jumps.len() - 1], f64::INFINITY)?.1;
        self.last_arrival = gamma;
        Ok(())
    }
}

/// Jumps of `PPP(vρ)`.
pub fn sample_poisson_jumps<R: Rng + ?Sized>(
    fam: &LevyFamily,
    v: f64,
    tol: f64,
    max_jumps: usize,
    rng: &mut R,
) -> Result<JumpSequence> {
    simulate(fam, v, tol, max_jumps, 0, rng)
}

/// Jumps of `BN(r, ρ) = PPP(Γ_r ρ)` with `Γ_r ~ Gamma(r, 1)`.
pub fn sample_nb_jumps<R: Rng + ?Sized>(
    fam: &LevyFamily,
    r: f64,
    tol: f64,
    max_jumps: usize,
    rng: &mut R,
) -> Result<JumpSequence> {
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    let v = sample_gamma(r, rng)?;
    simulate(fam, v, tol, max_jumps, 0, rng)
}

/// The `count` largest jumps of `PPP(vρ)`, with no tolerance-based stopping.
/// `tail_bound` is `v·m(Δ_count)`, the mean of the mass left out.
pub fn sample_leading_jumps<R: Rng + ?Sized>(fam: &LevyFamily, v: f64, count: usize, rng: &mut R) -> Result<JumpSequence> {
    fam.validate()?;
    ensure!(v > 0.0 && v.is_finite(), "intensity scale v must be positive, got {v}");
    ensure!(count >= 1, "count must be positive");
    let kernel = Kernel::new(fam, v);
    let mut jumps = Vec::with_capacity(count);
    let mut gamma = 0.0;
    let mut kept = 0.0;
    while jumps.len() < count {
        gamma += rng.sample::<f64, _>(Exp1);
        let Some(delta) = kernel.jump(gamma, rng)? else { continue };
        ensure!(delta > 0.0, "jumps underflowed after {} of {count}", jumps.len());
        jumps.push(delta);
        kept += delta;
    }
    let tail = kernel.tail_within(gamma, jumps[count - 1], f64::INFINITY)?.1;
    Ok(finish(fam, v, jumps, kept, tail, gamma))
}

/// `x^e`, with integer exponents (the common α = 1/2 case) done by `powi`.
#[derive(Debug, Clone, Copy)]
struct Power {
    e: f64,
    int: Option<i32>,
}

impl Power {
    fn new(e: f64) -> Self {
        let r = e.round();
        let int = ((e - r).abs() < 1e-12 && r.abs() < 64.0).then_some(r as i32);
        Power { e, int }
    }

    #[inline]
    fn of(&self, x: f64) -> f64 {
        match self.int {
            Some(1) => x,
            Some(k) => x.powi(k),
            None => x.powf(self.e),
        }
    }
}

/// Per-family jump generator: maps an arrival time to a jump (or rejects it)
/// and evaluates `v·m(Δ)` cheaply.
enum Kernel {
    Stable { scale: f64, jump_pow: Power, tail_pow: Power, tail_coef: f64 },
    TruncStable { v: f64, jump_pow: Power, tail_pow: Power, tail_coef: f64 },
    Gamma { vtheta: f64 },
    GenGamma { alpha: f64, v: f64, proposal: Box<Kernel> },
}

impl Kernel {
    fn new(fam: &LevyFamily, v: f64) -> Self {
        match *fam {
            LevyFamily::Stable { alpha, c } => Kernel::Stable {
                scale: c * v,
                jump_pow: Power::new(1.0 / alpha),
                tail_pow: Power::new((1.0 - alpha) / alpha),
                tail_coef: v * c * alpha / (1.0 - alpha),
            },
            LevyFamily::TruncStable { alpha } => Kernel::TruncStable {
                v,
                jump_pow: Power::new(-1.0 / alpha),
                tail_pow: Power::new(-(1.0 - alpha) / alpha),
                tail_coef: v * alpha / (1.0 - alpha),
            },
            LevyFamily::Gamma { theta } => Kernel::Gamma { vtheta: v * theta },
            LevyFamily::GenGamma { alpha } => Kernel::GenGamma {
                alpha,
                v,
                proposal: Box::new(Kernel::new(&LevyFamily::Stable { alpha, c: 1.0 / gamma_unchecked(1.0 - alpha) }, v)),
            },
        }
    }

    /// Jump for arrival `gamma`; `None` for a thinned-out proposal.
    #[inline]
    fn jump<R: Rng + ?Sized>(&self, gamma: f64, rng: &mut R) -> Result<Option<f64>> {
        Ok(match self {
            Kernel::Stable { scale, jump_pow, .. } => Some(jump_pow.of(scale / gamma)),
            Kernel::TruncStable { v, jump_pow, .. } => Some(jump_pow.of(1.0 + gamma / v)),
            Kernel::Gamma { vtheta } => Some(crate::special_fn::inv_e1(gamma / vtheta)?),
            Kernel::GenGamma { proposal, .. } => {
                let x = proposal.jump(gamma, rng)?.expect("stable proposals are never thinned");
                let u: f64 = rng.sample(Open01);
                (u < (-x).exp()).then_some(x)
            }
        })
    }

    /// Is `v·m(Δ) <= threshold`? Also returns `v·m(Δ)` when it was computed.
    #[inline]
    fn tail_within(&self, gamma: f64, delta: f64, threshold: f64) -> Result<(bool, f64)> {
        let tail = match self {
            Kernel::Stable { scale, tail_pow, tail_coef, .. } => tail_coef * tail_pow.of(scale / gamma),
            Kernel::TruncStable { v, tail_pow, tail_coef, .. } => tail_coef * tail_pow.of(1.0 + gamma / v),
            Kernel::Gamma { vtheta } => -vtheta * (-delta).exp_m1(),
            Kernel::GenGamma { alpha, v, proposal } => {
                // e^{-Δ} m_S(Δ) <= m_G(Δ) <= m_S(Δ), with m_S the proposal's mean
                let Kernel::Stable { tail_coef, .. } = proposal.as_ref() else {
                    unreachable!("generalised gamma proposals are stable")
                };
                let upper = tail_coef * delta.powf(1.0 - alpha);
                if (-delta).exp() * upper > threshold {
                    return Ok((false, upper));
                }
                v * alpha * reg_lower_gamma(1.0 - alpha, delta)?
            }
        };
        Ok((tail <= threshold, tail))
    }
}

/// Core simulation loop. The stopping rule compares the tail estimate against
/// the mass of the jumps after the first `skip_leading`, which is what the
/// trimmed construction normalises by.
pub(crate) fn simulate<R: Rng + ?Sized>(
    fam: &LevyFamily,
    v: f64,
    tol: f64,
    max_jumps: usize,
    skip_leading: usize,
    rng: &mut R,
) -> Result<JumpSequence> {
    fam.validate()?;
    ensure!(v > 0.0 && v.is_finite(), "intensity scale v must be positive, got {v}");
    ensure!(tol > 0.0 && tol < 1.0, "tol must lie in (0, 1), got {tol}");
    ensure!(max_jumps > skip_leading, "max_jumps must exceed the number of trimmed jumps");

    let kernel = Kernel::new(fam, v);
    let mut jumps = Vec::with_capacity(1024);
    let mut gamma = 0.0;
    let mut kept = 0.0;
    let mut lead = 0.0;
    loop {
        let e: f64 = rng.sample(Exp1);
        gamma += e;
        let Some(delta) = kernel.jump(gamma, rng)? else { continue };
        if delta <= 0.0 {
            // arrivals beyond the representable range: nothing left to add
            let tail = kernel.tail_within(gamma, f64::MIN_POSITIVE, f64::INFINITY)?.1;
            return Ok(finish(fam, v, jumps, kept, tail, gamma));
        }
        jumps.push(delta);
        kept += delta;
        if jumps.len() <= skip_leading {
            lead += delta;
            continue;
        }
        let (done, tail) = kernel.tail_within(gamma, delta, tol * (kept - lead))?;
        if done {
            return Ok(finish(fam, v, jumps, kept, tail, gamma));
        }
        if jumps.len() >= max_jumps {
            let partial = finish(fam, v, jumps, kept, tail, gamma);
            return Err(Error::Truncation {
                jumps: partial.len(),
                tail_bound: partial.tail_bound,
                partial: Some(Box::new(partial)),
            });
        }
    }
}

fn finish(fam: &LevyFamily, v: f64, jumps: Vec<f64>, kept: f64, tail: f64, gamma: f64) -> JumpSequence {
    JumpSequence { family: *fam, scale_v: v, jumps, kept_total: kept, tail_bound: tail, last_arrival: gamma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn families() -> Vec<LevyFamily> {
        vec![
            LevyFamily::Stable { alpha: 0.5, c: 1.0 },
            LevyFamily::Stable { alpha: 0.35, c: 2.0 },
            LevyFamily::Gamma { theta: 1.0 },
            LevyFamily::TruncStable { alpha: 0.5 },
            LevyFamily::TruncStable { alpha: 0.3 },
            LevyFamily::GenGamma { alpha: 0.5 },
            LevyFamily::GenGamma { alpha: 0.3 },
        ]
    }

    #[test]
    fn jumps_strictly_decreasing_with_certificate() {
        let mut rng = stream(3, 0);
        for fam in families() {
            for _ in 0..20 {
                let js = sample_nb_jumps(&fam, 1.5, 1e-3, DEFAULT_MAX_JUMPS, &mut rng).unwrap();
                assert!(js.jumps.windows(2).all(|w| w[0] > w[1]), "{fam:?}");
                assert!(js.jumps.iter().all(|&d| d > 0.0));
                let sum: f64 = js.jumps.iter().sum();
                assert!((sum - js.kept_total).abs() <= 1e-12 * sum);
                let want_tail = js.scale_v * fam.small_jump_mean(js.smallest().unwrap()).unwrap();
                assert!((js.tail_bound - want_tail).abs() <= 1e-9 * want_tail, "{fam:?}");
                assert!(js.tail_bound <= 1e-3 * js.kept_total * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn trunc_stable_jumps_below_one() {
        let mut rng = stream(4, 0);
        let fam = LevyFamily::TruncStable { alpha: 0.5 };
        for _ in 0..200 {
            let js = sample_nb_jumps(&fam, 2.0, 1e-3, DEFAULT_MAX_JUMPS, &mut rng).unwrap();
            assert!(js.jumps.iter().all(|&d| d < 1.0));
        }
    }

    #[test]
    fn reports_truncation_with_partial_sequence() {
        let mut rng = stream(5, 0);
        let fam = LevyFamily::Stable { alpha: 0.5, c: 1.0 };
        match sample_poisson_jumps(&fam, 1.0, 1e-6, 10, &mut rng) {
            Err(Error::Truncation { jumps, partial: Some(p), .. }) => {
                assert_eq!(jumps, 10);
                assert_eq!(p.len(), 10);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = stream(5, 1);
        let fam = LevyFamily::Stable { alpha: 0.5, c: 1.0 };
        assert!(sample_poisson_jumps(&fam, 1.0, 0.0, 10, &mut rng).is_err());
        assert!(sample_poisson_jumps(&fam, 1.0, 1.0, 10, &mut rng).is_err());
        assert!(sample_poisson_jumps(&fam, -1.0, 0.1, 10, &mut rng).is_err());
        assert!(sample_nb_jumps(&fam, 0.0, 0.1, 10, &mut rng).is_err());
        let bad = LevyFamily::Stable { alpha: 1.2, c: 1.0 };
        assert!(sample_poisson_jumps(&bad, 1.0, 0.1, 10, &mut rng).is_err());
    }

    #[test]
    fn halving_tol_refines_the_same_path() {
        // Same stream, so the coarse run is a prefix of the fine run.
        let fam = LevyFamily::Stable { alpha: 0.5, c: 1.0 };
        for id in 0..50 {
            let coarse = sample_poisson_jumps(&fam, 1.0, 2e-3, DEFAULT_MAX_JUMPS, &mut stream(6, id)).unwrap();
            let fine = sample_poisson_jumps(&fam, 1.0, 1e-3, DEFAULT_MAX_JUMPS, &mut stream(6, id)).unwrap();
            assert!(fine.len() >= coarse.len());
            assert_eq!(&fine.jumps[..coarse.len()], &coarse.jumps[..]);
            assert!((fine.total() - coarse.total()).abs() < coarse.tail_bound);
        }
    }

    #[test]
    fn extending_continues_the_certificate() {
        let mut rng = stream(17, 0);
        for fam in families() {
            let mut js = sample_poisson_jumps(&fam, 1.0, 1e-2, DEFAULT_MAX_JUMPS, &mut rng).unwrap();
            let n = js.len();
            js.extend_to(n + 50, &mut rng).unwrap();
            assert_eq!(js.len(), n + 50);
            assert!(js.jumps.windows(2).all(|w| w[0] > w[1]), "{fam:?}");
            let sum: f64 = js.jumps.iter().sum();
            assert!((sum - js.kept_total).abs() < 1e-9 * sum);
            let m = fam.small_jump_mean(js.smallest().unwrap()).unwrap();
            assert!((js.tail_bound - m).abs() <= 1e-9 * m.max(1e-300), "{fam:?}");
        }
    }
}
