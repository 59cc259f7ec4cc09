//! Simplex-valued samplers and size-biased permutation.

mod size_biased;
mod stick;
mod trimmed;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::levy::LevyFamily;
use crate::point_process::{sample_nb_jumps, sample_poisson_jumps, JumpSequence, DEFAULT_MAX_JUMPS};

pub use size_biased::{size_biased_permutation, AtomSource, SizeBiasedDraw};
pub use stick::{pd_largest_weight, sample_pd_stick, sample_pk_r_gamma_stick, StickBreaking, DEFAULT_STICK_TERMS};
pub use trimmed::{sample_pd_r_nbpp, sample_pd_r_ratio, sample_pd_r_trimmed, trimmed_point_process};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    /// Nonincreasing, and no unlisted atom can outrank a listed one.
    Ranked,
    SizeBiased,
    /// Sorted, but the deficit exceeds the smallest listed weight, so atoms
    /// hidden in the deficit could belong among the listed ones.
    Sorted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Jump,
    Subordinator,
    Stick,
    Trimmed,
    TrimmedNbpp,
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: Construction,
    pub family: Option<LevyFamily>,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub(crate) fn new(construction: Construction, family: Option<LevyFamily>, params: &[(&str, f64)]) -> Self {
        Provenance {
            construction,
            family,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed: None,
        }
    }
}

/// A truncated point of the infinite simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSample {
    pub weights: Vec<f64>,
    /// Mass not represented by `weights`.
    pub deficit: f64,
    pub order: Order,
    pub provenance: Provenance,
}

impl SimplexSample {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.provenance.seed = Some(seed);
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn largest(&self) -> Option<f64> {
        match self.order {
            Order::SizeBiased => self.weights.iter().copied().reduce(f64::max),
            _ => self.weights.first().copied(),
        }
    }

    /// `Σ weights + deficit`.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.deficit
    }

    /// Keep the first `k` weights and fold the rest into the deficit.
    pub fn truncated(mut self, k: usize) -> Self {
        if k < self.weights.len() {
            let dropped: f64 = self.weights[k..].iter().sum();
            self.weights.truncate(k);
            self.deficit += dropped;
        }
        self
    }

    /// Checks the structural invariants: weights in `(0, 1]`, ranked order
    /// when tagged so, and total mass one within `1e-9`.
    pub fn check(&self) -> Result<()> {
        ensure!(self.weights.iter().all(|&w| w > 0.0 && w <= 1.0), "weights must lie in (0, 1]");
        ensure!(self.deficit >= 0.0, "deficit must be nonnegative");
        if matches!(self.order, Order::Ranked | Order::Sorted) {
            ensure!(self.weights.windows(2).all(|w| w[0] >= w[1]), "ranked weights must be nonincreasing");
        }
        let mass = self.mass();
        ensure!((mass - 1.0).abs() <= 1e-9, "weights plus deficit sum to {mass}, not 1");
        Ok(())
    }
}

/// Normalise a jump sequence by its kept total plus tail bound.
pub fn normalize(jumps: &JumpSequence) -> Result<SimplexSample> {
    normalize_as(jumps, Provenance::new(Construction::Jump, Some(jumps.family), &[("v", jumps.scale_v)]))
}

pub(crate) fn normalize_as(jumps: &JumpSequence, provenance: Provenance) -> Result<SimplexSample> {
    ensure!(!jumps.is_empty(), "cannot normalise an empty jump sequence");
    ensure!(jumps.kept_total > 0.0, "kept total must be positive");
    let total = jumps.total();
    Ok(SimplexSample {
        weights: jumps.jumps.iter().map(|d| d / total).collect(),
        deficit: jumps.tail_bound / total,
        order: Order::Ranked,
        provenance,
    })
}

/// `PK(vρ)`: ranked, normalised jumps of `PPP(vρ)`.
pub fn sample_pk<R: Rng + ?Sized>(fam: &LevyFamily, v: f64, tol: f64, rng: &mut R) -> Result<SimplexSample> {
    let js = sample_poisson_jumps(fam, v, tol, DEFAULT_MAX_JUMPS, rng)?;
    normalize_as(&js, Provenance::new(Construction::Jump, Some(*fam), &[("v", v), ("tol", tol)]))
}

/// `PK^(r)(ρ)`: ranked, normalised jumps of `BN(r, ρ)`.
pub fn sample_pk_r<R: Rng + ?Sized>(fam: &LevyFamily, r: f64, tol: f64, rng: &mut R) -> Result<SimplexSample> {
    let js = sample_nb_jumps(fam, r, tol, DEFAULT_MAX_JUMPS, rng)?;
    normalize_as(&js, Provenance::new(Construction::Jump, Some(*fam), &[("r", r), ("tol", tol)]))
}

/// `PK^(r)(ρ)` through gamma subordination: the jumps of a ρ-subordinator up to
/// the random time `σ_r`, where `σ` is a standard gamma subordinator whose
/// value at `r` is itself assembled from its (simulated) jumps.
pub fn sample_pk_r_subordinated<R: Rng + ?Sized>(
    fam: &LevyFamily,
    r: f64,
    tol: f64,
    rng: &mut R,
) -> Result<SimplexSample> {
    ensure!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    let clock = sample_poisson_jumps(&LevyFamily::Gamma { theta: 1.0 }, r, tol, DEFAULT_MAX_JUMPS, rng)?;
    let time = clock.total();
    let js = sample_poisson_jumps(fam, time, tol, DEFAULT_MAX_JUMPS, rng)?;
    normalize_as(
        &js,
        Provenance::new(Construction::Subordinator, Some(*fam), &[("r", r), ("sigma_r", time), ("tol", tol)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn seq(jumps: Vec<f64>, tail: f64) -> JumpSequence {
        JumpSequence {
            family: LevyFamily::Stable { alpha: 0.5, c: 1.0 },
            scale_v: 1.0,
            kept_total: jumps.iter().sum(),
            jumps,
            tail_bound: tail,
            last_arrival: 1.0,
        }
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&seq(vec![2.0], 0.0)).unwrap();
        assert_eq!(s.weights, vec![1.0]);
        let s = normalize(&seq(vec![3.0, 1.0], 0.0)).unwrap();
        assert_eq!(s.weights, vec![0.75, 0.25]);
        assert_eq!(s.order, Order::Ranked);
        assert!(normalize(&seq(vec![], 0.0)).is_err());
    }

    #[test]
    fn deficit_respects_stopping_rule() {
        let tol = 1e-3;
        let mut rng = stream(21, 0);
        for fam in [
            LevyFamily::Stable { alpha: 0.5, c: 1.0 },
            LevyFamily::Gamma { theta: 2.0 },
            LevyFamily::GenGamma { alpha: 0.4 },
            LevyFamily::TruncStable { alpha: 0.6 },
        ] {
            for _ in 0..50 {
                let s = sample_pk_r(&fam, 1.3, tol, &mut rng).unwrap();
                assert!(s.deficit < tol / (1.0 - tol));
                s.check().unwrap();
            }
        }
    }

    #[test]
    fn truncated_moves_mass_into_deficit() {
        let mut rng = stream(22, 0);
        let s = sample_pk(&LevyFamily::Stable { alpha: 0.5, c: 1.0 }, 1.0, 1e-3, &mut rng).unwrap();
        let t = s.clone().truncated(5);
        assert_eq!(t.len(), 5);
        assert_eq!(&t.weights[..], &s.weights[..5]);
        assert!((t.mass() - 1.0).abs() < 1e-12);
        t.check().unwrap();
    }

    #[test]
    fn subordinated_sampler_is_valid() {
        let mut rng = stream(23, 0);
        for _ in 0..50 {
            let s = sample_pk_r_subordinated(&LevyFamily::Gamma { theta: 1.0 }, 2.0, 1e-4, &mut rng).unwrap();
            s.check().unwrap();
            assert!(s.provenance.params["sigma_r"] > 0.0);
        }
    }
}
