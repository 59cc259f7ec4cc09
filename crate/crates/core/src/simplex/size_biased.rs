use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimplexSample;
use crate::error::{ensure, Result};
use crate::point_process::JumpSequence;

/// Anything with a finite list of atoms and a known total that may exceed the
/// listed mass. The excess is never selected.
pub trait AtomSource {
    fn atoms(&self) -> &[f64];
    fn total_mass(&self) -> f64;
}

impl AtomSource for JumpSequence {
    fn atoms(&self) -> &[f64] {
        &self.jumps
    }
    fn total_mass(&self) -> f64 {
        self.total()
    }
}

impl AtomSource for SimplexSample {
    fn atoms(&self) -> &[f64] {
        &self.weights
    }
    fn total_mass(&self) -> f64 {
        self.mass()
    }
}

/// The first `k` picks of a size-biased permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBiasedDraw {
    pub picks: Vec<f64>,
    /// Position of each pick in the source atom list.
    pub pick_indices: Vec<usize>,
    /// `T_0, T_1, …, T_k`: total mass remaining before each pick and after the last.
    pub remaining_sums: Vec<f64>,
    /// `U_i = T_i / T_{i−1}`.
    pub residual_fractions: Vec<f64>,
}

impl SizeBiasedDraw {
    /// Picks divided by the initial total.
    pub fn normalized_picks(&self) -> Vec<f64> {
        let t0 = self.remaining_sums[0];
        self.picks.iter().map(|p| p / t0).collect()
    }

    /// Stick-breaking form `(1 − U_n) Π_{i<n} U_i`, equal to the normalised picks.
    pub fn stick_weights(&self) -> Vec<f64> {
        let mut prod = 1.0;
        self.residual_fractions
            .iter()
            .map(|u| {
                let w = (1.0 - u) * prod;
                prod *= u;
                w
            })
            .collect()
    }
}

/// Draw `k` atoms without replacement, each with probability proportional to
/// its mass relative to what remains. The mass beyond the listed atoms stays
/// in every remaining sum but is never picked.
pub fn size_biased_permutation<A, R>(source: &A, k: usize, rng: &mut R) -> Result<SizeBiasedDraw>
where
    A: AtomSource + ?Sized,
    R: Rng + ?Sized,
{
    let atoms = source.atoms();
    ensure!(!atoms.is_empty(), "no atoms to pick from");
    let total = source.total_mass();
    ensure!(total > 0.0 && total.is_finite(), "total mass must be positive and finite");
    ensure!(k >= 1 && k <= atoms.len(), "cannot pick {k} of {} atoms", atoms.len());

    let mut pool: Vec<(f64, usize)> = atoms.iter().copied().zip(0..).collect();
    let mut listed: f64 = atoms.iter().sum();
    let mut remaining = total;
    let mut draw = SizeBiasedDraw {
        picks: Vec::with_capacity(k),
        pick_indices: Vec::with_capacity(k),
        remaining_sums: Vec::with_capacity(k + 1),
        residual_fractions: Vec::with_capacity(k),
    };
    draw.remaining_sums.push(remaining);
    for _ in 0..k {
        let target = rng.random::<f64>() * listed;
        let mut acc = 0.0;
        let mut chosen = pool.len() - 1;
        for (j, &(w, _)) in pool.iter().enumerate() {
            acc += w;
            if acc > target {
                chosen = j;
                break;
            }
        }
        let (w, idx) = pool.swap_remove(chosen);
        listed -= w;
        let next = (remaining - w).max(0.0);
        draw.picks.push(w);
        draw.pick_indices.push(idx);
        draw.residual_fractions.push(next / remaining);
        draw.remaining_sums.push(next);
        remaining = next;
    }
    Ok(draw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyFamily;
    use crate::rng::stream;
    use crate::simplex::sample_pk;

    #[test]
    fn single_atom_pick() {
        let s = crate::simplex::normalize(&JumpSequence {
            family: LevyFamily::Gamma { theta: 1.0 },
            scale_v: 1.0,
            jumps: vec![1.0],
            kept_total: 1.0,
            tail_bound: 0.0,
            last_arrival: 1.0,
        })
        .unwrap();
        let d = size_biased_permutation(&s, 1, &mut stream(1, 0)).unwrap();
        assert_eq!(d.picks, vec![1.0]);
        assert_eq!(d.residual_fractions, vec![0.0]);
    }

    #[test]
    fn too_many_picks_is_an_error() {
        let s = crate::simplex::normalize(&JumpSequence {
            family: LevyFamily::Gamma { theta: 1.0 },
            scale_v: 1.0,
            jumps: vec![0.7, 0.3],
            kept_total: 1.0,
            tail_bound: 0.0,
            last_arrival: 1.0,
        })
        .unwrap();
        assert!(size_biased_permutation(&s, 3, &mut stream(1, 1)).is_err());
        assert!(size_biased_permutation(&s, 0, &mut stream(1, 1)).is_err());
    }

    #[test]
    fn first_pick_frequencies() {
        let s = crate::simplex::normalize(&JumpSequence {
            family: LevyFamily::Gamma { theta: 1.0 },
            scale_v: 1.0,
            jumps: vec![0.5, 0.3, 0.2],
            kept_total: 1.0,
            tail_bound: 0.0,
            last_arrival: 1.0,
        })
        .unwrap();
        let mut rng = stream(2, 0);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[size_biased_permutation(&s, 1, &mut rng).unwrap().pick_indices[0]] += 1;
        }
        for (c, p) in counts.iter().zip([0.5, 0.3, 0.2]) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * se, "{counts:?}");
        }
    }

    #[test]
    fn picks_are_a_permutation_and_sticks_agree() {
        let mut rng = stream(3, 0);
        let s = sample_pk(&LevyFamily::Stable { alpha: 0.5, c: 1.0 }, 1.0, 1e-3, &mut rng).unwrap();
        let d = size_biased_permutation(&s, s.len(), &mut rng).unwrap();
        let mut idx = d.pick_indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, (0..s.len()).collect::<Vec<_>>());
        for (a, b) in d.stick_weights().iter().zip(d.normalized_picks()) {
            assert!((a - b).abs() < 1e-9);
        }
        // only the deficit remains unpicked
        assert!((d.remaining_sums.last().unwrap() - s.deficit).abs() < 1e-9);
    }
}
