//! Rank–frequency profiles: mean weight at each rank, on log scales.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::levy::LevyFamily;
use crate::point_process::{sample_poisson_jumps, JumpSequence, DEFAULT_MAX_JUMPS};
use crate::simplex::trimmed_point_process;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfRow {
    pub rank: usize,
    pub log_rank: f64,
    /// `ln E W_k` under `PD(α, 0)`.
    pub log_mean_pd: f64,
    /// `ln E V_k^(r)` under the trimmed law.
    pub log_mean_trimmed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfProfile {
    pub alpha: f64,
    pub r: usize,
    pub n_samples: usize,
    pub rows: Vec<ZipfRow>,
}

impl ZipfProfile {
    /// Least-squares slope of `log_mean_pd` on `log_rank` over ranks `from..=to`.
    pub fn slope_pd(&self, from: usize, to: usize) -> Result<f64> {
        self.slope(from, to, |row| row.log_mean_pd)
    }

    pub fn slope_trimmed(&self, from: usize, to: usize) -> Result<f64> {
        self.slope(from, to, |row| row.log_mean_trimmed)
    }

    fn slope(&self, from: usize, to: usize, y: impl Fn(&ZipfRow) -> f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> =
            self.rows.iter().filter(|row| row.rank >= from && row.rank <= to).map(|row| (row.log_rank, y(row))).collect();
        ensure!(pts.len() >= 2, "need at least two ranks in {from}..={to}");
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(sxy / sxx)
    }
}

fn accumulate<R: Rng + ?Sized>(mut js: JumpSequence, n_ranks: usize, acc: &mut [f64], rng: &mut R) -> Result<()> {
    js.extend_to(n_ranks, rng)?;
    let total = js.total();
    for (a, d) in acc.iter_mut().zip(&js.jumps) {
        *a += d / total;
    }
    Ok(())
}

/// Mean ranked weights of `PD(α, 0)` and of `PD_α^(r)` (trimmed stable) for
/// ranks `1..=n_ranks`, each averaged over `n_samples` independent draws.
pub fn rank_profile<R: Rng + ?Sized>(
    alpha: f64,
    r: usize,
    n_ranks: usize,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ZipfProfile> {
    ensure!(n_ranks >= 1, "n_ranks must be positive");
    ensure!(n_samples >= 1, "n_samples must be positive");
    let stable = LevyFamily::stable(alpha, 1.0)?;
    let mut pd = vec![0.0; n_ranks];
    let mut trimmed = vec![0.0; n_ranks];
    for _ in 0..n_samples {
        accumulate(sample_poisson_jumps(&stable, 1.0, tol, DEFAULT_MAX_JUMPS, rng)?, n_ranks, &mut pd, rng)?;
        let js = if r == 0 {
            sample_poisson_jumps(&stable, 1.0, tol, DEFAULT_MAX_JUMPS, rng)?
        } else {
            trimmed_point_process(alpha, r, tol, DEFAULT_MAX_JUMPS, rng)?
        };
        accumulate(js, n_ranks, &mut trimmed, rng)?;
    }
    let n = n_samples as f64;
    let rows = (0..n_ranks)
        .map(|k| ZipfRow {
            rank: k + 1,
            log_rank: ((k + 1) as f64).ln(),
            log_mean_pd: (pd[k] / n).ln(),
            log_mean_trimmed: (trimmed[k] / n).ln(),
        })
        .collect();
    Ok(ZipfProfile { alpha, r, n_samples, rows })
}
