//! Goodness-of-fit tests and Monte Carlo summaries used by the verification suites.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::special_fn::reg_upper_gamma;

/// Significance level used throughout the verification suites.
pub const SIGNIFICANCE: f64 = 1e-3;

const MIN_KS_SAMPLE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov tail `P(K > λ)` with Stephens' small-sample
/// correction `λ = (√n + 0.12 + 0.11/√n) D`.
pub fn kolmogorov_p(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(a: &[f64]) -> Result<Vec<f64>> {
    ensure!(a.iter().all(|x| !x.is_nan()), "sample contains NaN");
    let mut v = a.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    ensure!(
        a.len() >= MIN_KS_SAMPLE && b.len() >= MIN_KS_SAMPLE,
        "KS needs at least {MIN_KS_SAMPLE} points per sample, got {} and {}",
        a.len(),
        b.len()
    );
    let wa = vec![1.0; a.len()];
    let wb = vec![1.0; b.len()];
    ks_two_sample_weighted(a, &wa, b, &wb)
}

/// Two-sample KS between weighted empirical distributions. The p-value uses
/// Kish effective sizes `(Σw)²/Σw²` in place of the sample sizes.
pub fn ks_two_sample_weighted(a: &[f64], wa: &[f64], b: &[f64], wb: &[f64]) -> Result<KsResult> {
    ensure!(a.len() == wa.len() && b.len() == wb.len(), "weights must match samples");
    ensure!(!a.is_empty() && !b.is_empty(), "samples must be nonempty");
    ensure!(
        wa.iter().chain(wb).all(|&w| w >= 0.0 && w.is_finite()),
        "weights must be finite and nonnegative"
    );
    type Prepared = (Vec<(f64, f64)>, f64, f64);
    let prep = |x: &[f64], w: &[f64]| -> Result<Prepared> {
        ensure!(x.iter().all(|v| !v.is_nan()), "sample contains NaN");
        let mut p: Vec<(f64, f64)> = x.iter().copied().zip(w.iter().copied()).collect();
        p.sort_unstable_by(|l, r| l.0.total_cmp(&r.0));
        let s: f64 = w.iter().sum();
        let s2: f64 = w.iter().map(|v| v * v).sum();
        ensure!(s > 0.0, "total weight must be positive");
        Ok((p, s, s * s / s2))
    };
    let (pa, sa, na) = prep(a, wa)?;
    let (pb, sb, nb) = prep(b, wb)?;
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    while i < pa.len() && j < pb.len() {
        let x = pa[i].0.min(pb[j].0);
        while i < pa.len() && pa[i].0 == x {
            fa += pa[i].1;
            i += 1;
        }
        while j < pb.len() && pb[j].0 == x {
            fb += pb[j].1;
            j += 1;
        }
        d = d.max((fa / sa - fb / sb).abs());
    }
    let n_eff = na * nb / (na + nb);
    Ok(KsResult { statistic: d, p_value: kolmogorov_p(d, n_eff) })
}

/// One-sample KS against a distribution function.
pub fn ks_one_sample<F: Fn(f64) -> f64>(a: &[f64], cdf: F) -> Result<KsResult> {
    let xs = sorted(a)?;
    let values: Vec<f64> = xs.iter().map(|&x| cdf(x)).collect();
    ks_one_sample_sorted(&xs, &values)
}

/// One-sample KS given a sorted sample and the CDF evaluated at each point.
/// The CDF values must be nondecreasing and lie in `[0, 1]`.
pub fn ks_one_sample_sorted(xs: &[f64], cdf_values: &[f64]) -> Result<KsResult> {
    ensure!(xs.len() >= MIN_KS_SAMPLE, "KS needs at least {MIN_KS_SAMPLE} points, got {}", xs.len());
    ensure!(xs.len() == cdf_values.len(), "one CDF value per sample point required");
    ensure!(xs.windows(2).all(|w| w[0] <= w[1]), "sample must be sorted");
    const SLACK: f64 = 1e-9;
    ensure!(
        cdf_values.iter().all(|&c| (-SLACK..=1.0 + SLACK).contains(&c)),
        "CDF values must lie in [0, 1]"
    );
    ensure!(cdf_values.windows(2).all(|w| w[1] >= w[0] - SLACK), "CDF is not monotone on the sample range");
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &c) in cdf_values.iter().enumerate() {
        let c = c.clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - c).max(c - i as f64 / n);
    }
    Ok(KsResult { statistic: d, p_value: kolmogorov_p(d, n) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanEstimate {
    /// `|mean − target|` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if self.stderr == 0.0 {
            if d == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            d / self.stderr
        }
    }
}

/// Sample mean and standard error of the mean.
pub fn mc_mean(values: &[f64]) -> Result<MeanEstimate> {
    ensure!(values.len() >= 2, "need at least two values");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MeanEstimate { mean, stderr: (var / n).sqrt(), n: values.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of counts against cell probabilities (which must
/// sum to one). Degrees of freedom are `cells − 1`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    ensure!(observed.len() == probs.len() && observed.len() >= 2, "need matching counts and probabilities, at least two cells");
    ensure!(probs.iter().all(|&p| p > 0.0), "cell probabilities must be positive");
    ensure!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9, "cell probabilities must sum to 1");
    let n: u64 = observed.iter().sum();
    ensure!(n > 0, "no observations");
    let n = n as f64;
    let statistic: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() - 1;
    let p_value = reg_upper_gamma(dof as f64 / 2.0, statistic / 2.0)?;
    Ok(ChiSquare { statistic, dof, p_value })
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub test_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub passed: bool,
    pub n_samples: usize,
    pub seed: u64,
    pub notes: String,
}

impl VerificationReport {
    /// Pass iff `p_value > level`; the level is stored as the threshold.
    pub fn from_p_value(name: &str, statistic: f64, p_value: f64, level: f64, n_samples: usize, seed: u64) -> Self {
        VerificationReport {
            test_name: name.to_string(),
            statistic,
            threshold: level,
            p_value: Some(p_value),
            passed: p_value > level,
            n_samples,
            seed,
            notes: String::new(),
        }
    }

    /// Pass iff `statistic ≤ threshold` (NaN fails).
    pub fn from_bound(name: &str, statistic: f64, threshold: f64, n_samples: usize, seed: u64) -> Self {
        VerificationReport {
            test_name: name.to_string(),
            statistic,
            threshold,
            p_value: None,
            passed: statistic <= threshold,
            n_samples,
            seed,
            notes: String::new(),
        }
    }

    pub fn ks(name: &str, ks: KsResult, n_samples: usize, seed: u64) -> Self {
        Self::from_p_value(name, ks.statistic, ks.p_value, SIGNIFICANCE, n_samples, seed)
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        match self.p_value {
            Some(p) => write!(
                f,
                "{verdict} {}: stat={:.6e} p={:.4e} (level {}) n={} seed={}",
                self.test_name, self.statistic, p, self.threshold, self.n_samples, self.seed
            )?,
            None => write!(
                f,
                "{verdict} {}: stat={:.6e} threshold={:.3e} n={} seed={}",
                self.test_name, self.statistic, self.threshold, self.n_samples, self.seed
            )?,
        }
        if !self.notes.is_empty() {
            write!(f, " [{}]", self.notes)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn uniforms(n: usize, shift: f64, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 0);
        (0..n).map(|_| rng.random::<f64>() + shift).collect()
    }

    #[test]
    fn identical_samples_have_zero_distance() {
        let a = uniforms(500, 0.0, 1);
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn shifted_samples_are_separated() {
        let r = ks_two_sample(&uniforms(10_000, 0.0, 2), &uniforms(10_000, 0.5, 3)).unwrap();
        assert!(r.p_value < 1e-6);
        assert!((r.statistic - 0.5).abs() < 0.03);
    }

    #[test]
    fn two_sample_null_calibration() {
        let mut rejections = 0;
        for rep in 0..200 {
            let r = ks_two_sample(&uniforms(10_000, 0.0, 1000 + rep), &uniforms(10_000, 0.0, 5000 + rep)).unwrap();
            if r.p_value < SIGNIFICANCE {
                rejections += 1;
            }
        }
        assert!(rejections as f64 / 200.0 < 0.005 + 1e-12, "{rejections} rejections");
    }

    #[test]
    fn one_sample_exponential_calibration() {
        let mut rng = stream(7, 0);
        let mut ps = Vec::new();
        let mut rejections = 0;
        for _ in 0..200 {
            let xs: Vec<f64> = (0..1000).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let r = ks_one_sample(&xs, |x| 1.0 - (-x).exp()).unwrap();
            ps.push(r.p_value);
            if r.p_value < 0.05 {
                rejections += 1;
            }
        }
        // about 10 expected at the 5% level; 3 binomial SE is about 9
        assert!(rejections <= 20, "{rejections}");
        let mean_p = ps.iter().sum::<f64>() / ps.len() as f64;
        assert!((mean_p - 0.5).abs() < 0.07, "{mean_p}");
    }

    #[test]
    fn one_sample_rejects_non_monotone_cdf() {
        let xs = uniforms(200, 0.0, 8);
        assert!(ks_one_sample(&xs, |x| (10.0 * x).sin().abs()).is_err());
        assert!(ks_one_sample(&xs[..50], |x| x).is_err());
    }

    #[test]
    fn kolmogorov_tail_values() {
        // P(K > 1) = 0.26999967167735456, P(K > 1.3581) ≈ 0.05
        let big: f64 = 1e12;
        assert!((kolmogorov_p(1.0 / big.sqrt(), big) - 0.26999967167735456).abs() < 1e-6);
        assert!((kolmogorov_p(1.3581 / big.sqrt(), big) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn weighted_ks_reduces_to_unweighted() {
        let a = uniforms(300, 0.0, 9);
        let b = uniforms(400, 0.1, 10);
        let u = ks_two_sample(&a, &b).unwrap();
        let w = ks_two_sample_weighted(&a, &vec![2.0; 300], &b, &vec![0.5; 400]).unwrap();
        assert!((u.statistic - w.statistic).abs() < 1e-12);
        assert!((u.p_value - w.p_value).abs() < 1e-12);
    }

    #[test]
    fn mean_examples() {
        let c = mc_mean(&[3.0; 10]).unwrap();
        assert_eq!((c.mean, c.stderr), (3.0, 0.0));
        let alt: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(mc_mean(&alt).unwrap().mean, 0.0);
        let u = mc_mean(&uniforms(100_000, 0.0, 11)).unwrap();
        assert!(u.z_score(0.5) < 3.0);
        assert!(mc_mean(&[1.0]).is_err());
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_gof(&[50, 50], &[0.5, 0.5]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        // statistic 4 on one degree of freedom: p = erfc(√2) = 0.04550026389635842
        let r = chi_square_gof(&[60, 40], &[0.5, 0.5]).unwrap();
        assert!((r.p_value - 0.04550026389635842).abs() < 1e-10);
    }

    #[test]
    fn report_verdicts() {
        assert!(VerificationReport::from_p_value("x", 0.1, 0.5, SIGNIFICANCE, 10, 1).passed);
        assert!(!VerificationReport::from_p_value("x", 0.1, 1e-4, SIGNIFICANCE, 10, 1).passed);
        assert!(VerificationReport::from_bound("x", 1e-5, 1e-4, 0, 1).passed);
        assert!(!VerificationReport::from_bound("x", f64::NAN, 1e-4, 0, 1).passed);
        let line = VerificationReport::from_bound("x", 1.0, 2.0, 0, 1).to_string();
        assert!(line.starts_with("PASS x"));
    }
}
