//! Gamma and beta variates.
//!
//! Gamma draws go through `rand_distr` (Marsaglia–Tsang, with the
//! `U^{1/a}` boost for shapes below one). Beta draws with a unit parameter
//! use the closed-form inverse CDF, the rest a ratio of two gamma draws.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01};

use crate::error::{ensure, Result};

/// Gamma(shape, 1) variate.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    ensure!(shape > 0.0 && shape.is_finite(), "gamma shape must be positive, got {shape}");
    let dist = Gamma::new(shape, 1.0).map_err(|e| crate::Error::domain(e.to_string()))?;
    Ok(dist.sample(rng))
}

/// Beta(a, b) variate.
pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    ensure!(a > 0.0 && a.is_finite(), "beta parameter a must be positive, got {a}");
    ensure!(b > 0.0 && b.is_finite(), "beta parameter b must be positive, got {b}");
    Ok(sample_beta_unchecked(a, b, rng))
}

pub(crate) fn sample_beta_unchecked<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    sample_beta_split(a, b, rng).0
}

/// A Beta(a, b) variate `x` together with `1 − x`, each computed without
/// cancellation so that neither rounds to zero while the other is below one.
pub(crate) fn sample_beta_split<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> (f64, f64) {
    if b == 1.0 {
        let l = Distribution::<f64>::sample(&Open01, rng).ln() / a;
        (l.exp(), -l.exp_m1())
    } else if a == 1.0 {
        let l = Distribution::<f64>::sample(&Open01, rng).ln() / b;
        (-l.exp_m1(), l.exp())
    } else {
        let x = Gamma::new(a, 1.0).expect("validated beta parameters").sample(rng);
        let y = Gamma::new(b, 1.0).expect("validated beta parameters").sample(rng);
        let s = x + y;
        (x / s, y / s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    /// Mean and variance both within 4 standard errors of the analytic values.
    /// The variance SE uses the analytic fourth central moment.
    fn check(xs: &[f64], mean: f64, var: f64, mu4: f64) {
        let n = xs.len() as f64;
        let (m, v) = moments(xs);
        let se_m = (var / n).sqrt();
        let se_v = ((mu4 - var * var) / n).sqrt();
        assert!((m - mean).abs() < 4.0 * se_m, "mean {m} vs {mean} (se {se_m})");
        assert!((v - var).abs() < 4.0 * se_v, "var {v} vs {var} (se {se_v})");
    }

    #[test]
    fn gamma_moments_on_grid() {
        let mut rng = stream(11, 0);
        for shape in [0.1, 0.3, 0.5, 1.0, 2.0, 7.5] {
            let xs: Vec<f64> = (0..100_000).map(|_| sample_gamma(shape, &mut rng).unwrap()).collect();
            // central moments of Gamma(k,1): var k, mu4 = 3k^2 + 6k
            check(&xs, shape, shape, 3.0 * shape * shape + 6.0 * shape);
        }
    }

    #[test]
    fn beta_moments_on_grid() {
        let mut rng = stream(12, 0);
        for (a, b) in [(0.5, 0.5), (1.0, 1.0), (0.2, 1.0), (1.0, 0.3), (2.5, 0.5), (0.5, 3.0), (4.0, 4.0)] {
            let xs: Vec<f64> = (0..100_000).map(|_| sample_beta(a, b, &mut rng).unwrap()).collect();
            let s = a + b;
            let mean = a / s;
            let var = a * b / (s * s * (s + 1.0));
            let mu4 = 3.0 * a * b * (a * b * (s - 2.0) + 2.0 * s * s) / (s.powi(4) * (s + 1.0) * (s + 2.0) * (s + 3.0));
            check(&xs, mean, var, mu4);
            assert!(xs.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = stream(1, 1);
        assert!(sample_gamma(0.0, &mut rng).is_err());
        assert!(sample_beta(1.0, -1.0, &mut rng).is_err());
        assert!(sample_beta(f64::NAN, 1.0, &mut rng).is_err());
    }

    #[test]
    fn reproducible_given_stream() {
        let a: Vec<f64> = {
            let mut r = stream(5, 9);
            (0..10).map(|_| sample_gamma(0.4, &mut r).unwrap()).collect()
        };
        let b: Vec<f64> = {
            let mut r = stream(5, 9);
            (0..10).map(|_| sample_gamma(0.4, &mut r).unwrap()).collect()
        };
        assert_eq!(a, b);
    }
}
