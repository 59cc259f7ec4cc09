//! Exponential integral `E1` and its inverse.

use crate::error::{ensure, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
///
/// Power series on `(0, 1]`, continued fraction above 1.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    ensure!(x > 0.0 && !x.is_nan(), "E1 requires x > 0, got {x}");
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(ln_e1_unchecked(x).exp())
}

/// `ln E1(x)`, usable where `E1` itself underflows.
pub(crate) fn ln_e1_unchecked(x: f64) -> f64 {
    if x <= 1.0 {
        e1_series(x).ln()
    } else {
        -x + e1_fraction(x).ln()
    }
}

fn e1_series(x: f64) -> f64 {
    // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        fact *= -x / kf;
        let term = fact / kf;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// `e^{x} E1(x)` by modified Lentz on the standard continued fraction.
fn e1_fraction(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// The unique `x > 0` with `E1(x) = y`.
///
/// A bracket is grown from an asymptotic starting point, then refined by
/// Newton steps on `ln E1(x) - ln y` that fall back to bisection whenever a
/// step would leave the bracket.
pub fn inv_e1(y: f64) -> Result<f64> {
    ensure!(y > 0.0 && y.is_finite(), "inv_e1 requires a finite y > 0, got {y}");
    let target = y.ln();
    let g = |x: f64| ln_e1_unchecked(x) - target;

    // E1(x) ≈ -γ - ln x for small x, ≈ e^{-x}/x for large x
    let mut x = if y > 0.2 {
        (-y - EULER_GAMMA).exp()
    } else {
        let l = -y.ln();
        (l - l.ln()).max(0.5)
    };
    ensure!(x > 0.0, "inv_e1: y = {y} is too large, root underflows");

    let (mut lo, mut hi) = (x, x);
    while g(lo) < 0.0 {
        lo *= 0.5;
        ensure!(lo > 0.0, "inv_e1: y = {y} is too large, root underflows");
    }
    while g(hi) > 0.0 {
        hi *= 2.0;
    }

    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if gx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // d/dx ln E1(x) = -e^{-x} / (x E1(x))
        let slope = -(-x - ln_e1_unchecked(x)).exp() / x;
        let mut next = x - gx / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Convergence {
        what: "inv_e1",
        estimate: x,
        error: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // mpmath reference values
    const E1_TABLE: [(f64, f64); 6] = [
        (1.0, 0.219_383_934_395_520_273_677),
        (0.1, 1.822_923_958_419_390_615_85),
        (10.0, 4.156_968_929_685_324_277_4e-6),
        (0.01, 4.037_929_576_538_113_811_18),
        (2.5, 0.024_914_917_870_269_735_495_6),
        (50.0, 3.783_264_029_550_459_018_7e-24),
    ];

    #[test]
    fn e1_reference_values() {
        for (x, want) in E1_TABLE {
            assert_relative_eq!(exp_integral_e1(x).unwrap(), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn e1_rejects_nonpositive() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-2.0).is_err());
        assert!(inv_e1(0.0).is_err());
    }

    #[test]
    fn e1_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..2000 {
            let v = exp_integral_e1(i as f64 * 0.01).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn inverse_roundtrip() {
        for x in [0.01, 1.0, 10.0, 1e-5, 0.7, 3.3, 40.0] {
            let back = inv_e1(exp_integral_e1(x).unwrap()).unwrap();
            assert_relative_eq!(back, x, max_relative = 1e-8);
        }
        assert_relative_eq!(inv_e1(0.219_383_9).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn inverse_of_large_y_is_near_zero() {
        let x = inv_e1(30.0).unwrap();
        assert!(x > 0.0 && x < 1e-12);
        assert_relative_eq!(exp_integral_e1(x).unwrap(), 30.0, max_relative = 1e-10);
    }
}
