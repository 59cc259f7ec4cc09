//! Globally adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Semi-infinite ranges `(a, ∞)` are mapped onto `(0, 1]` with
//! `x = a + (1 - s)/s`, `dx = ds/s²`; the nodes never touch `s = 0`, and an
//! integrand decaying like `x^{-1-δ}` becomes an integrable `s^{δ-1}`
//! endpoint singularity that bisection resolves.
//!
//! Algebraic endpoint singularities `(x - a)^{-β}` are the caller's business:
//! [`Substitution::PowerLeft`] with exponent `p` maps `x = a + (b - a) s^p`,
//! which removes the singularity whenever `p (1 - β) >= 1` (for
//! `β = 1/2`, `p = 2`). [`Substitution::PowerRight`] does the same at `b`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        ensure!(abs_tol > 0.0, "abs_tol must be positive, got {abs_tol}");
        ensure!(rel_tol > 0.0, "rel_tol must be positive, got {rel_tol}");
        ensure!(max_subdivisions >= 1, "max_subdivisions must be at least 1");
        Ok(QuadratureSpec { abs_tol, rel_tol, max_subdivisions })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 1000 }
    }
}

/// Variable change applied on a finite interval before integrating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Substitution {
    Identity,
    /// `x = a + (b - a) s^p`
    PowerLeft(f64),
    /// `x = b - (b - a) s^p`
    PowerRight(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// `∫_a^b f`, where `b` may be `+∞`.
pub fn quad_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    quad_adaptive_detail(f, a, b, spec).map(|o| o.value)
}

pub fn quad_adaptive_detail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadOutcome> {
    ensure!(a.is_finite(), "lower limit must be finite, got {a}");
    ensure!(!b.is_nan() && b >= a, "need a <= b, got a = {a}, b = {b}");
    if a == b {
        return Ok(QuadOutcome { value: 0.0, error: 0.0, intervals: 0 });
    }
    if b.is_infinite() {
        let g = |s: f64| {
            let x = a + (1.0 - s) / s;
            f(x) / (s * s)
        };
        integrate(&g, 0.0, 1.0, spec)
    } else {
        integrate(&f, a, b, spec)
    }
}

/// `∫_a^b f` over a finite interval after the given substitution.
pub fn quad_substituted<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    sub: Substitution,
    spec: &QuadratureSpec,
) -> Result<f64> {
    ensure!(a.is_finite() && b.is_finite() && a <= b, "substituted quadrature needs finite a <= b");
    let w = b - a;
    match sub {
        Substitution::Identity => quad_adaptive(f, a, b, spec),
        Substitution::PowerLeft(p) => {
            ensure!(p >= 1.0, "power substitution exponent must be >= 1");
            let g = |s: f64| f(a + w * s.powf(p)) * p * w * s.powf(p - 1.0);
            integrate(&g, 0.0, 1.0, spec).map(|o| o.value)
        }
        Substitution::PowerRight(p) => {
            ensure!(p >= 1.0, "power substitution exponent must be >= 1");
            let g = |s: f64| f(b - w * s.powf(p)) * p * w * s.powf(p - 1.0);
            integrate(&g, 0.0, 1.0, spec).map(|o| o.value)
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_223,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let y1 = f(center - dx);
        let y2 = f(center + dx);
        f1[j] = y1;
        f2[j] = y2;
        resk += WGK[j] * (y1 + y2);
        resabs += WGK[j] * (y1.abs() + y2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (y1 + y2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadOutcome> {
    let (value, error) = gk21(f, a, b);
    let mut total = value;
    let mut total_err = error;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut frozen_err = 0.0;

    loop {
        if !total.is_finite() {
            return Err(Error::Convergence { what: "quadrature", estimate: total, error: f64::NAN });
        }
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target {
            return Ok(QuadOutcome { value: total, error: total_err, intervals: heap.len() });
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::Convergence { what: "quadrature", estimate: total, error: total_err });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Convergence { what: "quadrature", estimate: total, error: total_err });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * mid.abs().max(f64::MIN_POSITIVE) {
            // cannot split further; its error stays in the total
            frozen_err += worst.error;
            if frozen_err > target {
                return Err(Error::Convergence { what: "quadrature", estimate: total, error: total_err });
            }
            continue;
        }
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
}
