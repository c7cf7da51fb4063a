//! Adaptive Gauss–Kronrod integration for scalar and vector-valued integrands.
//!
//! The integrator is globally adaptive: the interval with the largest
//! Kronrod-minus-Gauss discrepancy is bisected until the summed error estimate
//! falls below `max(abs_tol, rel_tol * |I|)`. Vector-valued integrands share a
//! single mesh, which keeps differences between components (e.g. energies at
//! neighbouring angles) free of mesh noise.
//!
//! All evaluations happen sequentially in a fixed order, so results are
//! bit-reproducible.

use crate::error::{Error, QuadDiagnostics, Result};

/// Hard cap on integrand evaluations per call.
pub const MAX_EVALUATIONS: usize = 1 << 20;

/// Values that can be integrated: scalars and fixed-length vectors.
pub trait QuadValue: Clone {
    fn zeroed(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    /// Max-norm.
    fn norm(&self) -> f64;
    /// Max-norm of the difference.
    fn distance(&self, other: &Self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zeroed(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Vec<f64> {
    fn zeroed(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += w * b;
        }
    }
    fn norm(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// Tolerances for one integration axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            abs_tol: 0.0,
            max_evaluations: MAX_EVALUATIONS,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions::relative(1e-6)
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, ..., 9).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    depth: usize,
}

fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc.zeroed();
    kronrod.add_scaled(&fc, WGK[10]);
    let mut gauss = fc.zeroed();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod.add_scaled(&f1, WGK[j]);
        kronrod.add_scaled(&f2, WGK[j]);
        if j % 2 == 1 {
            gauss.add_scaled(&f1, WG[j / 2]);
            gauss.add_scaled(&f2, WG[j / 2]);
        }
    }
    let mut k = kronrod.zeroed();
    k.add_scaled(&kronrod, half);
    let mut g = gauss.zeroed();
    g.add_scaled(&gauss, half);
    let err = k.distance(&g);
    (k, err)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(T, QuadDiagnostics)>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    let mut diag = QuadDiagnostics::default();
    if a == b {
        let probe = f(a);
        diag.evaluations = 1;
        return Ok((probe.zeroed(), diag));
    }
    let (value, error) = gk21(&mut f, a, b);
    diag.evaluations = 21;
    let mut panels = vec![Panel {
        a,
        b,
        value,
        error,
        depth: 0,
    }];
    loop {
        let mut total = panels[0].value.zeroed();
        let mut err = 0.0;
        for p in &panels {
            total.add_scaled(&p.value, 1.0);
            err += p.error;
        }
        if !total.is_finite() || !err.is_finite() {
            diag.intervals = panels.len();
            diag.error_estimate = err;
            return Err(Error::NumericalFailure {
                message: "non-finite integrand".into(),
                diagnostics: diag,
            });
        }
        // subnormal error estimates are pure rounding
        let target = opts.abs_tol.max(opts.rel_tol * total.norm()).max(f64::MIN_POSITIVE);
        diag.intervals = panels.len();
        diag.error_estimate = err;
        diag.max_depth = panels.iter().map(|p| p.depth).max().unwrap_or(0);
        if err <= target {
            return Ok((total, diag));
        }
        if diag.evaluations + 42 > opts.max_evaluations {
            return Err(Error::NumericalFailure {
                message: format!("evaluation cap {} reached", opts.max_evaluations),
                diagnostics: diag,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.error > be {
                    (i, p.error)
                } else {
                    (bi, be)
                }
            })
            .0;
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval cannot be split further in floating point
            return Err(Error::NumericalFailure {
                message: "interval underflow during bisection".into(),
                diagnostics: diag,
            });
        }
        let (v1, e1) = gk21(&mut f, p.a, mid);
        let (v2, e2) = gk21(&mut f, mid, p.b);
        diag.evaluations += 42;
        panels.push(Panel {
            a: p.a,
            b: mid,
            value: v1,
            error: e1,
            depth: p.depth + 1,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            error: e2,
            depth: p.depth + 1,
        });
    }
}

/// Integrate `f` over `[a, ∞)` using `x = a + scale·t/(1−t)`.
///
/// `scale` should be the length over which `f` varies near `a`. The
/// transformed integrand is never evaluated at `t = 1`.
pub fn integrate_to_infinity<T, F>(
    mut f: F,
    a: f64,
    scale: f64,
    opts: &QuadOptions,
) -> Result<(T, QuadDiagnostics)>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain("semi-infinite integration needs a positive scale"));
    }
    integrate(
        |t| {
            let s = 1.0 - t;
            let x = a + scale * t / s;
            let v = f(x);
            let mut out = v.zeroed();
            out.add_scaled(&v, scale / (s * s));
            out
        },
        0.0,
        1.0,
        opts,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
