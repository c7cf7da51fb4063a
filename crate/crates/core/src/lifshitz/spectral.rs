//! Frequency-resolved pressure: how much of the force comes from
//! imaginary frequencies below a cutoff.

use std::f64::consts::PI;

use crate::constants::C;
use crate::error::{Error, Result};
use crate::optimize::bisect;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};

use super::{casimir_pressure_with, inner_integral, GapConfig, Kernel, LifshitzOptions};

/// Past this many units of `x` beyond a segment start the integrand has
/// dropped by at least `e^{-80}`.
const DECAY_SPAN: f64 = 80.0;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpectralDecomposition {
    /// Ascending cutoffs ξ, rad/s.
    pub cutoffs: Vec<f64>,
    /// Free-space wavelength `2πc/ξ` of each cutoff, m (infinite at ξ = 0).
    pub wavelengths: Vec<f64>,
    pub cumulative_fraction: Vec<f64>,
    /// Full pressure, Pa.
    pub total_pressure: f64,
}

impl SpectralDecomposition {
    /// Fraction of the pressure from frequencies whose wavelength lies in
    /// `[lambda_min, lambda_max]`, interpolated linearly in `ln ξ` between
    /// cutoffs. Prefer putting the window edges on the cutoff list.
    pub fn window_fraction(&self, lambda_min: f64, lambda_max: f64) -> Result<f64> {
        let hi = self.fraction_at(2.0 * PI * C / lambda_min)?;
        let lo = self.fraction_at(2.0 * PI * C / lambda_max)?;
        Ok(hi - lo)
    }

    fn fraction_at(&self, xi: f64) -> Result<f64> {
        let n = self.cutoffs.len();
        if n == 0 || xi < self.cutoffs[0] || xi > self.cutoffs[n - 1] {
            return Err(Error::invalid(format!("xi = {xi:e} outside the decomposed range")));
        }
        let i = self.cutoffs.partition_point(|&c| c < xi);
        if self.cutoffs[i] == xi {
            return Ok(self.cumulative_fraction[i]);
        }
        let (x0, x1) = (self.cutoffs[i - 1], self.cutoffs[i]);
        let (f0, f1) = (self.cumulative_fraction[i - 1], self.cumulative_fraction[i]);
        let t = if x0 > 0.0 { (xi / x0).ln() / (x1 / x0).ln() } else { xi / x1 };
        Ok(f0 + t * (f1 - f0))
    }
}

/// Outer pressure integrand in `x = 2ξd/c`.
fn pressure_density(gap: &GapConfig, x: f64, opts: &LifshitzOptions, fail: &mut Option<Error>) -> f64 {
    if fail.is_some() {
        return 0.0;
    }
    match inner_integral(gap, x, &[Kernel::Pressure], opts) {
        Ok((v, _)) => v[0],
        Err(e) => {
            *fail = Some(e);
            0.0
        }
    }
}

fn segment(gap: &GapConfig, a: f64, b: f64, opts: &LifshitzOptions, abs_tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let b = b.min(a + DECAY_SPAN);
    let mut fail = None;
    let q = QuadOptions {
        rel_tol: opts.rel_tol,
        abs_tol,
        max_evaluations: opts.max_evaluations,
    };
    let (v, _) = integrate(|x| pressure_density(gap, x, opts, &mut fail), a, b, &q)?;
    fail.map_or(Ok(v), Err)
}

fn tail(gap: &GapConfig, a: f64, opts: &LifshitzOptions) -> Result<f64> {
    let mut fail = None;
    let (v, _) = integrate_to_infinity(|x| pressure_density(gap, x, opts, &mut fail), a, 1.0, &opts.outer())?;
    fail.map_or(Ok(v), Err)
}

/// Cumulative fraction of the pressure contributed by `ξ ≤ cutoff`.
///
/// The outer integral is split at the cutoffs and summed, so the result
/// is non-decreasing whenever the integrand keeps one sign.
pub fn spectral_cumulative(gap: &GapConfig, cutoffs: &[f64], opts: &LifshitzOptions) -> Result<SpectralDecomposition> {
    if cutoffs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::invalid("cutoffs must be finite and non-negative"));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("cutoffs must be strictly ascending"));
    }
    let d = gap.separation();
    let to_x = |xi: f64| 2.0 * xi * d / C;
    let total = tail(gap, 0.0, opts)?;
    let wavelengths = cutoffs
        .iter()
        .map(|&xi| if xi > 0.0 { 2.0 * PI * C / xi } else { f64::INFINITY })
        .collect();
    if total == 0.0 {
        return Ok(SpectralDecomposition {
            cutoffs: cutoffs.to_vec(),
            wavelengths,
            cumulative_fraction: vec![0.0; cutoffs.len()],
            total_pressure: 0.0,
        });
    }
    let abs_tol = 1e-3 * opts.rel_tol * total.abs();
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut partial = Vec::with_capacity(cutoffs.len());
    for &xi in cutoffs {
        let x = to_x(xi);
        acc += segment(gap, prev, x, opts, abs_tol)?;
        partial.push(acc);
        prev = x;
    }
    let rest = tail(gap, prev, opts)?;
    let sum = acc + rest;
    let total_pressure = casimir_pressure_with(gap, opts)?.value;
    Ok(SpectralDecomposition {
        cutoffs: cutoffs.to_vec(),
        wavelengths,
        cumulative_fraction: partial.into_iter().map(|p| p / sum).collect(),
        total_pressure,
    })
}

/// The cutoff ξ below which the given fraction of the pressure accumulates.
pub fn spectral_quantile(gap: &GapConfig, fraction: f64, opts: &LifshitzOptions) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("fraction must lie in (0, 1), got {fraction}")));
    }
    let total = tail(gap, 0.0, opts)?;
    if total == 0.0 {
        return Err(Error::NoSolution("pressure vanishes".into()));
    }
    let abs_tol = 1e-3 * opts.rel_tol * total.abs();
    let mut hi = 1.0;
    while segment(gap, 0.0, hi, opts, abs_tol)? / total < fraction {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::NoSolution("quantile beyond the integration range".into()));
        }
    }
    let x = bisect(
        |x| Ok(segment(gap, 0.0, x, opts, abs_tol)? / total - fraction),
        0.0,
        hi,
        1e-10 * hi,
    )?;
    Ok(x * C / (2.0 * gap.separation()))
}

/// Relative pressure change `|P₁ − P₂|/|P₁|` between two mirror states at
/// the same separation.
pub fn hydrogenation_delta(reflective: &GapConfig, transparent: &GapConfig, opts: &LifshitzOptions) -> Result<f64> {
    if reflective.separation() != transparent.separation() {
        return Err(Error::invalid("both states must share the separation"));
    }
    let p1 = casimir_pressure_with(reflective, opts)?.value;
    let p2 = casimir_pressure_with(transparent, opts)?.value;
    if p1 == 0.0 {
        return Err(Error::domain("reference pressure vanishes"));
    }
    Ok((p1 - p2).abs() / p1.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::DielectricModel;

    fn ideal(d: f64) -> GapConfig {
        GapConfig::bulk(DielectricModel::PerfectConductor, DielectricModel::PerfectConductor, d).unwrap()
    }

    #[test]
    fn empty_and_full() {
        let d = 100e-9;
        let s = spectral_cumulative(&ideal(d), &[0.0, 1e6 * C / d], &LifshitzOptions::default()).unwrap();
        assert_eq!(s.cumulative_fraction[0], 0.0);
        assert!((s.cumulative_fraction[1] - 1.0).abs() < 1e-4);
        assert!(s.wavelengths[0].is_infinite());
    }

    #[test]
    fn unsorted_cutoffs_rejected() {
        assert!(spectral_cumulative(&ideal(1e-7), &[2.0, 1.0], &LifshitzOptions::default()).is_err());
    }

    #[test]
    fn half_point_collapses_with_distance() {
        let opts = LifshitzOptions::default();
        let a = spectral_quantile(&ideal(100e-9), 0.5, &opts).unwrap() * 100e-9 / C;
        let b = spectral_quantile(&ideal(1e-6), 0.5, &opts).unwrap() * 1e-6 / C;
        assert!((a / b - 1.0).abs() < 1e-6, "{a} {b}");
        // root of the closed-form cumulative series, 30 digits
        assert!((a - 0.756_761_807_296_5).abs() < 1e-8, "{a}");
    }

    #[test]
    fn identical_states_do_not_change() {
        let g = ideal(1e-7);
        assert_eq!(hydrogenation_delta(&g, &g, &LifshitzOptions::default()).unwrap(), 0.0);
        assert!(hydrogenation_delta(&g, &ideal(2e-7), &LifshitzOptions::default()).is_err());
    }
}
