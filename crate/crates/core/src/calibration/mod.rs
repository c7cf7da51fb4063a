//! Distance calibration: synthetic force curves, fitting the piezo
//! offset `d₀`, and how an offset error propagates into the force.
//!
//! The true gap of a sample is `d = d₀ − d_p` where `d_p` is the piezo
//! extension. Forces follow the crate sign convention (attraction < 0).

mod io;
mod theory;

pub use io::{parse_curve_csv, read_curve_csv, write_curve_csv};
pub use theory::{CubicSpline, ForceLaw, IdealSpherePlate, TabulatedForceLaw};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::{bisect, minimize_brent};

/// Smallest gap a synthetic curve may reach, m.
pub const MIN_GAP: f64 = 1e-9;
/// Width of the `d₀` search bracket above the largest extension, m.
pub const FIT_SPAN: f64 = 100e-6;
/// Uncertainty attached to noiseless samples so that χ² stays defined, N.
pub const NOMINAL_SIGMA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceCurveSample {
    pub d_p: f64,
    pub force: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CurveMeta {
    pub geometry: String,
    pub true_d0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceCurve {
    pub samples: Vec<ForceCurveSample>,
    pub meta: CurveMeta,
}

impl ForceCurve {
    pub fn new(samples: Vec<ForceCurveSample>, meta: CurveMeta) -> Result<Self> {
        let c = ForceCurve { samples, meta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.samples {
            if !(s.d_p.is_finite() && s.force.is_finite()) {
                return Err(Error::invalid("curve samples must be finite"));
            }
            if !(s.sigma.is_finite() && s.sigma > 0.0) {
                return Err(Error::invalid(format!("sample sigma must be positive, got {}", s.sigma)));
            }
        }
        if self.samples.windows(2).any(|w| w[1].d_p <= w[0].d_p) {
            return Err(Error::invalid("piezo extensions must be strictly increasing"));
        }
        Ok(())
    }

    pub fn max_extension(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.d_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    /// Standard deviation of the additive force noise, N.
    pub sigma_force: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            sigma_force: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub d0_hat: f64,
    pub sigma_d0: f64,
    pub chi2: f64,
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Fitted force scale when the amplitude was free.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    /// Fit a multiplicative force scale together with `d₀`.
    pub free_amplitude: bool,
}

/// Sample `theory` at gaps `d₀ − d_p` and add seeded Gaussian noise.
pub fn synthesize_curve<L: ForceLaw + ?Sized>(
    theory: &L,
    d0: f64,
    dp_grid: &[f64],
    noise: &NoiseModel,
) -> Result<ForceCurve> {
    if dp_grid.is_empty() {
        return Err(Error::invalid("empty extension grid"));
    }
    if !(noise.sigma_force.is_finite() && noise.sigma_force >= 0.0) {
        return Err(Error::invalid("noise sigma must be >= 0"));
    }
    let max_dp = dp_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if d0 - max_dp < MIN_GAP {
        return Err(Error::invalid(format!(
            "gap d0 - max(d_p) = {:e} m is below 1 nm",
            d0 - max_dp
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, noise.sigma_force).map_err(|e| Error::invalid(e.to_string()))?;
    let sigma = if noise.sigma_force > 0.0 {
        noise.sigma_force
    } else {
        NOMINAL_SIGMA
    };
    let mut samples = Vec::with_capacity(dp_grid.len());
    for &dp in dp_grid {
        let clean = theory.force(d0 - dp)?;
        let force = if noise.sigma_force > 0.0 {
            clean + normal.sample(&mut rng)
        } else {
            clean
        };
        samples.push(ForceCurveSample { d_p: dp, force, sigma });
    }
    ForceCurve::new(
        samples,
        CurveMeta {
            geometry: theory.describe(),
            true_d0: Some(d0),
        },
    )
}

/// χ² at a trial `d₀`, with the best amplitude when it is free.
fn chi2_at<L: ForceLaw + ?Sized>(curve: &ForceCurve, theory: &L, d0: f64, free: bool) -> Result<(f64, f64)> {
    let model = curve
        .samples
        .iter()
        .map(|s| theory.force(d0 - s.d_p))
        .collect::<Result<Vec<f64>>>()?;
    let amp = if free {
        let (mut num, mut den) = (0.0, 0.0);
        for (s, m) in curve.samples.iter().zip(&model) {
            let w = 1.0 / (s.sigma * s.sigma);
            num += w * s.force * m;
            den += w * m * m;
        }
        if den == 0.0 {
            1.0
        } else {
            num / den
        }
    } else {
        1.0
    };
    let chi2 = curve
        .samples
        .iter()
        .zip(&model)
        .map(|(s, m)| ((s.force - amp * m) / s.sigma).powi(2))
        .sum();
    Ok((chi2, amp))
}

/// Fit the piezo offset `d₀` by minimising χ².
///
/// A log-spaced scan over the bracket `[max d_p + 1 nm, max d_p + 100 µm]`
/// locates the basin, Brent's method refines it to 1e-3 nm, and the
/// uncertainty is half the width of the `Δχ² = 1` interval.
pub fn fit_d0<L: ForceLaw + ?Sized>(curve: &ForceCurve, theory: &L, opts: &FitOptions) -> Result<CalibrationResult> {
    curve.validate()?;
    let n = curve.samples.len();
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 samples, got {n}")));
    }
    let base = curve.max_extension();
    let free = opts.free_amplitude;
    // out-of-domain trial offsets are simply bad fits
    let chi = |g: f64| chi2_at(curve, theory, base + g, free).map(|v| v.0).unwrap_or(f64::MAX);

    const SCAN: usize = 600;
    let (g_lo, g_hi) = (MIN_GAP, FIT_SPAN);
    let grid: Vec<f64> = (0..SCAN)
        .map(|i| g_lo * (g_hi / g_lo).powf(i as f64 / (SCAN - 1) as f64))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&g| chi(g)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    if values[best] == f64::MAX {
        return Err(Error::Convergence("theory undefined across the whole d0 bracket".into()));
    }
    let worst = values.iter().copied().filter(|v| *v < f64::MAX).fold(values[best], f64::max);
    if worst - values[best] <= 1e-12 * (values[best] + n as f64) {
        return Err(Error::NonIdentifiable("chi2 does not vary across the d0 bracket".into()));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(SCAN - 1)];
    let m = minimize_brent(|g| Ok(chi(g)), lo, hi, 1e-13, 500)?;
    let g_hat = m.x;
    if best == 0 || best == SCAN - 1 {
        return Err(Error::Convergence(format!(
            "chi2 minimum sits on the edge of the gap bracket [{g_lo:e}, {g_hi:e}] m"
        )));
    }

    // curvature over a small relative step
    let h = 1e-4 * g_hat.max(1e-9);
    let c2 = (chi(g_hat + h) - 2.0 * m.value + chi(g_hat - h)) / (h * h);
    let rel_curv = c2 * g_hat * g_hat / (m.value + n as f64);
    if !(rel_curv.is_finite() && rel_curv > 1e-12) {
        return Err(Error::NonIdentifiable(format!(
            "chi2 is flat around d0 (relative curvature {rel_curv:e})"
        )));
    }

    let target = m.value + 1.0;
    let step0 = (2.0 / c2).sqrt();
    // half-width on one side, and whether Δχ² = 1 was actually reached
    let side = |dir: f64| -> Result<(f64, bool)> {
        let mut step = step0;
        loop {
            let g = g_hat + dir * step;
            if g <= 0.0 || g > g_hi * 10.0 {
                return Ok((step, false));
            }
            if chi(g) >= target {
                let root = bisect(|s| Ok(chi(g_hat + dir * s) - target), 0.0, step, 1e-6 * step)?;
                return Ok((root, true));
            }
            step *= 2.0;
        }
    };
    let (up, up_closed) = side(1.0)?;
    let (down, down_closed) = side(-1.0)?;
    let sigma = 0.5 * (up + down);
    let (chi2, amp) = chi2_at(curve, theory, base + g_hat, free)?;
    let d0_hat = base + g_hat;
    let residuals = curve
        .samples
        .iter()
        .map(|s| Ok(s.force - amp * theory.force(d0_hat - s.d_p)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(CalibrationResult {
        d0_hat,
        sigma_d0: sigma,
        chi2,
        residuals,
        converged: up_closed && down_closed,
        amplitude: free.then_some(amp),
    })
}

/// Fit many independently seeded synthetic curves, in parallel. Results
/// come back in seed order.
pub fn monte_carlo_fits<L: ForceLaw + ?Sized>(
    theory: &L,
    d0: f64,
    dp_grid: &[f64],
    sigma_force: f64,
    seeds: &[u64],
    opts: &FitOptions,
) -> Vec<Result<CalibrationResult>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let curve = synthesize_curve(theory, d0, dp_grid, &NoiseModel { sigma_force, seed })?;
            fit_d0(&curve, theory, opts)
        })
        .collect()
}

/// Relative force change `|F(d) − F(d+δ)|/|F(d)|` from an offset error δ.
pub fn offset_sensitivity<L: ForceLaw + ?Sized>(theory: &L, d: f64, delta: f64) -> Result<f64> {
    if !(d > 0.0 && d + delta > 0.0) {
        return Err(Error::domain(format!("need d > 0 and d + delta > 0, got {d:e}, {delta:e}")));
    }
    let f0 = theory.force(d)?;
    if f0 == 0.0 {
        return Err(Error::domain("force vanishes at d"));
    }
    Ok((f0 - theory.force(d + delta)?).abs() / f0.abs())
}

/// Separation below which an offset error `delta` changes the force by more
/// than `threshold`, solved to 1e-4 nm on `[1 nm, 100 µm]`.
pub fn crossover_distance<L: ForceLaw + ?Sized>(theory: &L, delta: f64, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    let lo = 1e-9;
    let hi = 100e-6 - delta;
    let g = |d: f64| Ok(offset_sensitivity(theory, d, delta)? - threshold);
    if g(lo)? < 0.0 || g(hi)? > 0.0 {
        return Err(Error::NoCrossover { threshold });
    }
    let root = bisect(|u: f64| g(u.exp()), lo.ln(), hi.ln(), 1e-9)?.exp();
    // the sensitivity must stay above threshold everywhere below the root
    for i in 0..64 {
        let d = lo * (root / lo).powf(i as f64 / 64.0);
        if g(d)? <= 0.0 {
            return Err(Error::Convergence(format!(
                "offset sensitivity is not monotone: below threshold at {d:e} m"
            )));
        }
    }
    Ok(root)
}

/// Closed-form crossover for ideal sphere–plate: `d* = δq/(1 − q)` with
/// `q = (1 − threshold)^{1/3}`.
pub fn ideal_crossover_distance(delta: f64, threshold: f64) -> f64 {
    let q = (1.0 - threshold).cbrt();
    delta * q / (1.0 - q)
}

/// Smallest offset δ whose force change equals `force_resolution`,
/// solved to 0.01 Å.
pub fn min_resolvable_offset<L: ForceLaw + ?Sized>(theory: &L, d: f64, force_resolution: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain("d must be positive"));
    }
    if !(force_resolution >= 0.0) {
        return Err(Error::invalid("force resolution must be >= 0"));
    }
    if force_resolution == 0.0 {
        return Ok(0.0);
    }
    let f0 = theory.force(d)?;
    if force_resolution >= f0.abs() {
        return Err(Error::NoSolution(format!(
            "resolution {force_resolution:e} N exceeds the force {:e} N",
            f0.abs()
        )));
    }
    let g = |delta: f64| Ok((f0 - theory.force(d + delta)?).abs() - force_resolution);
    let mut hi = 1e-12_f64.max(1e-3 * d);
    let cap = 100e-6 - d;
    while g(hi)? < 0.0 {
        if hi >= cap {
            return Err(Error::NoSolution("force change never reaches the resolution".into()));
        }
        hi = (2.0 * hi).min(cap);
    }
    bisect(g, 0.0, hi, 1e-13)
}

/// Closed form for ideal sphere–plate: `δ = (d⁻³ − res/C)^{−1/3} − d`
/// with `C = π³ħcR/360`.
pub fn ideal_min_resolvable_offset(radius: f64, d: f64, force_resolution: f64) -> f64 {
    let c = crate::pfa::ideal_sphere_plate_force(radius, 1.0).abs();
    (d.powi(-3) - force_resolution / c).powf(-1.0 / 3.0) - d
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftAnalysis {
    pub best_shift: f64,
    pub rms_before: f64,
    pub rms_after: f64,
    /// `(shift, rms)` over the grid.
    pub scan: Vec<(f64, f64)>,
}

fn relative_residuals<L: ForceLaw + ?Sized>(curve: &ForceCurve, theory: &L, nominal_d0: f64, s: f64) -> Result<Vec<f64>> {
    curve
        .samples
        .iter()
        .map(|p| {
            let m = theory.force(nominal_d0 - p.d_p + s)?;
            Ok((p.force - m) / m)
        })
        .collect()
}

fn mean_square<L: ForceLaw + ?Sized>(curve: &ForceCurve, theory: &L, nominal_d0: f64, s: f64) -> Result<f64> {
    let r = relative_residuals(curve, theory, nominal_d0, s)?;
    Ok(r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64)
}

/// Shift every gap by `s` and find the shift that best reconciles the data
/// with theory, in relative residuals.
///
/// `nominal_d0` is the offset the data were originally reduced with; a
/// positive best shift means the true gaps are larger.
pub fn shift_residual_analysis<L: ForceLaw + ?Sized>(
    curve: &ForceCurve,
    theory: &L,
    nominal_d0: f64,
    shift_grid: &[f64],
) -> Result<ShiftAnalysis> {
    if shift_grid.is_empty() {
        return Err(Error::invalid("empty shift grid"));
    }
    if curve.samples.is_empty() {
        return Err(Error::invalid("empty force curve"));
    }
    let mut grid = shift_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let ms = |s: f64| mean_square(curve, theory, nominal_d0, s);
    let scan = grid
        .iter()
        .map(|&s| Ok((s, ms(s)?.sqrt())))
        .collect::<Result<Vec<_>>>()?;
    let i = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    let best_shift = if grid.len() >= 3 {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        minimize_brent(|s| ms(s).or(Ok(f64::MAX)), lo, hi, 1e-16, 500)?.x
    } else {
        grid[i]
    };
    Ok(ShiftAnalysis {
        best_shift,
        rms_before: ms(0.0)?.sqrt(),
        rms_after: ms(best_shift)?.sqrt(),
        scan,
    })
}
