//! Vacuum energy of a perfectly conducting rectangular box, the force on
//! one of its walls, and a model of the pull-out experiment.
//!
//! The regularised energy is obtained twice. The zeta route continues the
//! Epstein sum over modes to `s = −1/2` through its functional equation and
//! evaluates the convergent dual lattice sum with a Chowla–Selberg
//! reduction. The cutoff route damps the mode sum with `e^{−δ²k²}`,
//! removes the volume and edge divergences, and reads off the finite part
//! by a least-squares fit in `δ`. The two must agree to 0.1%.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::HBAR_C;
use crate::error::{Error, Result};
use crate::optimize::bisect;
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};

/// Allowed range of any side ratio.
pub const MAX_ASPECT: f64 = 1e3;
/// Allowed relative disagreement of the two regularisations.
pub const DUAL_TOLERANCE: f64 = 1e-3;

const ZETA_2: f64 = PI * PI / 6.0;
const ZETA_3: f64 = 1.202_056_903_159_594_3;
const ZETA_4: f64 = PI * PI * PI * PI / 90.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavitySpec {
    a1: f64,
    a2: f64,
    a3: f64,
}

impl CavitySpec {
    /// Lateral sides `a1`, `a2` and depth `a3`, m. The lateral pair is
    /// stored with `a1 ≥ a2`.
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("a3", a3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        let (lo, hi) = (a1.min(a2).min(a3), a1.max(a2).max(a3));
        if hi / lo > MAX_ASPECT {
            return Err(Error::invalid(format!(
                "aspect ratio {:.3e} outside [1e-3, 1e3]",
                hi / lo
            )));
        }
        let (a1, a2) = if a1 >= a2 { (a1, a2) } else { (a2, a1) };
        Ok(CavitySpec { a1, a2, a3 })
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn depth(&self) -> f64 {
        self.a3
    }

    pub fn with_depth(&self, a3: f64) -> Result<Self> {
        Self::new(self.a1, self.a2, a3)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.a1, lambda * self.a2, lambda * self.a3)
    }

    fn volume(&self) -> f64 {
        self.a1 * self.a2 * self.a3
    }
}

/// Modified Bessel function `K₁(x)` for `x > 0`, from
/// `K₁(x) = ∫₀^∞ e^{−x cosh t} cosh t dt`.
pub fn bessel_k1(x: f64) -> f64 {
    assert!(x > 0.0);
    let top = (1.0 + 60.0 / x).acosh();
    let opts = QuadOptions::relative(1e-14);
    let (v, _): (f64, _) = integrate(|t: f64| (-x * (t.cosh() - 1.0)).exp() * t.cosh(), 0.0, top, &opts)
        .expect("smooth integrand converges");
    v * (-x).exp()
}

/// `K_{3/2}(x) = √(π/2x) e^{−x} (1 + 1/x)`.
fn bessel_k32(x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x)
}

/// Bessel terms are dropped once their argument exceeds this.
const BESSEL_CUT: f64 = 45.0;

/// `Σ'_{m∈Z²} (c₁²m₁² + c₂²m₂²)^{−3/2}`.
fn epstein2_three_halves(c: [f64; 2]) -> f64 {
    let (b, r) = if c[0] <= c[1] { (c[0], c[1]) } else { (c[1], c[0]) };
    let mut bessel = 0.0;
    // argument 2π p r |m| / b
    let mut m = 1u64;
    while 2.0 * PI * r * m as f64 / b <= BESSEL_CUT {
        let mut p = 1u64;
        loop {
            let arg = 2.0 * PI * p as f64 * r * m as f64 / b;
            if arg > BESSEL_CUT {
                break;
            }
            bessel += (p as f64 / (b * r * m as f64)) * bessel_k1(arg);
            p += 1;
        }
        m += 1;
    }
    // m runs over ±, hence the factor 2
    2.0 * ZETA_3 / b.powi(3) + (2.0 / b) * 2.0 * ZETA_2 / (r * r) + (8.0 * PI / b) * 2.0 * bessel
}

/// `Σ'_{m∈Z³} (Σ aᵢ² mᵢ²)^{−2}` by Chowla–Selberg, Poisson-summing along
/// the smallest side.
pub fn dual_lattice_sum(a: [f64; 3]) -> f64 {
    let mut s = a;
    s.sort_by(f64::total_cmp);
    let (b, c1, c2) = (s[0], s[1], s[2]);
    let mut bessel = 0.0;
    let n1 = (BESSEL_CUT * b / (2.0 * PI * c1)).floor() as i64 + 1;
    let n2 = (BESSEL_CUT * b / (2.0 * PI * c2)).floor() as i64 + 1;
    for m1 in -n1..=n1 {
        for m2 in -n2..=n2 {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            let root = ((c1 * m1 as f64).powi(2) + (c2 * m2 as f64).powi(2)).sqrt();
            let mut p = 1u64;
            loop {
                let arg = 2.0 * PI * p as f64 * root / b;
                if arg > BESSEL_CUT {
                    break;
                }
                bessel += (p as f64 / (b * root)).powf(1.5) * bessel_k32(arg);
                p += 1;
            }
        }
    }
    2.0 * ZETA_4 / b.powi(4) + (PI / (2.0 * b)) * epstein2_three_halves([c1, c2]) + (4.0 * PI * PI / b) * bessel
}

/// Zeta-regularised energy, J.
pub fn cavity_energy_zeta(spec: &CavitySpec) -> f64 {
    let a = spec.sides();
    let z = -spec.volume() / (2.0 * PI.powi(3)) * dual_lattice_sum(a);
    let ends: f64 = a.iter().map(|s| 1.0 / (24.0 * s)).sum();
    0.5 * HBAR_C * PI * (0.25 * z + ends)
}

/// One side's heat-kernel sum `θ(τ) = Σ_{n≥1} e^{−τ(πn/a)²}` split as the
/// asymptotic part `a/(2√(πτ)) − 1/2` plus a remainder, each with its
/// `τ`-derivative.
#[derive(Debug, Clone, Copy)]
struct Theta {
    p: f64,
    dp: f64,
    e: f64,
    de: f64,
}

fn theta(a: f64, tau: f64) -> Theta {
    let alpha = a / (2.0 * (PI * tau).sqrt());
    let p = alpha - 0.5;
    let dp = -0.5 * alpha / tau;
    if PI * PI * tau / (a * a) < 1.0 {
        // Jacobi form: θ = α − 1/2 + 2α Σ_{m≥1} e^{−m²a²/τ}
        let (mut s, mut ds) = (0.0, 0.0);
        let mut m = 1.0_f64;
        loop {
            let w = m * m * a * a / tau;
            if w > 745.0 {
                break;
            }
            let t = (-w).exp();
            s += t;
            ds += t * w / tau;
            m += 1.0;
        }
        Theta {
            p,
            dp,
            e: 2.0 * alpha * s,
            de: 2.0 * (dp * s + alpha * ds),
        }
    } else {
        let (mut s, mut ds) = (0.0, 0.0);
        let mut n = 1.0_f64;
        loop {
            let w = tau * (PI * n / a).powi(2);
            if w > 745.0 {
                break;
            }
            let t = (-w).exp();
            s += t;
            ds -= t * w / tau;
            n += 1.0;
        }
        Theta {
            p,
            dp,
            e: s - p,
            de: ds - dp,
        }
    }
}

/// `−d/dτ [F(τ) − F_asym(τ)]` with `F = 2θ₁θ₂θ₃ + θ₁θ₂ + θ₁θ₃ + θ₂θ₃`
/// the electromagnetic mode counting function, written so that the
/// asymptotic part cancels analytically.
fn remainder_density(a: [f64; 3], tau: f64) -> f64 {
    let t = [theta(a[0], tau), theta(a[1], tau), theta(a[2], tau)];
    let full = |x: &Theta| x.p + x.e;
    let mut d = 0.0;
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        let (tj, tk) = (&t[j], &t[k]);
        // ∂F/∂θᵢ = 2θⱼθₖ + θⱼ + θₖ, at the full and the asymptotic point
        let diff = 2.0 * (tj.p * tk.e + tj.e * tk.p + tj.e * tk.e) + tj.e + tk.e;
        let grad_full = 2.0 * full(tj) * full(tk) + full(tj) + full(tk);
        d += diff * t[i].dp + grad_full * t[i].de;
    }
    -d
}

/// Result of the cutoff route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffEstimate {
    /// Finite part, J.
    pub energy: f64,
    /// Fitted leftover coefficients of `δ⁻⁴`, `δ⁻³`, `δ⁻²` after the
    /// analytic subtraction, relative to the finite part; all should be
    /// near zero.
    pub leftover: [f64; 3],
}

/// Cutoff-regularised energy, J.
pub fn cavity_energy_cutoff(spec: &CavitySpec) -> Result<CutoffEstimate> {
    let a = spec.sides();
    let a_min = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let a_max = a.iter().cloned().fold(0.0, f64::max);
    let opts = QuadOptions::relative(1e-11);
    let r = |delta: f64| -> Result<f64> {
        let f = |u: f64| remainder_density(a, u * u + delta * delta);
        let (v1, _) = integrate(f, 0.0, a_min, &opts)?;
        let (v2, _) = if a_max > a_min {
            integrate(f, a_min, a_max, &opts)?
        } else {
            (0.0, Default::default())
        };
        let (v3, _) = integrate_to_infinity(f, a_max, a_max, &opts)?;
        Ok(2.0 / PI.sqrt() * (v1 + v2 + v3))
    };
    // the remainder is smooth in δ²; a window well below the smallest side
    // keeps the extrapolation short
    const NODES: usize = 24;
    let deltas: Vec<f64> = (0..NODES)
        .map(|i| a_min * (1e-3 + 9e-3 * i as f64 / (NODES - 1) as f64))
        .collect();
    let values = deltas.iter().map(|&d| r(d)).collect::<Result<Vec<f64>>>()?;
    // R(δ) = c₀δ⁻⁴ + c₁δ⁻³ + c₂δ⁻² + E + c₄δ² + c₆δ⁴, in units of a_min
    let basis = |x: f64| [x.powi(-4), x.powi(-3), x.powi(-2), 1.0, x * x, x.powi(4)];
    let rows: Vec<[f64; 6]> = deltas.iter().map(|&d| basis(d / a_min)).collect();
    let coef = least_squares6(&rows, &values)?;
    Ok(CutoffEstimate {
        energy: 0.5 * HBAR_C * coef[3],
        leftover: [coef[0], coef[1], coef[2]].map(|c| c / coef[3].abs()),
    })
}

/// Normal-equation-free least squares through modified Gram–Schmidt.
fn least_squares6(rows: &[[f64; 6]], y: &[f64]) -> Result<[f64; 6]> {
    let n = rows.len();
    let mut q: Vec<Vec<f64>> = (0..6).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut rmat = [[0.0; 6]; 6];
    for j in 0..6 {
        for i in 0..j {
            let dot: f64 = (0..n).map(|k| q[i][k] * q[j][k]).sum();
            rmat[i][j] = dot;
            for k in 0..n {
                q[j][k] -= dot * q[i][k];
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NumericalFailure {
                message: "degenerate fit basis".into(),
                diagnostics: Default::default(),
            });
        }
        rmat[j][j] = norm;
        q[j].iter_mut().for_each(|v| *v /= norm);
    }
    let mut qty = [0.0; 6];
    for j in 0..6 {
        qty[j] = (0..n).map(|k| q[j][k] * y[k]).sum();
    }
    let mut c = [0.0; 6];
    for j in (0..6).rev() {
        let mut s = qty[j];
        for i in j + 1..6 {
            s -= rmat[j][i] * c[i];
        }
        c[j] = s / rmat[j][j];
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityEnergy {
    /// Zeta-route energy, J; this is the reported value.
    pub energy: f64,
    pub cutoff: f64,
    pub relative_difference: f64,
}

/// Regularised vacuum energy with the cutoff route as a cross-check.
pub fn cavity_vacuum_energy(spec: &CavitySpec) -> Result<CavityEnergy> {
    let zeta = cavity_energy_zeta(spec);
    let cutoff = cavity_energy_cutoff(spec)?.energy;
    let rel = (zeta - cutoff).abs() / zeta.abs().max(cutoff.abs());
    if !(rel <= DUAL_TOLERANCE) {
        return Err(Error::RegularizationInconsistency { zeta, cutoff });
    }
    Ok(CavityEnergy {
        energy: zeta,
        cutoff,
        relative_difference: rel,
    })
}

/// Force on the depth wall, `−∂E/∂a₃`, N. Positive pushes the wall
/// outward.
pub fn wall_force(spec: &CavitySpec) -> Result<f64> {
    let a3 = spec.a3;
    let h = 1e-4 * a3;
    let e = |d: f64| -> Result<f64> {
        let s = CavitySpec {
            a3: d,
            ..*spec
        };
        Ok(cavity_energy_zeta(&s))
    };
    let d1 = (e(a3 + h)? - e(a3 - h)?) / (2.0 * h);
    let d2 = (e(a3 + 2.0 * h)? - e(a3 - 2.0 * h)?) / (4.0 * h);
    let deriv = (4.0 * d1 - d2) / 3.0;
    let scale = e(a3)?.abs().max(HBAR_C / a3);
    let noise = 1e3 * f64::EPSILON * scale / h;
    let discrepancy = (d1 - d2).abs() / 3.0;
    if discrepancy > noise && discrepancy > 1e-3 * deriv.abs() {
        return Err(Error::UnreliableDerivative {
            estimate: -deriv,
            noise_floor: discrepancy,
        });
    }
    Ok(-deriv)
}

/// Ratio `a₃/a₁` (square cross-section) where the wall force changes sign,
/// searched on `[lo, hi]`.
pub fn wall_force_sign_crossover(lo: f64, hi: f64) -> Result<f64> {
    let f = |r: f64| wall_force(&CavitySpec::new(1e-6, 1e-6, r * 1e-6)?);
    bisect(f, lo, hi, 1e-10)
}

/// Depth-dependent background force in the pull-out measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Baseline {
    Constant { force: f64 },
    Linear { intercept: f64, slope: f64 },
}

impl Baseline {
    pub fn at(&self, depth: f64) -> f64 {
        match *self {
            Baseline::Constant { force } => force,
            Baseline::Linear { intercept, slope } => intercept + slope * depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullOutScenario {
    pub cavity: CavitySpec,
    pub depths: Vec<f64>,
    pub n_cavities: u64,
    pub baseline: Baseline,
}

impl PullOutScenario {
    pub fn new(cavity: CavitySpec, depths: Vec<f64>, n_cavities: u64, baseline: Baseline) -> Result<Self> {
        if depths.is_empty() || depths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("depths must be non-empty and strictly ascending"));
        }
        for &d in &depths {
            cavity.with_depth(d)?;
            cavity.with_depth(2.0 * d)?;
        }
        Ok(PullOutScenario {
            cavity,
            depths,
            n_cavities,
            baseline,
        })
    }
}

/// Casimir part of the pull-out force of one cavity at depth `h`: the
/// closing-plate force of the closed box minus that of a box of twice the
/// depth, which stands in for the open cavity.
pub fn pull_out_casimir_term(cavity: &CavitySpec, depth: f64) -> Result<f64> {
    let closed = wall_force(&cavity.with_depth(depth)?)?;
    let open = wall_force(&cavity.with_depth(2.0 * depth)?)?;
    Ok(-(closed - open))
}

/// `(depth, baseline + n·Casimir term)` for every depth, in depth order.
pub fn pull_out_curve(scenario: &PullOutScenario) -> Result<Vec<(f64, f64)>> {
    scenario
        .depths
        .par_iter()
        .map(|&h| {
            let term = if scenario.n_cavities == 0 {
                0.0
            } else {
                pull_out_casimir_term(&scenario.cavity, h)?
            };
            Ok((h, scenario.baseline.at(h) + scenario.n_cavities as f64 * term))
        })
        .collect()
}

/// Pointwise `F_a − F_b` over a shared depth grid.
pub fn difference_analysis(curve_a: &[(f64, f64)], curve_b: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if curve_a.len() != curve_b.len() || curve_a.iter().zip(curve_b).any(|(a, b)| a.0 != b.0) {
        return Err(Error::invalid("curves must share the same depth grid"));
    }
    Ok(curve_a.iter().zip(curve_b).map(|(a, b)| (a.0, a.1 - b.1)).collect())
}
