//! Zero-temperature Lifshitz theory for two planar multilayer mirrors.
//!
//! The double integral over imaginary frequency `ξ` and transverse wave
//! number `k` is taken in the dimensionless variables `x = 2ξd/c` and
//! `y = 2κ₀d` with `κ₀ = √(k² + ξ²/c²)`, so that
//!
//! ```text
//! E(d) =  ħc/(32π²d³) ∫₀^∞ dx ∫ₓ^∞ dy  y  Σ_p ln(1 − r_a r_b e^{−y})
//! P(d) = −ħc/(32π²d⁴) ∫₀^∞ dx ∫ₓ^∞ dy  y² Σ_p r_a r_b e^{−y}/(1 − r_a r_b e^{−y})
//! ```
//!
//! For ideal mirrors the integrand does not depend on `d` at all, so the
//! grids are equally well conditioned at every separation.

mod spectral;

pub use spectral::{hydrogenation_delta, spectral_cumulative, spectral_quantile, SpectralDecomposition};

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::constants::{C, HBAR_C};
use crate::error::{Error, QuadDiagnostics, Result};
use crate::materials::{DielectricModel, Permittivity};
use crate::quadrature::{integrate_to_infinity, QuadOptions};

/// Smallest and largest separations the engine accepts, m.
pub const MIN_SEPARATION: f64 = 1e-9;
pub const MAX_SEPARATION: f64 = 100e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TE, Polarization::TM];
}

/// A coating of finite thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub model: DielectricModel,
    pub thickness: f64,
}

impl Layer {
    pub fn new(model: DielectricModel, thickness: f64) -> Result<Self> {
        if !(thickness.is_finite() && thickness > 0.0) {
            return Err(Error::invalid(format!("layer thickness must be positive, got {thickness}")));
        }
        model.validate()?;
        Ok(Layer { model, thickness })
    }
}

/// A mirror: semi-infinite substrate plus coatings, the first coating
/// facing the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub substrate: DielectricModel,
    pub coatings: Vec<Layer>,
}

impl LayerStack {
    pub fn bulk(substrate: DielectricModel) -> Self {
        LayerStack {
            substrate,
            coatings: Vec::new(),
        }
    }

    pub fn coated(substrate: DielectricModel, coatings: Vec<Layer>) -> Self {
        LayerStack { substrate, coatings }
    }

    pub fn validate(&self) -> Result<()> {
        self.substrate.validate()?;
        for c in &self.coatings {
            if !(c.thickness.is_finite() && c.thickness > 0.0) {
                return Err(Error::invalid("coating thickness must be positive"));
            }
            c.model.validate()?;
        }
        Ok(())
    }

    fn evaluate(&self, xi: f64) -> Result<PreparedStack> {
        let substrate = self.substrate.eval(xi)?;
        let coatings = self
            .coatings
            .iter()
            .map(|l| Ok((l.model.eval(xi)?, l.thickness)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedStack { substrate, coatings })
    }

    fn is_vacuum(&self) -> bool {
        self.coatings.iter().all(|l| l.model == DielectricModel::vacuum()) && self.substrate == DielectricModel::vacuum()
    }
}

/// Two mirrors facing each other across a vacuum gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapConfig {
    pub mirror_a: LayerStack,
    pub mirror_b: LayerStack,
    separation: f64,
}

impl GapConfig {
    pub fn new(mirror_a: LayerStack, mirror_b: LayerStack, separation: f64) -> Result<Self> {
        check_separation(separation)?;
        mirror_a.validate()?;
        mirror_b.validate()?;
        Ok(GapConfig {
            mirror_a,
            mirror_b,
            separation,
        })
    }

    /// Two bulk mirrors.
    pub fn bulk(a: DielectricModel, b: DielectricModel, separation: f64) -> Result<Self> {
        Self::new(LayerStack::bulk(a), LayerStack::bulk(b), separation)
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        check_separation(separation)?;
        Ok(GapConfig {
            separation,
            ..self.clone()
        })
    }

    pub fn is_ideal(&self) -> bool {
        let pc = |s: &LayerStack| s.coatings.is_empty() && s.substrate.is_perfect_conductor();
        pc(&self.mirror_a) && pc(&self.mirror_b)
    }
}

pub(crate) fn check_separation(d: f64) -> Result<()> {
    if !(MIN_SEPARATION..=MAX_SEPARATION).contains(&d) {
        return Err(Error::domain(format!(
            "separation {d:e} m outside the validity window [1 nm, 100 um]"
        )));
    }
    Ok(())
}

/// Permittivities of one stack at a fixed `ξ`.
#[derive(Debug, Clone)]
pub(crate) struct PreparedStack {
    substrate: Permittivity,
    coatings: Vec<(Permittivity, f64)>,
}

#[inline]
fn kappa(kappa0: f64, q: f64, eps: f64) -> f64 {
    (kappa0 * kappa0 + (eps - 1.0) * q * q).sqrt()
}

/// Reflection at the interface from an upper medium to a lower medium
/// (upper is always finite).
#[inline]
fn interface(pol: Polarization, eps_u: f64, kappa_u: f64, lower: Permittivity, kappa0: f64, q: f64) -> (f64, f64) {
    match lower {
        Permittivity::Infinite => (
            match pol {
                Polarization::TE => -1.0,
                Polarization::TM => 1.0,
            },
            f64::INFINITY,
        ),
        Permittivity::Finite(eps_l) => {
            let kl = kappa(kappa0, q, eps_l);
            let r = match pol {
                Polarization::TE => (kappa_u - kl) / (kappa_u + kl),
                Polarization::TM => (eps_l * kappa_u - eps_u * kl) / (eps_l * kappa_u + eps_u * kl),
            };
            (r, kl)
        }
    }
}

impl PreparedStack {
    /// Reflection amplitude seen from the gap at `(q = ξ/c, κ₀)`.
    pub(crate) fn reflection(&self, pol: Polarization, q: f64, kappa0: f64) -> f64 {
        let n = self.coatings.len();
        // start at the deepest coating / substrate interface
        let mut r_below = if n == 0 {
            return interface(pol, 1.0, kappa0, self.substrate, kappa0, q).0;
        } else {
            match self.coatings[n - 1].0 {
                Permittivity::Infinite => pc_reflection(pol),
                Permittivity::Finite(eps) => {
                    interface(pol, eps, kappa(kappa0, q, eps), self.substrate, kappa0, q).0
                }
            }
        };
        for i in (0..n).rev() {
            let (layer_eps, t) = self.coatings[i];
            let layer_eps = match layer_eps {
                Permittivity::Infinite => {
                    r_below = pc_reflection(pol);
                    continue;
                }
                Permittivity::Finite(e) => e,
            };
            let (eps_u, kappa_u) = if i == 0 {
                (1.0, kappa0)
            } else {
                match self.coatings[i - 1].0 {
                    // the layer above is a perfect conductor; handled on the next step
                    Permittivity::Infinite => {
                        r_below = pc_reflection(pol);
                        continue;
                    }
                    Permittivity::Finite(e) => (e, kappa(kappa0, q, e)),
                }
            };
            let (r_top, kl) = interface(pol, eps_u, kappa_u, Permittivity::Finite(layer_eps), kappa0, q);
            let phase = (-2.0 * kl * t).exp();
            let rb = r_below * phase;
            r_below = (r_top + rb) / (1.0 + r_top * rb);
        }
        r_below
    }
}

fn pc_reflection(pol: Polarization) -> f64 {
    match pol {
        Polarization::TE => -1.0,
        Polarization::TM => 1.0,
    }
}

fn check_xi_k(xi: f64, k: f64) -> Result<()> {
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::domain(format!("xi must be finite and >= 0, got {xi}")));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain(format!("k must be finite and >= 0, got {k}")));
    }
    if xi == 0.0 && k == 0.0 {
        return Err(Error::domain("xi and k cannot both be zero"));
    }
    Ok(())
}

/// Fresnel amplitude of a bulk medium at imaginary frequency.
pub fn fresnel_imag(model: &DielectricModel, xi: f64, k: f64, pol: Polarization) -> Result<f64> {
    check_xi_k(xi, k)?;
    let q = xi / C;
    let kappa0 = (k * k + q * q).sqrt();
    Ok(interface(pol, 1.0, kappa0, model.eval(xi)?, kappa0, q).0)
}

/// Reflection amplitude of a layered mirror, recursing from the substrate up.
pub fn stack_reflection(stack: &LayerStack, xi: f64, k: f64, pol: Polarization) -> Result<f64> {
    check_xi_k(xi, k)?;
    stack.validate()?;
    let q = xi / C;
    let kappa0 = (k * k + q * q).sqrt();
    Ok(stack.evaluate(xi)?.reflection(pol, q, kappa0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifshitzOptions {
    /// Relative tolerance of the outer (frequency) integral. The inner
    /// integral runs ten times tighter.
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Default for LifshitzOptions {
    fn default() -> Self {
        LifshitzOptions {
            rel_tol: 1e-6,
            max_evaluations: crate::quadrature::MAX_EVALUATIONS,
        }
    }
}

impl LifshitzOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        LifshitzOptions {
            rel_tol,
            ..Default::default()
        }
    }

    pub(crate) fn outer(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol,
            abs_tol: 0.0,
            max_evaluations: self.max_evaluations,
        }
    }

    pub(crate) fn inner(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: 0.1 * self.rel_tol,
            abs_tol: 0.0,
            max_evaluations: self.max_evaluations,
        }
    }
}

/// Quadrature diagnostics of one Lifshitz evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct QuadReport {
    pub outer: QuadDiagnostics,
    pub inner_evaluations: usize,
    pub inner_max_depth: usize,
}

impl QuadReport {
    pub fn merge(&mut self, other: &QuadReport) {
        self.outer.merge(&other.outer);
        self.inner_evaluations += other.inner_evaluations;
        self.inner_max_depth = self.inner_max_depth.max(other.inner_max_depth);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifshitzResult {
    pub value: f64,
    pub report: QuadReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    Energy,
    Pressure,
}

/// Inner integral over `y ∈ [x, ∞)` at fixed `x`, for each requested kernel.
pub(crate) fn inner_integral(
    gap: &GapConfig,
    x: f64,
    kernels: &[Kernel],
    opts: &LifshitzOptions,
) -> Result<(Vec<f64>, QuadDiagnostics)> {
    let d = gap.separation;
    let xi = x * C / (2.0 * d);
    let q = xi / C;
    let a = gap.mirror_a.evaluate(xi)?;
    let b = gap.mirror_b.evaluate(xi)?;
    let kernels = kernels.to_vec();
    integrate_to_infinity(
        move |y: f64| {
            let kappa0 = y / (2.0 * d);
            let decay = (-y).exp();
            let mut out = vec![0.0; kernels.len()];
            for pol in Polarization::BOTH {
                let rr = a.reflection(pol, q, kappa0) * b.reflection(pol, q, kappa0) * decay;
                for (o, kern) in out.iter_mut().zip(&kernels) {
                    *o += match kern {
                        Kernel::Energy => y * (-rr).ln_1p(),
                        Kernel::Pressure => y * y * rr / (1.0 - rr),
                    };
                }
            }
            out
        },
        x,
        1.0,
        &opts.inner(),
    )
}

/// Outer integrand `x ↦ ∫ dy …` and the accumulated inner diagnostics.
pub(crate) fn double_integral(
    gap: &GapConfig,
    kernels: &[Kernel],
    opts: &LifshitzOptions,
) -> Result<(Vec<f64>, QuadReport)> {
    let mut report = QuadReport::default();
    let mut failure: Option<Error> = None;
    let n = kernels.len();
    let (v, outer) = integrate_to_infinity(
        |x: f64| {
            if failure.is_some() {
                return vec![0.0; n];
            }
            match inner_integral(gap, x, kernels, opts) {
                Ok((v, d)) => {
                    report.inner_evaluations += d.evaluations;
                    report.inner_max_depth = report.inner_max_depth.max(d.max_depth);
                    v
                }
                Err(e) => {
                    failure = Some(e);
                    vec![0.0; n]
                }
            }
        },
        0.0,
        1.0,
        &opts.outer(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    report.outer = outer;
    Ok((v, report))
}

fn energy_prefactor(d: f64) -> f64 {
    HBAR_C / (32.0 * PI * PI * d.powi(3))
}

fn pressure_prefactor(d: f64) -> f64 {
    -HBAR_C / (32.0 * PI * PI * d.powi(4))
}

/// Casimir energy per unit area, J/m², with diagnostics.
pub fn casimir_energy_area_with(gap: &GapConfig, opts: &LifshitzOptions) -> Result<LifshitzResult> {
    if gap.mirror_a.is_vacuum() || gap.mirror_b.is_vacuum() {
        return Ok(LifshitzResult {
            value: 0.0,
            report: QuadReport::default(),
        });
    }
    let (v, report) = double_integral(gap, &[Kernel::Energy], opts)?;
    Ok(LifshitzResult {
        value: energy_prefactor(gap.separation) * v[0],
        report,
    })
}

/// Casimir pressure, Pa (negative = attractive), with diagnostics.
pub fn casimir_pressure_with(gap: &GapConfig, opts: &LifshitzOptions) -> Result<LifshitzResult> {
    if gap.mirror_a.is_vacuum() || gap.mirror_b.is_vacuum() {
        return Ok(LifshitzResult {
            value: 0.0,
            report: QuadReport::default(),
        });
    }
    let (v, report) = double_integral(gap, &[Kernel::Pressure], opts)?;
    Ok(LifshitzResult {
        value: pressure_prefactor(gap.separation) * v[0],
        report,
    })
}

/// Casimir energy per unit area at default tolerance.
pub fn casimir_energy_area(gap: &GapConfig) -> Result<f64> {
    casimir_energy_area_with(gap, &LifshitzOptions::default()).map(|r| r.value)
}

/// Casimir pressure at default tolerance, from the analytic `−∂E/∂d`.
pub fn casimir_pressure(gap: &GapConfig) -> Result<f64> {
    casimir_pressure_with(gap, &LifshitzOptions::default()).map(|r| r.value)
}

/// Energy and pressure at several separations, evaluated in parallel. The
/// output order matches `separations`.
pub fn sweep(
    gap: &GapConfig,
    separations: &[f64],
    opts: &LifshitzOptions,
) -> Vec<Result<(LifshitzResult, LifshitzResult)>> {
    separations
        .par_iter()
        .map(|&d| {
            let g = gap.with_separation(d)?;
            Ok((casimir_energy_area_with(&g, opts)?, casimir_pressure_with(&g, opts)?))
        })
        .collect()
}

/// Ideal-mirror energy per area `−π²ħc/(720 d³)`.
pub fn ideal_energy_area(d: f64) -> f64 {
    -PI * PI * HBAR_C / (720.0 * d.powi(3))
}

/// Ideal-mirror pressure `−π²ħc/(240 d⁴)`.
pub fn ideal_pressure(d: f64) -> f64 {
    -PI * PI * HBAR_C / (240.0 * d.powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::preset;

    fn gold() -> DielectricModel {
        preset("gold-drude").unwrap().isotropic().unwrap().clone()
    }

    #[test]
    fn vacuum_does_not_reflect() {
        for pol in Polarization::BOTH {
            assert_eq!(fresnel_imag(&DielectricModel::vacuum(), 1e15, 1e7, pol).unwrap(), 0.0);
        }
    }

    #[test]
    fn perfect_conductor_limits() {
        let pc = DielectricModel::PerfectConductor;
        assert_eq!(fresnel_imag(&pc, 1e15, 1e7, Polarization::TM).unwrap(), 1.0);
        assert_eq!(fresnel_imag(&pc, 1e15, 1e7, Polarization::TE).unwrap(), -1.0);
    }

    #[test]
    fn gold_fresnel_regression() {
        // closed form evaluated in 50-digit arithmetic
        let tm = fresnel_imag(&DielectricModel::Drude { omega_p: 1.37e16, gamma: 5.32e13 }, 1e15, 1e7, Polarization::TM).unwrap();
        let te = fresnel_imag(&DielectricModel::Drude { omega_p: 1.37e16, gamma: 5.32e13 }, 1e15, 1e7, Polarization::TE).unwrap();
        assert!((tm - GOLD_TM).abs() < 1e-14, "{tm}");
        assert!((te - GOLD_TE).abs() < 1e-14, "{te}");
    }

    const GOLD_TM: f64 = 0.952_701_006_047_506_01;
    const GOLD_TE: f64 = -0.625_529_059_894_750_66;

    #[test]
    fn domain_errors() {
        assert!(fresnel_imag(&gold(), -1.0, 1.0, Polarization::TE).is_err());
        assert!(fresnel_imag(&gold(), 1.0, -1.0, Polarization::TE).is_err());
        assert!(fresnel_imag(&gold(), 0.0, 1.0, Polarization::TE).is_err());
    }

    #[test]
    fn thin_layer_limits() {
        let sub = DielectricModel::constant(2.0).unwrap();
        let film = preset("palladium-drude").unwrap().isotropic().unwrap().clone();
        let (xi, k) = (1e15, 1e7);
        for pol in Polarization::BOTH {
            let bare = fresnel_imag(&sub, xi, k, pol).unwrap();
            let bulk = fresnel_imag(&film, xi, k, pol).unwrap();
            let thin = stack_reflection(&LayerStack::coated(sub.clone(), vec![Layer::new(film.clone(), 1e-30).unwrap()]), xi, k, pol).unwrap();
            let thick = stack_reflection(&LayerStack::coated(sub.clone(), vec![Layer::new(film.clone(), 1e-3).unwrap()]), xi, k, pol).unwrap();
            assert!((thin - bare).abs() < 1e-9, "{pol:?}: {thin} vs {bare}");
            assert!((thick - bulk).abs() < 1e-9, "{pol:?}: {thick} vs {bulk}");
        }
    }

    #[test]
    fn coating_over_perfect_conductor() {
        let stack = LayerStack::coated(
            DielectricModel::PerfectConductor,
            vec![Layer::new(DielectricModel::vacuum(), 10e-9).unwrap()],
        );
        // a vacuum spacer over an ideal mirror only adds the round-trip phase
        let (xi, k) = (1e15, 1e7);
        let q = xi / C;
        let kappa0 = (k * k + q * q).sqrt();
        let r = stack_reflection(&stack, xi, k, Polarization::TM).unwrap();
        assert!((r - (-2.0 * kappa0 * 10e-9).exp()).abs() < 1e-14);
        let stack = LayerStack::coated(
            DielectricModel::constant(3.0).unwrap(),
            vec![Layer::new(DielectricModel::PerfectConductor, 1e-9).unwrap()],
        );
        assert_eq!(stack_reflection(&stack, xi, k, Polarization::TE).unwrap(), -1.0);
    }

    #[test]
    fn separation_window() {
        let pc = DielectricModel::PerfectConductor;
        assert!(GapConfig::bulk(pc.clone(), pc.clone(), 0.5e-9).is_err());
        assert!(GapConfig::bulk(pc.clone(), pc.clone(), 200e-6).is_err());
        assert!(GapConfig::bulk(pc.clone(), pc, 1e-6).is_ok());
    }

    #[test]
    fn ideal_energy_and_pressure() {
        let pc = DielectricModel::PerfectConductor;
        let gap = GapConfig::bulk(pc.clone(), pc, 1e-6).unwrap();
        let e = casimir_energy_area(&gap).unwrap();
        let p = casimir_pressure(&gap).unwrap();
        assert!((e / ideal_energy_area(1e-6) - 1.0).abs() < 1e-4, "{e}");
        assert!((p / ideal_pressure(1e-6) - 1.0).abs() < 1e-4, "{p}");
        assert!((p.abs() - 1.30e-3).abs() < 0.01e-3);
    }

    #[test]
    fn vacuum_mirror_gives_zero() {
        let gap = GapConfig::bulk(DielectricModel::vacuum(), gold(), 100e-9).unwrap();
        assert_eq!(casimir_energy_area(&gap).unwrap(), 0.0);
        assert_eq!(casimir_pressure(&gap).unwrap(), 0.0);
    }

    #[test]
    fn gold_reduction_factor() {
        // brute-force (ξ, k) quadrature at rel 1e-10 gives 0.5173879 and 0.4365793
        let gap = GapConfig::bulk(gold(), gold(), 100e-9).unwrap();
        let eta_e = casimir_energy_area(&gap).unwrap() / ideal_energy_area(100e-9);
        let eta_p = casimir_pressure(&gap).unwrap() / ideal_pressure(100e-9);
        assert!((eta_e - 0.517_388).abs() < 2e-6, "{eta_e}");
        assert!((eta_p - 0.436_579).abs() < 2e-6, "{eta_p}");
    }
}
