//! Run configuration schema. Every length, force and frequency key carries
//! its unit in the name, and unknown keys are rejected.

use std::path::{Path, PathBuf};

use casimirkit::calibration::{ForceLaw, IdealSpherePlate, TabulatedForceLaw};
use casimirkit::cavity::{Baseline, CavitySpec};
use casimirkit::constants::ev_to_rad_per_s;
use casimirkit::lifshitz::{GapConfig, Layer, LayerStack, LifshitzOptions};
use casimirkit::materials::{preset, DielectricModel, TabulatedSpectrum, UniaxialModel};
use casimirkit::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum MaterialSpec {
    Preset(String),
    ConstantEps(f64),
    Drude { omega_p_ev: f64, gamma_ev: f64 },
    Plasma { omega_p_ev: f64 },
    /// `omega_rad_s,eps2` table, relative to the config file.
    TableCsv(PathBuf),
}

impl MaterialSpec {
    pub fn build(&self, base: &Path) -> Result<DielectricModel, Error> {
        match self {
            MaterialSpec::Preset(name) => preset(name)?
                .isotropic()
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("preset {name:?} is uniaxial; use it for torque plates"))),
            MaterialSpec::ConstantEps(e) => DielectricModel::constant(*e),
            MaterialSpec::Drude { omega_p_ev, gamma_ev } => {
                DielectricModel::drude(ev_to_rad_per_s(*omega_p_ev), ev_to_rad_per_s(*gamma_ev))
            }
            MaterialSpec::Plasma { omega_p_ev } => DielectricModel::plasma(ev_to_rad_per_s(*omega_p_ev)),
            MaterialSpec::TableCsv(p) => Ok(DielectricModel::tabulated(TabulatedSpectrum::read_csv(base.join(p))?)),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoatingSpec {
    pub material: MaterialSpec,
    pub thickness_nm: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorSpec {
    pub substrate: MaterialSpec,
    /// Gap side first.
    #[serde(default)]
    pub coatings: Vec<CoatingSpec>,
}

impl MirrorSpec {
    pub fn build(&self, base: &Path) -> Result<LayerStack, Error> {
        let coatings = self
            .coatings
            .iter()
            .map(|c| Layer::new(c.material.build(base)?, c.thickness_nm * 1e-9))
            .collect::<Result<Vec<_>, _>>()?;
        let stack = LayerStack::coated(self.substrate.build(base)?, coatings);
        stack.validate()?;
        Ok(stack)
    }
}

/// Uniformly or logarithmically spaced points, endpoints included.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl Grid {
    pub fn values(&self, scale: f64) -> Result<Vec<f64>, Error> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.points == 0 {
            return Err(Error::InvalidInput("grid needs finite ends and at least one point".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.start * scale]);
        }
        if self.stop <= self.start {
            return Err(Error::InvalidInput("grid stop must exceed start".into()));
        }
        if self.log && self.start <= 0.0 {
            return Err(Error::InvalidInput("log grid needs a positive start".into()));
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                let v = if self.log {
                    self.start * (self.stop / self.start).powf(t)
                } else {
                    self.start + (self.stop - self.start) * t
                };
                v * scale
            })
            .collect())
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Error> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

fn lifshitz_opts(rel_tol: Option<f64>) -> Result<LifshitzOptions, Error> {
    match rel_tol {
        None => Ok(LifshitzOptions::default()),
        Some(t) if t > 0.0 && t < 1e-1 => Ok(LifshitzOptions::with_rel_tol(t)),
        Some(t) => Err(Error::InvalidInput(format!("rel_tol must lie in (0, 0.1), got {t}"))),
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum GeometrySpec {
    Plates,
    Sphere { radius_um: f64 },
    CrossedCylinders { radius_a_um: f64, radius_b_um: f64 },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ForceConfig {
    pub mirror_a: MirrorSpec,
    pub mirror_b: MirrorSpec,
    pub geometry: GeometrySpec,
    pub distances_nm: Grid,
    pub rel_tol: Option<f64>,
    /// `height_m,weight` roughness profile, relative to the config file.
    pub roughness_csv: Option<PathBuf>,
}

impl ForceConfig {
    pub fn gap(&self, base: &Path, d: f64) -> Result<GapConfig, Error> {
        GapConfig::new(self.mirror_a.build(base)?, self.mirror_b.build(base)?, d)
    }

    pub fn opts(&self) -> Result<LifshitzOptions, Error> {
        lifshitz_opts(self.rel_tol)
    }
}

/// Force law used by the calibration commands.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum TheorySpec {
    IdealSpherePlate {
        radius_um: f64,
    },
    LifshitzSpherePlate {
        radius_um: f64,
        mirror_a: MirrorSpec,
        mirror_b: MirrorSpec,
        /// Tabulation range; the gaps probed must stay inside.
        table_nm: Grid,
        rel_tol: Option<f64>,
    },
}

pub enum Theory {
    Ideal(IdealSpherePlate),
    Tabulated(TabulatedForceLaw),
}

impl Theory {
    pub fn law(&self) -> &dyn ForceLaw {
        match self {
            Theory::Ideal(l) => l,
            Theory::Tabulated(l) => l,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            Theory::Ideal(l) => Some(l.radius),
            Theory::Tabulated(_) => None,
        }
    }
}

impl TheorySpec {
    pub fn build(&self, base: &Path) -> Result<Theory, Error> {
        match self {
            TheorySpec::IdealSpherePlate { radius_um } => Ok(Theory::Ideal(IdealSpherePlate::new(
                positive("radius_um", *radius_um)? * 1e-6,
            )?)),
            TheorySpec::LifshitzSpherePlate {
                radius_um,
                mirror_a,
                mirror_b,
                table_nm,
                rel_tol,
            } => {
                let lo = positive("table_nm.start", table_nm.start)? * 1e-9;
                let hi = positive("table_nm.stop", table_nm.stop)? * 1e-9;
                let gap = GapConfig::new(mirror_a.build(base)?, mirror_b.build(base)?, lo)?;
                Ok(Theory::Tabulated(TabulatedForceLaw::build(
                    positive("radius_um", *radius_um)? * 1e-6,
                    &gap,
                    lo,
                    hi,
                    table_nm.points,
                    &lifshitz_opts(*rel_tol)?,
                )?))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub runs: usize,
    pub true_d0_nm: f64,
    pub extensions_nm: Grid,
    pub sigma_pn: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub theory: TheorySpec,
    /// Measured curve, relative to the config file. Exactly one of this and
    /// `monte_carlo` must be given.
    pub curve_csv: Option<PathBuf>,
    pub monte_carlo: Option<MonteCarloSpec>,
    #[serde(default)]
    pub free_amplitude: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    pub theory: TheorySpec,
    pub offset_nm: f64,
    pub distances_nm: Grid,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    pub distance_nm: f64,
    pub force_resolution_pn: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CrossoverConfig {
    pub theory: TheorySpec,
    pub offset_nm: f64,
    /// Relative force change, e.g. 0.01.
    pub threshold: f64,
    pub resolution: Option<ResolutionSpec>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    pub theory: TheorySpec,
    pub curve_csv: PathBuf,
    pub nominal_d0_nm: f64,
    pub shifts_nm: Grid,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    pub mirror_a: MirrorSpec,
    pub mirror_b: MirrorSpec,
    pub separation_nm: f64,
    pub cutoffs_ev: Vec<f64>,
    /// `[min, max]` wavelength window to report.
    pub window_um: Option<[f64; 2]>,
    pub rel_tol: Option<f64>,
}

impl SpectralConfig {
    pub fn opts(&self) -> Result<LifshitzOptions, Error> {
        lifshitz_opts(self.rel_tol)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HsmConfig {
    pub probe: MirrorSpec,
    pub reflective: MirrorSpec,
    pub transparent: MirrorSpec,
    pub distances_nm: Grid,
    pub rel_tol: Option<f64>,
}

impl HsmConfig {
    pub fn opts(&self) -> Result<LifshitzOptions, Error> {
        lifshitz_opts(self.rel_tol)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum PlateSpec {
    Preset(String),
    Axes {
        ordinary: MaterialSpec,
        extraordinary: MaterialSpec,
    },
}

impl PlateSpec {
    pub fn build(&self, base: &Path) -> Result<UniaxialModel, Error> {
        match self {
            PlateSpec::Preset(name) => Ok(preset(name)?.uniaxial()),
            PlateSpec::Axes {
                ordinary,
                extraordinary,
            } => UniaxialModel::new(ordinary.build(base)?, extraordinary.build(base)?),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TorqueConfig {
    pub plate_a: PlateSpec,
    pub plate_b: PlateSpec,
    pub separation_nm: f64,
    pub disk_radius_mm: f64,
    /// Number of uniformly spaced angles on `[0, π)`.
    pub angles: usize,
    pub step_rad: Option<f64>,
    pub rel_tol: Option<f64>,
}

impl TorqueConfig {
    pub fn opts(&self) -> Result<casimirkit::torque::TorqueOptions, Error> {
        let mut o = casimirkit::torque::TorqueOptions {
            lifshitz: lifshitz_opts(self.rel_tol)?,
            ..Default::default()
        };
        if let Some(h) = self.step_rad {
            o.step = positive("step_rad", h)?;
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub a1_um: f64,
    pub a2_um: f64,
    pub a3_um: f64,
}

impl BoxSpec {
    pub fn build(&self) -> Result<CavitySpec, Error> {
        CavitySpec::new(self.a1_um * 1e-6, self.a2_um * 1e-6, self.a3_um * 1e-6)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CrossoverSearch {
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub cavities: Vec<BoxSpec>,
    /// Sign change of the wall force of a square box along `a3/a1`.
    pub crossover_search: Option<CrossoverSearch>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum BaselineSpec {
    ConstantPn(f64),
    Linear { intercept_pn: f64, slope_pn_per_um: f64 },
}

impl BaselineSpec {
    pub fn build(&self) -> Baseline {
        match *self {
            BaselineSpec::ConstantPn(f) => Baseline::Constant { force: f * 1e-12 },
            BaselineSpec::Linear {
                intercept_pn,
                slope_pn_per_um,
            } => Baseline::Linear {
                intercept: intercept_pn * 1e-12,
                slope: slope_pn_per_um * 1e-6,
            },
        }
    }
}

fn default_baseline() -> BaselineSpec {
    BaselineSpec::ConstantPn(0.0)
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PullOutConfig {
    pub a1_um: f64,
    pub a2_um: f64,
    pub depths_um: Grid,
    pub n_cavities: u64,
    #[serde(default = "default_baseline")]
    pub baseline: BaselineSpec,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub theory: TheorySpec,
    pub true_d0_nm: f64,
    pub extensions_nm: Grid,
    pub sigma_pn: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Parse with the failing key path in the message.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("at `{path}`: {}", e.into_inner())
    })
}
