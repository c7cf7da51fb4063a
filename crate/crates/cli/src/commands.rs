//! One function per subcommand. Each returns its payload and a few headline
//! numbers for the run report.

use std::fmt::Write as _;
use std::path::Path;

use casimirkit::calibration::{
    crossover_distance, fit_d0, ideal_crossover_distance, ideal_min_resolvable_offset, min_resolvable_offset,
    monte_carlo_fits, offset_sensitivity, read_curve_csv, shift_residual_analysis, synthesize_curve,
    write_curve_csv, FitOptions, NoiseModel,
};
use casimirkit::cavity::{
    cavity_vacuum_energy, pull_out_curve, wall_force, wall_force_sign_crossover, CavitySpec, PullOutScenario,
};
use casimirkit::constants::ev_to_rad_per_s;
use casimirkit::lifshitz::{casimir_pressure_with, spectral_cumulative, sweep, GapConfig};
use casimirkit::pfa::{
    crossed_cylinder_force_with, roughness_average, sphere_plate_force_with, CrossedCylinders, RoughnessProfile,
    SphericalProbe,
};
use casimirkit::torque::{torque_profile, TorqueSetup};
use casimirkit::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::*;

pub enum Payload {
    Csv(String),
    Json(Value),
}

pub struct Output {
    pub payload: Payload,
    pub results: Value,
}

fn csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serialises")
}

pub fn force(cfg: &ForceConfig, base: &Path) -> Result<Output> {
    let ds = cfg.distances_nm.values(1e-9)?;
    let opts = cfg.opts()?;
    let gap = cfg.gap(base, ds[0])?;
    let roughness = match &cfg.roughness_csv {
        Some(p) => Some(RoughnessProfile::read_csv(base.join(p))?),
        None => None,
    };
    let radius = match cfg.geometry {
        GeometrySpec::Plates => None,
        GeometrySpec::Sphere { radius_um } => Some(SphericalProbe::new(radius_um * 1e-6)?.radius()),
        GeometrySpec::CrossedCylinders {
            radius_a_um,
            radius_b_um,
        } => Some(CrossedCylinders::new(radius_a_um * 1e-6, radius_b_um * 1e-6)?.effective_radius()),
    };
    let Some(radius) = radius else {
        if roughness.is_some() {
            return Err(Error::InvalidInput("roughness averaging needs a curved geometry".into()));
        }
        let rows = sweep(&gap, &ds, &opts)
            .into_iter()
            .zip(&ds)
            .map(|(r, &d)| {
                let (e, p) = r?;
                Ok(vec![d, e.value, p.value, p.value.abs()])
            })
            .collect::<Result<Vec<_>>>()?;
        let peak = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
        return Ok(Output {
            payload: Payload::Csv(csv("distance_m,energy_J_per_m2,pressure_Pa,pressure_magnitude_Pa", &rows)),
            results: json!({ "rows": rows.len(), "max_pressure_magnitude_Pa": peak }),
        });
    };
    let probe = SphericalProbe::new(radius)?;
    let at = |d: f64| -> Result<(f64, f64, bool)> {
        let g = gap.with_separation(d)?;
        let f = match cfg.geometry {
            GeometrySpec::CrossedCylinders {
                radius_a_um,
                radius_b_um,
            } => crossed_cylinder_force_with(&CrossedCylinders::new(radius_a_um * 1e-6, radius_b_um * 1e-6)?, &g, &opts)?,
            _ => sphere_plate_force_with(&probe, &g, &opts)?,
        };
        Ok((f.force, f.ratio, f.warning))
    };
    let rows = ds
        .par_iter()
        .map(|&d| {
            let (f0, ratio, warning) = at(d)?;
            let f = match &roughness {
                Some(p) => roughness_average(|x| Ok(at(x)?.0), p, d)?,
                None => f0,
            };
            Ok(vec![d, f, f.abs(), ratio, if warning { 1.0 } else { 0.0 }])
        })
        .collect::<Result<Vec<_>>>()?;
    let warnings = rows.iter().filter(|r| r[4] != 0.0).count();
    Ok(Output {
        payload: Payload::Csv(csv("distance_m,force_N,force_magnitude_N,pfa_ratio,pfa_warning", &rows)),
        results: json!({ "rows": rows.len(), "pfa_warnings": warnings, "effective_radius_m": radius }),
    })
}

pub fn fit(cfg: &FitConfig, base: &Path, seed: Option<u64>) -> Result<Output> {
    let theory = cfg.theory.build(base)?;
    let law = theory.law();
    let opts = FitOptions {
        free_amplitude: cfg.free_amplitude,
    };
    match (&cfg.curve_csv, &cfg.monte_carlo) {
        (Some(p), None) => {
            let curve = read_curve_csv(base.join(p))?;
            let r = fit_d0(&curve, law, &opts)?;
            let results = json!({
                "d0_hat_m": r.d0_hat,
                "sigma_d0_m": r.sigma_d0,
                "converged": r.converged,
                "true_d0_m": curve.meta.true_d0,
            });
            Ok(Output {
                payload: Payload::Json(to_value(&r)),
                results,
            })
        }
        (None, Some(mc)) => {
            if mc.runs == 0 {
                return Err(Error::InvalidInput("monte_carlo.runs must be at least 1".into()));
            }
            let d0 = mc.true_d0_nm * 1e-9;
            let dp = mc.extensions_nm.values(1e-9)?;
            let first = seed.unwrap_or(mc.seed);
            let seeds: Vec<u64> = (0..mc.runs as u64).map(|i| first.wrapping_add(i)).collect();
            let fits = monte_carlo_fits(law, d0, &dp, mc.sigma_pn * 1e-12, &seeds, &opts);
            let mut rows = Vec::with_capacity(fits.len());
            for (s, r) in seeds.iter().zip(fits) {
                let r = r?;
                let covered = (r.d0_hat - d0).abs() <= 2.0 * r.sigma_d0;
                rows.push(vec![*s as f64, r.d0_hat, r.sigma_d0, r.chi2, if covered { 1.0 } else { 0.0 }]);
            }
            let coverage = rows.iter().map(|r| r[4]).sum::<f64>() / rows.len() as f64;
            Ok(Output {
                payload: Payload::Csv(csv("seed,d0_hat_m,sigma_d0_m,chi2,covered_2sigma", &rows)),
                results: json!({ "runs": rows.len(), "coverage_2sigma": coverage }),
            })
        }
        _ => Err(Error::InvalidInput(
            "give exactly one of `curve_csv` and `monte_carlo`".into(),
        )),
    }
}

pub fn sensitivity(cfg: &SensitivityConfig, base: &Path) -> Result<Output> {
    let theory = cfg.theory.build(base)?;
    let delta = cfg.offset_nm * 1e-9;
    let rows = cfg
        .distances_nm
        .values(1e-9)?
        .into_iter()
        .map(|d| Ok(vec![d, offset_sensitivity(theory.law(), d, delta)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Output {
        payload: Payload::Csv(csv("distance_m,relative_change", &rows)),
        results: json!({ "rows": rows.len() }),
    })
}

pub fn crossover(cfg: &CrossoverConfig, base: &Path) -> Result<Output> {
    let theory = cfg.theory.build(base)?;
    let delta = cfg.offset_nm * 1e-9;
    let d = crossover_distance(theory.law(), delta, cfg.threshold)?;
    let mut out = json!({
        "offset_m": delta,
        "threshold": cfg.threshold,
        "crossover_m": d,
    });
    if theory.radius().is_some() {
        out["closed_form_m"] = json!(ideal_crossover_distance(delta, cfg.threshold));
    }
    if let Some(res) = &cfg.resolution {
        let dist = res.distance_nm * 1e-9;
        let f = res.force_resolution_pn * 1e-12;
        let mut r = json!({
            "distance_m": dist,
            "force_resolution_N": f,
            "min_offset_m": min_resolvable_offset(theory.law(), dist, f)?,
        });
        if let Some(radius) = theory.radius() {
            r["closed_form_m"] = json!(ideal_min_resolvable_offset(radius, dist, f));
        }
        out["resolution"] = r;
    }
    Ok(Output {
        results: out.clone(),
        payload: Payload::Json(out),
    })
}

pub fn shift(cfg: &ShiftConfig, base: &Path) -> Result<Output> {
    let theory = cfg.theory.build(base)?;
    let curve = read_curve_csv(base.join(&cfg.curve_csv))?;
    let a = shift_residual_analysis(&curve, theory.law(), cfg.nominal_d0_nm * 1e-9, &cfg.shifts_nm.values(1e-9)?)?;
    Ok(Output {
        results: json!({
            "best_shift_m": a.best_shift,
            "rms_before": a.rms_before,
            "rms_after": a.rms_after,
        }),
        payload: Payload::Json(to_value(&a)),
    })
}

pub fn spectral(cfg: &SpectralConfig, base: &Path) -> Result<Output> {
    let gap = GapConfig::new(cfg.mirror_a.build(base)?, cfg.mirror_b.build(base)?, cfg.separation_nm * 1e-9)?;
    let cutoffs: Vec<f64> = cfg.cutoffs_ev.iter().map(|&e| ev_to_rad_per_s(e)).collect();
    let s = spectral_cumulative(&gap, &cutoffs, &cfg.opts()?)?;
    let rows: Vec<Vec<f64>> = (0..s.cutoffs.len())
        .map(|i| vec![s.cutoffs[i], s.wavelengths[i], s.cumulative_fraction[i]])
        .collect();
    let mut results = json!({ "total_pressure_Pa": s.total_pressure });
    if let Some([lo, hi]) = cfg.window_um {
        results["window_fraction"] = json!(s.window_fraction(lo * 1e-6, hi * 1e-6)?);
    }
    Ok(Output {
        payload: Payload::Csv(csv("xi_rad_s,wavelength_m,cumulative_fraction", &rows)),
        results,
    })
}

pub fn hsm(cfg: &HsmConfig, base: &Path) -> Result<Output> {
    let opts = cfg.opts()?;
    let probe = cfg.probe.build(base)?;
    let refl = cfg.reflective.build(base)?;
    let tran = cfg.transparent.build(base)?;
    let rows = cfg
        .distances_nm
        .values(1e-9)?
        .par_iter()
        .map(|&d| {
            let p1 = casimir_pressure_with(&GapConfig::new(probe.clone(), refl.clone(), d)?, &opts)?.value;
            let p2 = casimir_pressure_with(&GapConfig::new(probe.clone(), tran.clone(), d)?, &opts)?.value;
            if p1 == 0.0 {
                return Err(Error::Domain("reflective-state pressure vanishes".into()));
            }
            Ok(vec![d, p1, p2, (p1 - p2).abs() / p1.abs()])
        })
        .collect::<Result<Vec<_>>>()?;
    let max = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    Ok(Output {
        payload: Payload::Csv(csv(
            "distance_m,pressure_reflective_Pa,pressure_transparent_Pa,relative_change",
            &rows,
        )),
        results: json!({ "max_relative_change": max }),
    })
}

pub fn torque(cfg: &TorqueConfig, base: &Path) -> Result<Output> {
    let setup = TorqueSetup::new(
        cfg.plate_a.build(base)?,
        cfg.plate_b.build(base)?,
        0.0,
        cfg.separation_nm * 1e-9,
        cfg.disk_radius_mm * 1e-3,
    )?;
    let p = torque_profile(&setup, cfg.angles, &cfg.opts()?)?;
    let max = p.torque.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    let floor = p.noise_floor.iter().cloned().fold(0.0, f64::max);
    Ok(Output {
        results: json!({
            "max_abs_torque_Nm": max,
            "max_noise_floor_Nm": floor,
            "sin2_amplitude_Nm": p.sin2_amplitude,
            "sin2_residual": p.sin2_residual,
        }),
        payload: Payload::Csv(p.to_csv()),
    })
}

pub fn cavity(cfg: &CavityConfig) -> Result<Output> {
    if cfg.cavities.is_empty() && cfg.crossover_search.is_none() {
        return Err(Error::InvalidInput("nothing to compute: no cavities and no crossover search".into()));
    }
    let specs = cfg.cavities.iter().map(BoxSpec::build).collect::<Result<Vec<CavitySpec>>>()?;
    let rows = specs
        .par_iter()
        .map(|s| {
            let e = cavity_vacuum_energy(s)?;
            let [a1, a2, a3] = s.sides();
            Ok(vec![a1, a2, a3, e.energy, e.cutoff, e.relative_difference, wall_force(s)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut results = json!({ "rows": rows.len() });
    if let Some(c) = cfg.crossover_search {
        results["wall_force_crossover_ratio"] = json!(wall_force_sign_crossover(c.ratio_lo, c.ratio_hi)?);
    }
    Ok(Output {
        payload: Payload::Csv(csv(
            "a1_m,a2_m,a3_m,energy_J,energy_cutoff_J,relative_difference,wall_force_N",
            &rows,
        )),
        results,
    })
}

pub fn pullout(cfg: &PullOutConfig) -> Result<Output> {
    let depths = cfg.depths_um.values(1e-6)?;
    if cfg.n_cavities == 0 {
        return Err(Error::InvalidInput("n_cavities must be at least 1".into()));
    }
    let cavity = CavitySpec::new(cfg.a1_um * 1e-6, cfg.a2_um * 1e-6, depths[0])?;
    let scenario = PullOutScenario::new(cavity, depths, cfg.n_cavities, cfg.baseline.build())?;
    let rows: Vec<Vec<f64>> = pull_out_curve(&scenario)?.into_iter().map(|(h, f)| vec![h, f]).collect();
    Ok(Output {
        payload: Payload::Csv(csv("depth_m,force_N", &rows)),
        results: json!({ "rows": rows.len() }),
    })
}

pub fn synth(cfg: &SynthConfig, base: &Path, seed: Option<u64>) -> Result<Output> {
    let theory = cfg.theory.build(base)?;
    let d0 = cfg.true_d0_nm * 1e-9;
    let noise = NoiseModel {
        sigma_force: cfg.sigma_pn * 1e-12,
        seed: seed.unwrap_or(cfg.seed),
    };
    let curve = synthesize_curve(theory.law(), d0, &cfg.extensions_nm.values(1e-9)?, &noise)?;
    Ok(Output {
        results: json!({ "samples": curve.samples.len(), "seed": noise.seed }),
        payload: Payload::Csv(write_curve_csv(&curve)),
    })
}
