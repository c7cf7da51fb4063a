//! Proximity force approximation for curved bodies and a discrete
//! roughness average.

use std::f64::consts::PI;
use std::path::Path;

use crate::constants::HBAR_C;
use crate::error::{Error, Result};
use crate::lifshitz::{casimir_energy_area_with, GapConfig, LifshitzOptions};

/// Below this radius-to-gap ratio PFA is refused.
pub const PFA_ERROR_RATIO: f64 = 10.0;
/// Below this ratio the result carries a warning.
pub const PFA_WARN_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalProbe {
    radius: f64,
}

impl SphericalProbe {
    pub fn new(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(SphericalProbe { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossedCylinders {
    radius_a: f64,
    radius_b: f64,
}

impl CrossedCylinders {
    pub fn new(radius_a: f64, radius_b: f64) -> Result<Self> {
        check_radius(radius_a)?;
        check_radius(radius_b)?;
        Ok(CrossedCylinders { radius_a, radius_b })
    }

    /// `√(R_a R_b)`, the radius of the equivalent sphere.
    pub fn effective_radius(&self) -> f64 {
        if self.radius_a == self.radius_b {
            self.radius_a
        } else {
            (self.radius_a * self.radius_b).sqrt()
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("radius must be positive, got {r}")))
    }
}

/// A PFA force together with its validity annotation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PfaForce {
    /// Force, N (negative = attractive).
    pub force: f64,
    /// Radius over separation.
    pub ratio: f64,
    /// Set when the ratio is below [`PFA_WARN_RATIO`].
    pub warning: bool,
}

/// Check the radius-to-gap ratio; returns whether a warning applies.
pub fn pfa_guard(radius: f64, separation: f64) -> Result<bool> {
    let ratio = radius / separation;
    if ratio < PFA_ERROR_RATIO {
        return Err(Error::PfaGuard { ratio });
    }
    Ok(ratio < PFA_WARN_RATIO)
}

fn pfa(radius: f64, gap: &GapConfig, opts: &LifshitzOptions) -> Result<PfaForce> {
    let d = gap.separation();
    let warning = pfa_guard(radius, d)?;
    let e = casimir_energy_area_with(gap, opts)?.value;
    Ok(PfaForce {
        force: 2.0 * PI * radius * e,
        ratio: radius / d,
        warning,
    })
}

/// Sphere above a plate: `F = 2πR·E(d)`.
pub fn sphere_plate_force(probe: &SphericalProbe, gap: &GapConfig) -> Result<PfaForce> {
    sphere_plate_force_with(probe, gap, &LifshitzOptions::default())
}

pub fn sphere_plate_force_with(probe: &SphericalProbe, gap: &GapConfig, opts: &LifshitzOptions) -> Result<PfaForce> {
    pfa(probe.radius, gap, opts)
}

/// Two crossed cylinders: `F = 2π√(R_a R_b)·E(d)`.
pub fn crossed_cylinder_force(cyl: &CrossedCylinders, gap: &GapConfig) -> Result<PfaForce> {
    crossed_cylinder_force_with(cyl, gap, &LifshitzOptions::default())
}

pub fn crossed_cylinder_force_with(cyl: &CrossedCylinders, gap: &GapConfig, opts: &LifshitzOptions) -> Result<PfaForce> {
    pfa(cyl.effective_radius(), gap, opts)
}

/// Ideal-metal sphere–plate force `−π³ħcR/(360 d³)`.
pub fn ideal_sphere_plate_force(radius: f64, d: f64) -> f64 {
    -PI.powi(3) * HBAR_C * radius / (360.0 * d.powi(3))
}

/// A discrete distribution of local gap offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessProfile {
    offsets: Vec<(f64, f64)>,
}

impl RoughnessProfile {
    /// `(height, weight)` pairs; weights must be positive and sum to one.
    pub fn new(offsets: Vec<(f64, f64)>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("roughness profile is empty"));
        }
        for &(h, w) in &offsets {
            if !h.is_finite() {
                return Err(Error::invalid(format!("height {h} is not finite")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("weight {w} must be positive")));
            }
        }
        let total: f64 = offsets.iter().map(|o| o.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(RoughnessProfile { offsets })
    }

    /// Flat surface.
    pub fn flat() -> Self {
        RoughnessProfile {
            offsets: vec![(0.0, 1.0)],
        }
    }

    /// Normal height distribution of width `sigma` on `points` Gauss–Hermite
    /// nodes, which reproduces the moments up to order `2·points − 1`.
    pub fn gaussian(sigma: f64, points: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        if !(1..=64).contains(&points) {
            return Err(Error::invalid("Gaussian profile needs 1..=64 points"));
        }
        let (x, w) = gauss_hermite(points);
        let norm: f64 = w.iter().sum();
        let offsets = x
            .iter()
            .zip(&w)
            .map(|(&x, &w)| (std::f64::consts::SQRT_2 * sigma * x, w / norm))
            .collect();
        Ok(RoughnessProfile { offsets })
    }

    pub fn offsets(&self) -> &[(f64, f64)] {
        &self.offsets
    }

    /// Parse `height_m,weight` rows. An optional header line and `#`
    /// comments are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut offsets = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || (offsets.is_empty() && line == "height_m,weight") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("not a number: {s:?}"),
                })
            };
            offsets.push((num(fields[0])?, num(fields[1])?));
        }
        Self::new(offsets)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&crate::error::read_text(path.as_ref())?)
    }
}

/// Weighted average `Σ wᵢ F(d + hᵢ)` of a distance-dependent force.
pub fn roughness_average<F>(mut base: F, profile: &RoughnessProfile, d: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if let Some(&(h, _)) = profile.offsets.iter().find(|(h, _)| d + h <= 0.0) {
        return Err(Error::invalid(format!("offset {h:e} closes the gap at d = {d:e}")));
    }
    let mut sum = 0.0;
    for &(h, w) in &profile.offsets {
        sum += w * base(d + h)?;
    }
    Ok(sum)
}

/// Physicists' Gauss–Hermite nodes and weights (weight `e^{−x²}`).
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::DielectricModel;

    fn ideal(d: f64) -> GapConfig {
        GapConfig::bulk(DielectricModel::PerfectConductor, DielectricModel::PerfectConductor, d).unwrap()
    }

    #[test]
    fn ideal_sphere_plate() {
        let probe = SphericalProbe::new(100e-6).unwrap();
        let f = sphere_plate_force(&probe, &ideal(100e-9)).unwrap();
        assert!(!f.warning);
        assert!((f.force / ideal_sphere_plate_force(100e-6, 100e-9) - 1.0).abs() < 3e-6);
        assert!((f.force.abs() - 2.72e-10).abs() < 0.01e-10, "{}", f.force);
    }

    #[test]
    fn guard_thresholds() {
        let gap = ideal(1e-6);
        assert!(matches!(
            sphere_plate_force(&SphericalProbe::new(5e-6).unwrap(), &gap),
            Err(Error::PfaGuard { .. })
        ));
        assert!(sphere_plate_force(&SphericalProbe::new(50e-6).unwrap(), &gap).unwrap().warning);
        assert!(!sphere_plate_force(&SphericalProbe::new(200e-6).unwrap(), &gap).unwrap().warning);
    }

    #[test]
    fn equal_cylinders_match_sphere() {
        let gap = ideal(100e-9);
        let s = sphere_plate_force(&SphericalProbe::new(1e-4).unwrap(), &gap).unwrap();
        let c = crossed_cylinder_force(&CrossedCylinders::new(1e-4, 1e-4).unwrap(), &gap).unwrap();
        assert_eq!(s.force, c.force);
        let ab = crossed_cylinder_force(&CrossedCylinders::new(1e-2, 2e-3).unwrap(), &gap).unwrap();
        let ba = crossed_cylinder_force(&CrossedCylinders::new(2e-3, 1e-2).unwrap(), &gap).unwrap();
        assert_eq!(ab.force, ba.force);
    }

    #[test]
    fn gauss_hermite_moments() {
        let p = RoughnessProfile::gaussian(1.0, 10).unwrap();
        let moment = |k: i32| p.offsets().iter().map(|(h, w)| w * h.powi(k)).sum::<f64>();
        assert!((moment(0) - 1.0).abs() < 1e-14);
        assert!(moment(1).abs() < 1e-14);
        assert!((moment(2) - 1.0).abs() < 1e-13);
        assert!((moment(4) - 3.0).abs() < 1e-12);
        assert!((moment(6) - 15.0).abs() < 1e-11);
    }

    #[test]
    fn delta_profile_is_identity() {
        let f = |d: f64| Ok(ideal_sphere_plate_force(1e-4, d));
        assert_eq!(roughness_average(f, &RoughnessProfile::flat(), 1e-7).unwrap(), f(1e-7).unwrap());
    }

    #[test]
    fn symmetric_profile_increases_magnitude() {
        let f = |d: f64| Ok(ideal_sphere_plate_force(1e-4, d));
        let p = RoughnessProfile::new(vec![(-5e-9, 0.5), (5e-9, 0.5)]).unwrap();
        assert!(roughness_average(f, &p, 1e-7).unwrap().abs() > f(1e-7).unwrap().abs());
        let p = RoughnessProfile::new(vec![(-2e-7, 0.5), (2e-7, 0.5)]).unwrap();
        assert!(roughness_average(f, &p, 1e-7).is_err());
    }

    #[test]
    fn profile_validation_and_parsing() {
        assert!(RoughnessProfile::new(vec![(0.0, 0.5)]).is_err());
        assert!(RoughnessProfile::new(vec![(0.0, 1.5), (1e-9, -0.5)]).is_err());
        let p = RoughnessProfile::parse_csv("height_m,weight\n-1e-9,0.25\n# c\n0,0.5\n1e-9,0.25\n").unwrap();
        assert_eq!(p.offsets().len(), 3);
        match RoughnessProfile::parse_csv("0,0.5\n1e-9,x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
