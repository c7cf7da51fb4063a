//! Distance-to-force laws used as fit models.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lifshitz::{casimir_energy_area_with, ideal_energy_area, GapConfig, LifshitzOptions};
use crate::pfa::{ideal_sphere_plate_force, SphericalProbe};

/// A force as a function of the true gap, N (negative = attractive).
pub trait ForceLaw: Sync {
    fn force(&self, d: f64) -> Result<f64>;

    fn describe(&self) -> String {
        "force law".to_string()
    }
}

impl<F> ForceLaw for F
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    fn force(&self, d: f64) -> Result<f64> {
        self(d)
    }
}

/// Sphere–plate force between ideal metals, `−π³ħcR/(360 d³)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealSpherePlate {
    pub radius: f64,
}

impl IdealSpherePlate {
    pub fn new(radius: f64) -> Result<Self> {
        SphericalProbe::new(radius)?;
        Ok(IdealSpherePlate { radius })
    }
}

impl ForceLaw for IdealSpherePlate {
    fn force(&self, d: f64) -> Result<f64> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::domain(format!("gap must be positive, got {d:e}")));
        }
        Ok(ideal_sphere_plate_force(self.radius, d))
    }

    fn describe(&self) -> String {
        format!("ideal sphere-plate, R = {:e} m", self.radius)
    }
}

/// Natural cubic spline on strictly increasing knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::invalid("spline needs at least 3 matching knots"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }
        // tridiagonal system for the second derivatives, natural ends
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            r[i] = (rhs - a * r[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = r[i] - c[i] * m[i + 1];
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&t) {
            return Err(Error::domain(format!("{t} outside spline range [{lo}, {hi}]")));
        }
        let i = self.x.partition_point(|&k| k <= t).clamp(1, self.x.len() - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        Ok(a * self.y[i - 1]
            + b * self.y[i]
            + ((a * a * a - a) * self.m[i - 1] + (b * b * b - b) * self.m[i]) * h * h / 6.0)
    }
}

/// Sphere–plate Lifshitz force from a precomputed table of the reduction
/// factor `η(d) = E(d)/E_ideal(d)`, splined in `ln d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedForceLaw {
    radius: f64,
    eta: CubicSpline,
    label: String,
}

impl TabulatedForceLaw {
    /// Tabulate on `nodes` log-spaced separations in `[d_min, d_max]`.
    pub fn build(
        radius: f64,
        gap: &GapConfig,
        d_min: f64,
        d_max: f64,
        nodes: usize,
        opts: &LifshitzOptions,
    ) -> Result<Self> {
        SphericalProbe::new(radius)?;
        if !(d_min > 0.0 && d_max > d_min) || nodes < 4 {
            return Err(Error::invalid("table needs 0 < d_min < d_max and at least 4 nodes"));
        }
        let (l0, l1) = (d_min.ln(), d_max.ln());
        let xs: Vec<f64> = (0..nodes)
            .map(|i| l0 + (l1 - l0) * i as f64 / (nodes - 1) as f64)
            .collect();
        let ys = xs
            .par_iter()
            .map(|&l| {
                let d = l.exp();
                let e = casimir_energy_area_with(&gap.with_separation(d)?, opts)?.value;
                Ok(e / ideal_energy_area(d))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(TabulatedForceLaw {
            radius,
            eta: CubicSpline::new(xs, ys)?,
            label: format!("tabulated Lifshitz sphere-plate, R = {radius:e} m, {nodes} nodes"),
        })
    }

    /// Reduction factor relative to ideal metals.
    pub fn reduction_factor(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::domain("gap must be positive"));
        }
        self.eta.eval(d.ln())
    }

    pub fn range(&self) -> (f64, f64) {
        let (a, b) = self.eta.domain();
        (a.exp(), b.exp())
    }
}

impl ForceLaw for TabulatedForceLaw {
    fn force(&self, d: f64) -> Result<f64> {
        Ok(2.0 * PI * self.radius * ideal_energy_area(d) * self.reduction_factor(d)?)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..41).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(xs, ys).unwrap();
        for t in [0.55, 1.23, 2.71, 3.33] {
            assert!((s.eval(t).unwrap() - f64::sin(t)).abs() < 1e-5);
        }
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
        assert!(s.eval(4.5).is_err());
    }

    #[test]
    fn ideal_law_matches_pfa() {
        let law = IdealSpherePlate::new(1e-4).unwrap();
        let f = law.force(100e-9).unwrap();
        assert!((f.abs() - 2.72e-10).abs() < 0.01e-10);
        assert!(law.force(0.0).is_err());
    }
}
