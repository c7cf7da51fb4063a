//! Casimir torque between two uniaxial plates whose optic axes lie in the
//! plate plane and are rotated by `θ` relative to each other.
//!
//! Each plate reflects through a 2×2 matrix in the (TE, TM) basis that
//! mixes polarisations when the axis is oblique to the in-plane wave
//! vector. The energy is
//!
//! ```text
//! E(θ) = ħc/(32π²d³) ∫₀^∞ dx ∫ₓ^∞ dy  y ⟨ln det(I − R_a R_b e^{−y})⟩_φ
//! ```
//!
//! with `φ` the azimuth of the wave vector, and the torque on plate b is
//! `M = −πR² ∂E/∂θ`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{C, HBAR_C};
use crate::error::{Error, QuadDiagnostics, Result};
use crate::lifshitz::{check_separation, LifshitzOptions};
use crate::materials::{Permittivity, UniaxialModel};
use crate::quadrature::integrate_to_infinity;

pub type Matrix2 = [[f64; 2]; 2];

/// Solve a 4×4 linear system by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut s = b[row];
        for k in row + 1..4 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Reflection matrix for given `ε_o`, `ε_e` at `q = ξ/c`, in-plane wave
/// number `k` and axis angle `beta` measured from the wave vector.
///
/// Columns are incident (TE, TM), rows reflected (TE, TM); TE amplitudes
/// are carried by `E_y`, TM amplitudes by `H_y`.
fn reflection_matrix(eps_o: f64, eps_e: f64, q: f64, k: f64, beta: f64) -> Option<Matrix2> {
    let (s, c) = beta.sin_cos();
    let k2 = k * k;
    let q2 = q * q;
    let kappa0 = (k2 + q2).sqrt();
    let p_o = (k2 + eps_o * q2).sqrt();
    let p_e = (eps_e * q2 + k2 * s * s + (eps_e / eps_o) * k2 * c * c).sqrt();
    // tangential (E_x, E_y, h_x, h_y), h = Z₀H
    let ordinary = [p_o * s * q, -p_o * c * q, -p_o * p_o * c, s * (k2 - p_o * p_o)];
    let extraordinary = [
        c * (q2 * eps_o + k2),
        q2 * eps_o * s,
        p_e * q * eps_o * s,
        -p_e * c * q * eps_o,
    ];
    let ref_te = [0.0, q, -kappa0, 0.0];
    let ref_tm = [kappa0, 0.0, 0.0, q];
    let inc = [[0.0, q, kappa0, 0.0], [-kappa0, 0.0, 0.0, q]];
    let mut a = [[0.0; 4]; 4];
    for r in 0..4 {
        a[r] = [ref_te[r], ref_tm[r], -ordinary[r], -extraordinary[r]];
    }
    let mut m = [[0.0; 2]; 2];
    for (j, v) in inc.iter().enumerate() {
        let x = solve4(a, [-v[0], -v[1], -v[2], -v[3]])?;
        m[0][j] = x[0];
        m[1][j] = x[1];
    }
    Some(m)
}

fn perfect_conductor_matrix() -> Matrix2 {
    [[-1.0, 0.0], [0.0, 1.0]]
}

fn isotropic_matrix(eps: f64, q: f64, kappa0: f64) -> Matrix2 {
    let kappa = (kappa0 * kappa0 + (eps - 1.0) * q * q).sqrt();
    [
        [(kappa0 - kappa) / (kappa0 + kappa), 0.0],
        [0.0, (eps * kappa0 - kappa) / (eps * kappa0 + kappa)],
    ]
}

/// Permittivities of a uniaxial plate at one frequency.
#[derive(Debug, Clone, Copy)]
enum PlateAt {
    Conductor,
    Isotropic(f64),
    Uniaxial(f64, f64),
}

impl PlateAt {
    fn new(model: &UniaxialModel, xi: f64) -> Result<Self> {
        match (model.ordinary.eval(xi)?, model.extraordinary.eval(xi)?) {
            (Permittivity::Finite(o), Permittivity::Finite(e)) => Ok(if o == e {
                PlateAt::Isotropic(o)
            } else {
                PlateAt::Uniaxial(o, e)
            }),
            (Permittivity::Infinite, Permittivity::Infinite) => Ok(PlateAt::Conductor),
            _ => Err(Error::invalid("uniaxial model mixes finite and infinite permittivity")),
        }
    }

    fn matrix(&self, q: f64, k: f64, beta: f64) -> Result<Matrix2> {
        let kappa0 = (k * k + q * q).sqrt();
        match *self {
            PlateAt::Conductor => Ok(perfect_conductor_matrix()),
            PlateAt::Isotropic(e) => Ok(isotropic_matrix(e, q, kappa0)),
            PlateAt::Uniaxial(o, e) => reflection_matrix(o, e, q, k, beta).ok_or_else(|| Error::NumericalFailure {
                message: format!("singular boundary system at q = {q:e}, k = {k:e}"),
                diagnostics: QuadDiagnostics::default(),
            }),
        }
    }
}

/// Reflection matrix of a uniaxial half-space in the (TE, TM) basis.
///
/// `axis_angle` is the angle from the in-plane wave vector to the optic
/// axis. Isotropic models give `diag(r_TE, r_TM)` of the scalar Fresnel
/// coefficients.
pub fn uniaxial_reflection_matrix(model: &UniaxialModel, xi: f64, k: f64, axis_angle: f64) -> Result<Matrix2> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::domain(format!("xi must be finite and > 0, got {xi}")));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain(format!("k must be finite and >= 0, got {k}")));
    }
    if !axis_angle.is_finite() {
        return Err(Error::domain("axis angle must be finite"));
    }
    PlateAt::new(model, xi)?.matrix(xi / C, k, axis_angle)
}

/// Matrix of the upper plate expressed in the lower plate's basis: the
/// mirror `z → −z` flips the sign of TM amplitudes.
fn mirrored(m: Matrix2) -> Matrix2 {
    [[m[0][0], -m[0][1]], [-m[1][0], m[1][1]]]
}

fn ln_det_round_trip(a: &Matrix2, b: &Matrix2, decay: f64) -> f64 {
    // det(I − A B e) = 1 − e tr(AB) + e² det A det B
    let ab00 = a[0][0] * b[0][0] + a[0][1] * b[1][0];
    let ab11 = a[1][0] * b[0][1] + a[1][1] * b[1][1];
    let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let det_b = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    (-(decay * (ab00 + ab11)) + decay * decay * det_a * det_b).ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorqueSetup {
    pub plate_a: UniaxialModel,
    pub plate_b: UniaxialModel,
    theta: f64,
    separation: f64,
    disk_radius: f64,
}

impl TorqueSetup {
    pub fn new(
        plate_a: UniaxialModel,
        plate_b: UniaxialModel,
        theta: f64,
        separation: f64,
        disk_radius: f64,
    ) -> Result<Self> {
        check_separation(separation)?;
        if !(disk_radius.is_finite() && disk_radius > 0.0) {
            return Err(Error::invalid("disk radius must be positive"));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        for m in [&plate_a, &plate_b] {
            UniaxialModel::new(m.ordinary.clone(), m.extraordinary.clone())?;
        }
        Ok(TorqueSetup {
            plate_a,
            plate_b,
            theta: theta.rem_euclid(PI),
            separation,
            disk_radius,
        })
    }

    /// Angle between the optic axes, reduced to `[0, π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn disk_radius(&self) -> f64 {
        self.disk_radius
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        TorqueSetup {
            theta: theta.rem_euclid(PI),
            ..self.clone()
        }
    }

    pub fn with_disk_radius(&self, disk_radius: f64) -> Result<Self> {
        Self::new(self.plate_a.clone(), self.plate_b.clone(), self.theta, self.separation, disk_radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueOptions {
    pub lifshitz: LifshitzOptions,
    /// θ step of the central difference, rad.
    pub step: f64,
    /// Relative convergence target of the azimuthal average.
    pub azimuth_tol: f64,
}

impl Default for TorqueOptions {
    fn default() -> Self {
        TorqueOptions {
            lifshitz: LifshitzOptions::default(),
            step: 1e-3,
            azimuth_tol: 1e-4,
        }
    }
}

/// Starting number of azimuth nodes on `[0, π)`, equivalent to 32 on
/// `[0, 2π)` because the integrand is π-periodic.
const AZIMUTH_START: usize = 16;
const AZIMUTH_MAX: usize = 1024;

/// ⟨ln det⟩_φ for every angle in `thetas`, sharing the azimuth nodes.
fn azimuth_average(
    a: &PlateAt,
    b: &PlateAt,
    q: f64,
    kappa0: f64,
    decay: f64,
    thetas: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let k = (kappa0 * kappa0 - q * q).max(0.0).sqrt();
    let n_theta = thetas.len();
    // isotropic pairs do not depend on φ at all
    if !matches!(a, PlateAt::Uniaxial(..)) && !matches!(b, PlateAt::Uniaxial(..)) {
        let v = ln_det_round_trip(&a.matrix(q, k, 0.0)?, &mirrored(b.matrix(q, k, 0.0)?), decay);
        return Ok(vec![v; n_theta]);
    }
    let sum_at = |phis: &mut dyn Iterator<Item = f64>, acc: &mut Vec<f64>| -> Result<()> {
        for phi in phis {
            let ra = a.matrix(q, k, -phi)?;
            for (s, &t) in acc.iter_mut().zip(thetas) {
                let rb = mirrored(b.matrix(q, k, t - phi)?);
                *s += ln_det_round_trip(&ra, &rb, decay);
            }
        }
        Ok(())
    };
    let mut n = AZIMUTH_START;
    let mut sums = vec![0.0; n_theta];
    sum_at(&mut (0..n).map(|i| PI * i as f64 / n as f64), &mut sums)?;
    let mut prev: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    loop {
        // the new nodes sit halfway between the old ones
        sum_at(&mut (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64), &mut sums)?;
        n *= 2;
        let cur: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
        let scale = cur.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let change = cur.iter().zip(&prev).fold(0.0_f64, |m, (c, p)| m.max((c - p).abs()));
        if change <= tol * scale || n >= AZIMUTH_MAX {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Energy per area at each angle in `thetas`, evaluated on one shared mesh
/// so differences between angles are free of mesh noise.
fn energies_at(setup: &TorqueSetup, thetas: &[f64], opts: &TorqueOptions) -> Result<(Vec<f64>, QuadDiagnostics)> {
    let d = setup.separation;
    let n = thetas.len();
    let mut failure: Option<Error> = None;
    let inner_opts = opts.lifshitz.inner();
    let (v, diag) = integrate_to_infinity(
        |x: f64| -> Vec<f64> {
            if failure.is_some() {
                return vec![0.0; n];
            }
            let xi = x * C / (2.0 * d);
            let q = xi / C;
            let plates = PlateAt::new(&setup.plate_a, xi).and_then(|a| Ok((a, PlateAt::new(&setup.plate_b, xi)?)));
            let (pa, pb) = match plates {
                Ok(p) => p,
                Err(e) => {
                    failure = Some(e);
                    return vec![0.0; n];
                }
            };
            let mut inner_fail: Option<Error> = None;
            let r = integrate_to_infinity(
                |y: f64| -> Vec<f64> {
                    if inner_fail.is_some() {
                        return vec![0.0; n];
                    }
                    let kappa0 = y / (2.0 * d);
                    match azimuth_average(&pa, &pb, q, kappa0, (-y).exp(), thetas, opts.azimuth_tol) {
                        Ok(mut v) => {
                            v.iter_mut().for_each(|e| *e *= y);
                            v
                        }
                        Err(e) => {
                            inner_fail = Some(e);
                            vec![0.0; n]
                        }
                    }
                },
                x,
                1.0,
                &inner_opts,
            );
            match (r, inner_fail) {
                (_, Some(e)) | (Err(e), None) => {
                    failure = Some(e);
                    vec![0.0; n]
                }
                (Ok((v, _)), None) => v,
            }
        },
        0.0,
        1.0,
        &opts.lifshitz.outer(),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let pref = HBAR_C / (32.0 * PI * PI * d.powi(3));
    Ok((v.into_iter().map(|e| pref * e).collect(), diag))
}

/// Energy per unit area at the setup's angle, J/m².
pub fn anisotropic_energy_area(setup: &TorqueSetup) -> Result<f64> {
    anisotropic_energy_area_with(setup, &TorqueOptions::default())
}

pub fn anisotropic_energy_area_with(setup: &TorqueSetup, opts: &TorqueOptions) -> Result<f64> {
    Ok(energies_at(setup, &[setup.theta], opts)?.0[0])
}

/// Energies at several angles on one shared mesh, J/m².
pub fn anisotropic_energies(setup: &TorqueSetup, thetas: &[f64], opts: &TorqueOptions) -> Result<Vec<f64>> {
    Ok(energies_at(setup, thetas, opts)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorqueEstimate {
    /// Torque on plate b about the normal, N·m.
    pub torque: f64,
    /// Energy per area at θ, J/m².
    pub energy_area: f64,
    /// Smallest torque the difference scheme can resolve, N·m.
    pub noise_floor: f64,
}

/// Torque `M = −πR² ∂E/∂θ` by a Richardson-refined central difference.
pub fn torque(setup: &TorqueSetup) -> Result<TorqueEstimate> {
    torque_with(setup, &TorqueOptions::default())
}

pub fn torque_with(setup: &TorqueSetup, opts: &TorqueOptions) -> Result<TorqueEstimate> {
    let h = opts.step;
    if !(h > 0.0 && h < 0.1) {
        return Err(Error::invalid("derivative step must lie in (0, 0.1) rad"));
    }
    let t = setup.theta;
    let thetas = [t - 2.0 * h, t - h, t, t + h, t + 2.0 * h];
    let (e, _) = energies_at(setup, &thetas, opts)?;
    let d1 = (e[3] - e[1]) / (2.0 * h);
    let d2 = (e[4] - e[0]) / (4.0 * h);
    let deriv = (4.0 * d1 - d2) / 3.0;
    let area = PI * setup.disk_radius * setup.disk_radius;
    let torque = -area * deriv;
    let rounding = area * 64.0 * f64::EPSILON * e[2].abs() / h;
    let discrepancy = area * (d1 - d2).abs() / 3.0;
    let noise_floor = rounding.max(discrepancy);
    if discrepancy > rounding && discrepancy > 0.1 * torque.abs() {
        return Err(Error::UnreliableDerivative {
            estimate: torque,
            noise_floor,
        });
    }
    Ok(TorqueEstimate {
        torque,
        energy_area: e[2],
        noise_floor,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorqueProfile {
    pub thetas: Vec<f64>,
    pub torque: Vec<f64>,
    pub energy_area: Vec<f64>,
    pub noise_floor: Vec<f64>,
    /// Amplitude `A` of the least-squares fit `M ≈ A sin 2θ`, N·m.
    pub sin2_amplitude: f64,
    /// RMS deviation from the fit divided by `|A|`.
    pub sin2_residual: f64,
}

impl TorqueProfile {
    /// `theta_rad,torque_Nm,energy_J_per_m2` rows, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_rad,torque_Nm,energy_J_per_m2\n");
        for i in 0..self.thetas.len() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.thetas[i], self.torque[i], self.energy_area[i]
            );
        }
        out
    }
}

/// Torque at `n_theta` uniformly spaced angles on `[0, π)`, in parallel.
pub fn torque_profile(setup: &TorqueSetup, n_theta: usize, opts: &TorqueOptions) -> Result<TorqueProfile> {
    if n_theta < 5 {
        return Err(Error::invalid(format!("need at least 5 angles, got {n_theta}")));
    }
    let thetas: Vec<f64> = (0..n_theta).map(|i| PI * i as f64 / n_theta as f64).collect();
    let est = thetas
        .par_iter()
        .map(|&t| torque_with(&setup.with_theta(t), opts))
        .collect::<Result<Vec<_>>>()?;
    let torque: Vec<f64> = est.iter().map(|e| e.torque).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (t, m) in thetas.iter().zip(&torque) {
        let s = (2.0 * t).sin();
        num += m * s;
        den += s * s;
    }
    let amp = num / den;
    let rss: f64 = thetas
        .iter()
        .zip(&torque)
        .map(|(t, m)| (m - amp * (2.0 * t).sin()).powi(2))
        .sum();
    let rms = (rss / n_theta as f64).sqrt();
    Ok(TorqueProfile {
        sin2_residual: if amp != 0.0 { rms / amp.abs() } else { f64::INFINITY },
        sin2_amplitude: amp,
        energy_area: est.iter().map(|e| e.energy_area).collect(),
        noise_floor: est.iter().map(|e| e.noise_floor).collect(),
        torque,
        thetas,
    })
}
