//! Tabulated absorption spectra `ε″(ω)` and their Kramers–Kronig transform
//! to the imaginary axis.
//!
//! Inside the table `ε″` is interpolated linearly in `ω`. Below the first
//! sample a low-frequency tail is used and above the last sample a power-law
//! decay; both are explicit and can be switched off.

use std::f64::consts::FRAC_2_PI;
use std::path::Path;

use crate::constants::omega_of_wavelength;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Extrapolation of `ε″` below the first tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowTail {
    /// No absorption below the table.
    Zero,
    /// `ε″ = A/ω` with `A` matched to the first sample (the `ω ≪ γ` Drude regime).
    InverseOmega,
    /// Full Drude absorption `ω_p² γ / (ω (ω² + γ²))`.
    Drude { omega_p: f64, gamma: f64 },
}

/// Extrapolation of `ε″` above the last tabulated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HighTail {
    Zero,
    /// `ε″ = ε″_N (ω/ω_N)^(-exponent)`, matched to the last sample.
    PowerLaw { exponent: f64 },
}

impl Default for LowTail {
    fn default() -> Self {
        LowTail::InverseOmega
    }
}

impl Default for HighTail {
    fn default() -> Self {
        HighTail::PowerLaw { exponent: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    omega: Vec<f64>,
    eps2: Vec<f64>,
    pub low_tail: LowTail,
    pub high_tail: HighTail,
}

const SEGMENT_TOL: f64 = 1e-10;

impl TabulatedSpectrum {
    pub fn new(omega: Vec<f64>, eps2: Vec<f64>, low_tail: LowTail, high_tail: HighTail) -> Result<Self> {
        let t = TabulatedSpectrum {
            omega,
            eps2,
            low_tail,
            high_tail,
        };
        t.validate()?;
        Ok(t)
    }

    /// Sample pairs `(ω, ε″)` with default tails.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (omega, eps2) = pairs.iter().copied().unzip();
        Self::new(omega, eps2, LowTail::default(), HighTail::default())
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn eps2(&self) -> &[f64] {
        &self.eps2
    }

    pub fn with_tails(mut self, low: LowTail, high: HighTail) -> Result<Self> {
        self.low_tail = low;
        self.high_tail = high;
        self.validate()?;
        Ok(self)
    }

    /// Keep only samples with `omega_min ≤ ω ≤ omega_max` and drop both tails.
    pub fn truncated(&self, omega_min: f64, omega_max: f64) -> Result<Self> {
        let (omega, eps2) = self
            .omega
            .iter()
            .zip(&self.eps2)
            .filter(|(w, _)| **w >= omega_min && **w <= omega_max)
            .map(|(w, e)| (*w, *e))
            .unzip();
        Self::new(omega, eps2, LowTail::Zero, HighTail::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega.len() != self.eps2.len() {
            return Err(Error::invalid("omega and eps2 columns differ in length"));
        }
        if self.omega.len() < 2 {
            return Err(Error::invalid(format!(
                "tabulated spectrum needs at least 2 samples, got {}",
                self.omega.len()
            )));
        }
        if !(self.omega[0].is_finite() && self.omega[0] > 0.0) {
            return Err(Error::invalid("tabulated frequencies must be positive"));
        }
        for (i, w) in self.omega.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::invalid(format!(
                    "tabulated frequencies must be strictly ascending (sample {})",
                    i + 1
                )));
            }
        }
        if let Some(i) = self.eps2.iter().position(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::invalid(format!("eps2 must be finite and >= 0 (sample {i})")));
        }
        match self.low_tail {
            LowTail::Drude { omega_p, gamma } if !(omega_p > 0.0 && gamma > 0.0) => {
                return Err(Error::invalid("Drude low tail needs omega_p > 0 and gamma > 0"));
            }
            _ => {}
        }
        match self.high_tail {
            HighTail::PowerLaw { exponent } if !(exponent >= 1.0 && exponent.is_finite()) => {
                return Err(Error::invalid("high-frequency tail exponent must be >= 1"));
            }
            _ => {}
        }
        Ok(())
    }

    /// `ε″` at real frequency `ω`, including tails.
    pub fn eps2_at(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] {
            return match self.low_tail {
                LowTail::Zero => 0.0,
                LowTail::InverseOmega => self.eps2[0] * self.omega[0] / w,
                LowTail::Drude { omega_p, gamma } => omega_p * omega_p * gamma / (w * (w * w + gamma * gamma)),
            };
        }
        if w > self.omega[n - 1] {
            return match self.high_tail {
                HighTail::Zero => 0.0,
                HighTail::PowerLaw { exponent } => self.eps2[n - 1] * (w / self.omega[n - 1]).powf(-exponent),
            };
        }
        let i = self.omega.partition_point(|x| *x <= w).clamp(1, n - 1);
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let (e0, e1) = (self.eps2[i - 1], self.eps2[i]);
        e0 + (e1 - e0) * (w - w0) / (w1 - w0)
    }

    /// `ε(iξ)` for `ξ > 0`.
    pub(crate) fn epsilon_imag(&self, xi: f64) -> Result<f64> {
        let integral = self.low_tail_integral(xi)? + self.table_integral(xi)? + self.high_tail_integral(xi)?;
        Ok(1.0 + FRAC_2_PI * integral)
    }

    // ∫ over each linear segment with ω = ξ·tan(t); the integrand becomes
    // tan(t)·ε″(ξ tan t), smooth on every segment.
    fn table_integral(&self, xi: f64) -> Result<f64> {
        let opts = QuadOptions::relative(SEGMENT_TOL);
        let mut total = 0.0;
        for i in 1..self.omega.len() {
            let (w0, w1) = (self.omega[i - 1], self.omega[i]);
            let (e0, e1) = (self.eps2[i - 1], self.eps2[i]);
            if e0 == 0.0 && e1 == 0.0 {
                continue;
            }
            let slope = (e1 - e0) / (w1 - w0);
            let (t0, t1) = ((w0 / xi).atan(), (w1 / xi).atan());
            let (v, _) = integrate(
                |t: f64| {
                    let tn = t.tan();
                    tn * (e0 + slope * (xi * tn - w0))
                },
                t0,
                t1,
                &opts,
            )?;
            total += v;
        }
        Ok(total)
    }

    fn low_tail_integral(&self, xi: f64) -> Result<f64> {
        let w1 = self.omega[0];
        match self.low_tail {
            LowTail::Zero => Ok(0.0),
            LowTail::InverseOmega => Ok(self.eps2[0] * w1 * (w1 / xi).atan() / xi),
            LowTail::Drude { omega_p, gamma } => {
                let g = |a: f64| (w1 / a).atan() / a;
                let denom = xi * xi - gamma * gamma;
                if denom.abs() > 1e-3 * gamma * gamma {
                    Ok(omega_p * omega_p * gamma * (g(gamma) - g(xi)) / denom)
                } else {
                    // ξ ≈ γ: partial fractions cancel, integrate directly
                    let (v, _) = integrate(
                        |t: f64| {
                            let w = xi * t.tan();
                            t.tan() * omega_p * omega_p * gamma / (w * (w * w + gamma * gamma))
                        },
                        0.0,
                        (w1 / xi).atan(),
                        &QuadOptions::relative(SEGMENT_TOL),
                    )?;
                    Ok(v)
                }
            }
        }
    }

    // ω = ω_N/s maps [ω_N, ∞) to (0, 1]; the integrand is s^(p-1)/(1 + (ξ s/ω_N)²).
    fn high_tail_integral(&self, xi: f64) -> Result<f64> {
        let n = self.omega.len();
        match self.high_tail {
            HighTail::Zero => Ok(0.0),
            HighTail::PowerLaw { exponent } => {
                let en = self.eps2[n - 1];
                if en == 0.0 {
                    return Ok(0.0);
                }
                let a = xi / self.omega[n - 1];
                let (v, _) = integrate(
                    |s: f64| s.powf(exponent - 1.0) / (1.0 + a * a * s * s),
                    0.0,
                    1.0,
                    &QuadOptions::relative(SEGMENT_TOL),
                )?;
                Ok(en * v)
            }
        }
    }

    /// Parse the comma-separated optical data format.
    ///
    /// Accepted headers are `omega_rad_per_s,eps2` and `lambda_um,n,k`
    /// (converted with `ε″ = 2nk`, `ω = 2πc/λ`). A file without a header is
    /// read as `omega_rad_per_s,eps2`. Lines starting with `#` are ignored.
    pub fn parse_csv(text: &str) -> Result<Self> {
        #[derive(PartialEq)]
        enum Layout {
            OmegaEps2,
            LambdaNk,
        }
        let mut layout = None;
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if layout.is_none() {
                match fields.as_slice() {
                    ["omega_rad_per_s", "eps2"] => {
                        layout = Some(Layout::OmegaEps2);
                        continue;
                    }
                    ["lambda_um", "n", "k"] => {
                        layout = Some(Layout::LambdaNk);
                        continue;
                    }
                    _ => layout = Some(Layout::OmegaEps2),
                }
            }
            let nums = fields
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("not a number: {f:?}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            match layout {
                Some(Layout::OmegaEps2) => {
                    if nums.len() != 2 {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("expected 2 columns, found {}", nums.len()),
                        });
                    }
                    pairs.push((nums[0], nums[1]));
                }
                Some(Layout::LambdaNk) => {
                    if nums.len() != 3 {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("expected 3 columns, found {}", nums.len()),
                        });
                    }
                    if !(nums[0] > 0.0) {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "wavelength must be positive".into(),
                        });
                    }
                    pairs.push((omega_of_wavelength(nums[0] * 1e-6), 2.0 * nums[1] * nums[2]));
                }
                None => unreachable!(),
            }
        }
        if layout == Some(Layout::LambdaNk) {
            // wavelength tables are usually ascending in λ
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Self::from_pairs(&pairs)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = crate::error::read_text(path.as_ref())?;
        Self::parse_csv(&text)
    }
}

/// Drude absorption `ε″(ω) = ω_p² γ / (ω (ω² + γ²))`.
pub fn drude_eps2(omega_p: f64, gamma: f64, w: f64) -> f64 {
    omega_p * omega_p * gamma / (w * (w * w + gamma * gamma))
}
