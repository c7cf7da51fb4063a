//! Dielectric response of real and ideal materials on the imaginary
//! frequency axis.
//!
//! Every model except [`DielectricModel::PerfectConductor`] evaluates to a
//! real permittivity `ε(iξ) ≥ 1` that is non-increasing in `ξ` and tends to
//! one as `ξ → ∞`. The perfect conductor is kept as its own variant so the
//! reflection code can use the exact ideal-metal limits instead of a very
//! large number.

mod presets;
mod table;

use std::sync::Arc;

pub use presets::{builtin_presets, preset, Preset, PresetModel};
pub use table::{drude_eps2, HighTail, LowTail, TabulatedSpectrum};

use crate::error::{Error, Result};

/// A point `iξ` on the imaginary frequency axis, `ξ` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ImaginaryFrequency(f64);

impl ImaginaryFrequency {
    pub fn new(xi: f64) -> Result<Self> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::domain(format!(
                "imaginary frequency must be finite and non-negative, got {xi}"
            )));
        }
        Ok(ImaginaryFrequency(xi))
    }

    pub fn xi(self) -> f64 {
        self.0
    }
}

/// Value of `ε(iξ)`. The perfect conductor has no finite permittivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Permittivity {
    Finite(f64),
    Infinite,
}

impl Permittivity {
    pub fn finite(self) -> Option<f64> {
        match self {
            Permittivity::Finite(v) => Some(v),
            Permittivity::Infinite => None,
        }
    }
}

/// One Lorentz oscillator term `strength·ω_j²/(ω_j² + ξ² + γ_j ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub omega: f64,
    pub strength: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DielectricModel {
    PerfectConductor,
    Constant { eps: f64 },
    Drude { omega_p: f64, gamma: f64 },
    Plasma { omega_p: f64 },
    Oscillators(Vec<Oscillator>),
    Tabulated(Arc<TabulatedSpectrum>),
}

impl DielectricModel {
    pub fn vacuum() -> Self {
        DielectricModel::Constant { eps: 1.0 }
    }

    pub fn constant(eps: f64) -> Result<Self> {
        let m = DielectricModel::Constant { eps };
        m.validate()?;
        Ok(m)
    }

    pub fn drude(omega_p: f64, gamma: f64) -> Result<Self> {
        let m = DielectricModel::Drude { omega_p, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn plasma(omega_p: f64) -> Result<Self> {
        let m = DielectricModel::Plasma { omega_p };
        m.validate()?;
        Ok(m)
    }

    pub fn oscillators(terms: Vec<Oscillator>) -> Result<Self> {
        let m = DielectricModel::Oscillators(terms);
        m.validate()?;
        Ok(m)
    }

    pub fn tabulated(spectrum: TabulatedSpectrum) -> Self {
        DielectricModel::Tabulated(Arc::new(spectrum))
    }

    pub fn is_perfect_conductor(&self) -> bool {
        matches!(self, DielectricModel::PerfectConductor)
    }

    /// Check the parameter constraints of the variant.
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let non_negative = |v: f64| v.is_finite() && v >= 0.0;
        match self {
            DielectricModel::PerfectConductor => Ok(()),
            DielectricModel::Constant { eps } => {
                if eps.is_finite() && *eps >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("constant permittivity must be >= 1, got {eps}")))
                }
            }
            DielectricModel::Drude { omega_p, gamma } => {
                if positive(*omega_p) && non_negative(*gamma) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "Drude model needs omega_p > 0 and gamma >= 0, got {omega_p}, {gamma}"
                    )))
                }
            }
            DielectricModel::Plasma { omega_p } => {
                if positive(*omega_p) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("plasma model needs omega_p > 0, got {omega_p}")))
                }
            }
            DielectricModel::Oscillators(terms) => {
                for (i, o) in terms.iter().enumerate() {
                    if !(positive(o.omega) && positive(o.strength) && non_negative(o.gamma)) {
                        return Err(Error::invalid(format!(
                            "oscillator {i} needs omega > 0, strength > 0, gamma >= 0"
                        )));
                    }
                }
                Ok(())
            }
            DielectricModel::Tabulated(t) => t.validate(),
        }
    }

    /// `ε(iξ)` without wrapping `ξ` in [`ImaginaryFrequency`].
    pub fn eval(&self, xi: f64) -> Result<Permittivity> {
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::domain(format!("xi must be finite and >= 0, got {xi}")));
        }
        let v = match self {
            DielectricModel::PerfectConductor => return Ok(Permittivity::Infinite),
            DielectricModel::Constant { eps } => *eps,
            DielectricModel::Drude { omega_p, gamma } => {
                if xi == 0.0 {
                    return Err(Error::domain("Drude permittivity diverges at xi = 0"));
                }
                1.0 + omega_p * omega_p / (xi * (xi + gamma))
            }
            DielectricModel::Plasma { omega_p } => {
                if xi == 0.0 {
                    return Ok(Permittivity::Infinite);
                }
                1.0 + (omega_p / xi).powi(2)
            }
            DielectricModel::Oscillators(terms) => {
                1.0 + terms
                    .iter()
                    .map(|o| o.strength * o.omega * o.omega / (o.omega * o.omega + xi * xi + o.gamma * xi))
                    .sum::<f64>()
            }
            DielectricModel::Tabulated(t) => {
                if xi == 0.0 {
                    return Err(Error::domain("tabulated Kramers-Kronig transform needs xi > 0"));
                }
                t.epsilon_imag(xi)?
            }
        };
        Ok(Permittivity::Finite(v))
    }
}

/// `ε(iξ)` of a model.
///
/// Drude at `ξ = 0` and negative `ξ` are domain errors. The perfect
/// conductor returns [`Permittivity::Infinite`].
pub fn epsilon_at_imaginary(model: &DielectricModel, xi: ImaginaryFrequency) -> Result<Permittivity> {
    model.eval(xi.xi())
}

/// `ε(iξ)` of a tabulated `ε″(ω)` spectrum via the Kramers–Kronig relation
/// `ε(iξ) = 1 + (2/π) ∫₀^∞ ω ε″(ω)/(ω² + ξ²) dω`.
pub fn kramers_kronig_imag(table: &TabulatedSpectrum, xi: ImaginaryFrequency) -> Result<f64> {
    table.validate()?;
    if xi.xi() <= 0.0 {
        return Err(Error::domain("Kramers-Kronig transform needs xi > 0"));
    }
    table.epsilon_imag(xi.xi())
}

/// A uniaxial crystal with its optic axis in the plate plane.
#[derive(Debug, Clone, PartialEq)]
pub struct UniaxialModel {
    pub ordinary: DielectricModel,
    pub extraordinary: DielectricModel,
}

impl UniaxialModel {
    pub fn new(ordinary: DielectricModel, extraordinary: DielectricModel) -> Result<Self> {
        ordinary.validate()?;
        extraordinary.validate()?;
        if ordinary.is_perfect_conductor() != extraordinary.is_perfect_conductor() {
            return Err(Error::invalid(
                "a uniaxial model cannot mix a perfect conductor with a finite permittivity",
            ));
        }
        Ok(UniaxialModel {
            ordinary,
            extraordinary,
        })
    }

    pub fn isotropic(model: DielectricModel) -> Self {
        UniaxialModel {
            ordinary: model.clone(),
            extraordinary: model,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.ordinary == self.extraordinary
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ev_to_rad_per_s;

    fn xi(v: f64) -> ImaginaryFrequency {
        ImaginaryFrequency::new(v).unwrap()
    }

    #[test]
    fn drude_at_plasma_frequency() {
        let (wp, g) = (1.3e16, 4.0e13);
        let m = DielectricModel::drude(wp, g).unwrap();
        let e = epsilon_at_imaginary(&m, xi(wp)).unwrap().finite().unwrap();
        assert!((e - (1.0 + wp / (wp + g))).abs() < 1e-15);
    }

    #[test]
    fn drude_gold_regression_value() {
        // 1 + wp²/(ξ(ξ+γ)) evaluated in 50-digit arithmetic
        let m = DielectricModel::drude(1.37e16, 5.32e13).unwrap();
        let e = m.eval(1e15).unwrap().finite().unwrap();
        let expected = 179.209_266_995_822_26;
        assert!((e / expected - 1.0).abs() < 1e-14, "{e}");
    }

    #[test]
    fn vacuum_is_one() {
        for v in [0.0, 1.0, 1e15, 1e20] {
            assert_eq!(DielectricModel::vacuum().eval(v).unwrap(), Permittivity::Finite(1.0));
        }
    }

    #[test]
    fn perfect_conductor_is_infinite() {
        assert_eq!(
            DielectricModel::PerfectConductor.eval(1e15).unwrap(),
            Permittivity::Infinite
        );
    }

    #[test]
    fn domain_errors() {
        let m = DielectricModel::drude(1e16, 1e13).unwrap();
        assert!(matches!(m.eval(0.0), Err(Error::Domain(_))));
        assert!(ImaginaryFrequency::new(-1.0).is_err());
        assert!(matches!(DielectricModel::vacuum().eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(DielectricModel::vacuum().eval(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DielectricModel::constant(0.5).is_err());
        assert!(DielectricModel::drude(-1.0, 0.0).is_err());
        assert!(DielectricModel::drude(1.0, -1.0).is_err());
        assert!(DielectricModel::plasma(0.0).is_err());
        assert!(DielectricModel::oscillators(vec![Oscillator {
            omega: 1.0,
            strength: 0.0,
            gamma: 0.0
        }])
        .is_err());
    }

    #[test]
    fn oscillator_sum() {
        let m = DielectricModel::oscillators(vec![
            Oscillator {
                omega: 2.0,
                strength: 1.5,
                gamma: 0.0,
            },
            Oscillator {
                omega: 10.0,
                strength: 0.5,
                gamma: 1.0,
            },
        ])
        .unwrap();
        let v = m.eval(3.0).unwrap().finite().unwrap();
        let expected = 1.0 + 1.5 * 4.0 / (4.0 + 9.0) + 0.5 * 100.0 / (100.0 + 9.0 + 3.0);
        assert!((v - expected).abs() < 1e-15);
        assert!((m.eval(0.0).unwrap().finite().unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn high_frequency_limit() {
        let wp = ev_to_rad_per_s(9.0);
        for m in [
            DielectricModel::drude(wp, ev_to_rad_per_s(0.035)).unwrap(),
            DielectricModel::plasma(wp).unwrap(),
        ] {
            let v = m.eval(1e6 * wp).unwrap().finite().unwrap();
            assert!((v - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn uniaxial_mixing_perfect_conductor_rejected() {
        assert!(UniaxialModel::new(DielectricModel::PerfectConductor, DielectricModel::vacuum()).is_err());
        let u = UniaxialModel::isotropic(DielectricModel::constant(2.0).unwrap());
        assert!(u.is_isotropic());
    }
}
