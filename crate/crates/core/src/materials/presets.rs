//! Named material presets.
//!
//! Parameters here are configuration defaults, not reference data. The HSM
//! entries in particular are stand-ins: only the visible-range reflectivity of
//! hydrogen switchable mirrors is known, not their full dielectric function.

use crate::constants::ev_to_rad_per_s;
use crate::error::{Error, Result};

use super::{DielectricModel, Oscillator, UniaxialModel};

#[derive(Debug, Clone, PartialEq)]
pub enum PresetModel {
    Isotropic(DielectricModel),
    Uniaxial(UniaxialModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub model: PresetModel,
}

impl Preset {
    pub fn isotropic(&self) -> Option<&DielectricModel> {
        match &self.model {
            PresetModel::Isotropic(m) => Some(m),
            PresetModel::Uniaxial(_) => None,
        }
    }

    /// Uniaxial view; isotropic presets become a degenerate uniaxial model.
    pub fn uniaxial(&self) -> UniaxialModel {
        match &self.model {
            PresetModel::Isotropic(m) => UniaxialModel::isotropic(m.clone()),
            PresetModel::Uniaxial(u) => u.clone(),
        }
    }
}

fn osc(omega: f64, strength: f64) -> Oscillator {
    Oscillator {
        omega,
        strength,
        gamma: 0.0,
    }
}

/// LiNbO₃ as two undamped oscillators per axis: an IR phonon term and a UV
/// electronic term. Static values ε_o = 44, ε_e = 29 (clamped crystal),
/// optical values n_o² ≈ 4.9, n_e² ≈ 4.5.
fn linbo3() -> UniaxialModel {
    let uv = ev_to_rad_per_s(5.9);
    UniaxialModel {
        ordinary: DielectricModel::Oscillators(vec![osc(4.7e13, 39.1), osc(uv, 3.9)]),
        extraordinary: DielectricModel::Oscillators(vec![osc(5.2e13, 24.5), osc(uv, 3.5)]),
    }
}

/// The full preset catalogue.
pub fn builtin_presets() -> Vec<Preset> {
    let au_wp = ev_to_rad_per_s(9.0);
    let au_g = ev_to_rad_per_s(0.035);
    vec![
        Preset {
            name: "perfect-conductor",
            description: "ideal metal, r_TM = 1, r_TE = -1",
            model: PresetModel::Isotropic(DielectricModel::PerfectConductor),
        },
        Preset {
            name: "vacuum",
            description: "eps = 1, no reflection",
            model: PresetModel::Isotropic(DielectricModel::vacuum()),
        },
        Preset {
            name: "gold-drude",
            description: "gold, Drude with omega_p = 9.0 eV, gamma = 0.035 eV",
            model: PresetModel::Isotropic(DielectricModel::Drude {
                omega_p: au_wp,
                gamma: au_g,
            }),
        },
        Preset {
            name: "gold-plasma",
            description: "gold, dissipationless plasma model with omega_p = 9.0 eV",
            model: PresetModel::Isotropic(DielectricModel::Plasma { omega_p: au_wp }),
        },
        Preset {
            name: "copper-drude",
            description: "copper, Drude with omega_p = 8.9 eV, gamma = 0.0406 eV",
            model: PresetModel::Isotropic(DielectricModel::Drude {
                omega_p: ev_to_rad_per_s(8.9),
                gamma: ev_to_rad_per_s(0.0406),
            }),
        },
        Preset {
            name: "palladium-drude",
            description: "palladium, Drude with omega_p = 5.46 eV, gamma = 0.0154 eV",
            model: PresetModel::Isotropic(DielectricModel::Drude {
                omega_p: ev_to_rad_per_s(5.46),
                gamma: ev_to_rad_per_s(0.0154),
            }),
        },
        Preset {
            name: "polystyrene",
            description: "polystyrene, IR + UV oscillators, eps(0) = 2.55",
            model: PresetModel::Isotropic(DielectricModel::Oscillators(vec![
                osc(5.54e14, 0.2),
                osc(1.11e16, 1.35),
            ])),
        },
        Preset {
            name: "silicon-dioxide",
            description: "fused silica, IR + UV oscillators, eps(0) = 3.8",
            model: PresetModel::Isotropic(DielectricModel::Oscillators(vec![
                osc(2.0e14, 1.7),
                osc(2.0e16, 1.1),
            ])),
        },
        Preset {
            name: "hsm-reflective-standin",
            description: "STAND-IN for a hydrogen switchable mirror in air: weak Drude metal (omega_p = 3.0 eV, gamma = 0.5 eV); not measured data",
            model: PresetModel::Isotropic(DielectricModel::Drude {
                omega_p: ev_to_rad_per_s(3.0),
                gamma: ev_to_rad_per_s(0.5),
            }),
        },
        Preset {
            name: "hsm-transparent-standin",
            description: "STAND-IN for a hydrided switchable mirror: wide-gap insulator, UV oscillator at 5 eV with eps(0) = 4.5; not measured data",
            model: PresetModel::Isotropic(DielectricModel::Oscillators(vec![osc(
                ev_to_rad_per_s(5.0),
                3.5,
            )])),
        },
        Preset {
            name: "linbo3",
            description: "lithium niobate, uniaxial; ordinary/extraordinary two-oscillator fits, eps(0) = 44/29",
            model: PresetModel::Uniaxial(linbo3()),
        },
        Preset {
            name: "linbo3-ordinary",
            description: "lithium niobate ordinary permittivity",
            model: PresetModel::Isotropic(linbo3().ordinary),
        },
        Preset {
            name: "linbo3-extraordinary",
            description: "lithium niobate extraordinary permittivity",
            model: PresetModel::Isotropic(linbo3().extraordinary),
        },
    ]
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    builtin_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::NotFound(format!("no material preset named {name:?}")))
}
