//! Physical constants (CODATA 2018, SI) and unit conversions used at the
//! library boundary. Everything inside the crate is SI.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.997_924_58e8;

/// Elementary charge, C. Used for eV <-> rad/s conversion.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// `hbar * c`, J·m.
pub const HBAR_C: f64 = HBAR * C;

/// The constants as a value, for code that wants to carry them around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants { hbar: HBAR, c: C };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// Photon energy in eV to angular frequency in rad/s.
pub fn ev_to_rad_per_s(ev: f64) -> f64 {
    ev * ELEMENTARY_CHARGE / HBAR
}

/// Angular frequency in rad/s to photon energy in eV.
pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR / ELEMENTARY_CHARGE
}

/// Vacuum wavelength (m) of an angular frequency (rad/s): `2πc/ω`.
pub fn wavelength_of(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / omega
}

/// Angular frequency (rad/s) of a vacuum wavelength (m).
pub fn omega_of_wavelength(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gold_plasma_frequency_conversion() {
        let w = ev_to_rad_per_s(9.0);
        assert!((w / 1.367e16 - 1.0).abs() < 1e-3, "{w}");
        assert!((rad_per_s_to_ev(w) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn wavelength_round_trip() {
        let lam = 0.3e-6;
        assert!((wavelength_of(omega_of_wavelength(lam)) - lam).abs() < 1e-21);
    }
}
