//! Casimir forces, torques and cavity energies from fluctuation theory at
//! imaginary frequencies, together with the distance-calibration error
//! analysis that limits force metrology at the percent level.
//!
//! All quantities are SI. Energies and pressures carry their physical sign:
//! attraction is negative.

pub mod calibration;
pub mod cavity;
pub mod constants;
pub mod error;
pub mod lifshitz;
pub mod materials;
pub mod optimize;
pub mod pfa;
pub mod quadrature;
pub mod torque;

pub use error::{Error, QuadDiagnostics, Result};
