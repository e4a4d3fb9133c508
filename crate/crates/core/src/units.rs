//! Unit system configuration.

use crate::error::ensure_finite;
use crate::{Error, Result};

/// Planck constant and particle mass used to translate between moment
/// expectation values and phase-space covariances. Both default to 1
/// (natural units); every formula in the crate carries them explicitly.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        ensure_finite(hbar, "hbar")?;
        ensure_finite(mass, "mass")?;
        if hbar <= 0.0 || mass <= 0.0 {
            return Err(Error::domain("hbar and mass must be positive"));
        }
        Ok(Self { hbar, mass })
    }

    /// Smallest Casimir value a physical state can have (`hbar^2 / 4`).
    pub fn casimir_floor(&self) -> f64 {
        0.25 * self.hbar * self.hbar
    }
}
