//! Global magnetic parameters.
//!
//! Everything is in dimensionless units; the magnetic length is the only
//! free parameter and every derived constant is computed once here.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnetic length together with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticConfig {
    ell: f64,
    omega_ell: f64,
    idos_scale: f64,
}

impl MagneticConfig {
    /// Builds a configuration for magnetic length `ell`.
    pub fn new(ell: f64) -> Result<Self> {
        if !ell.is_finite() || ell <= 0.0 {
            return Err(Error::Domain(format!(
                "magnetic length must be positive and finite (got {ell})"
            )));
        }
        let omega_ell = PI * (2.0 * ell).powi(2);
        let idos_scale = 1.0 / (2.0 * PI * ell * ell);
        let cfg = Self {
            ell,
            omega_ell,
            idos_scale,
        };
        debug_assert!((cfg.idos_scale * cfg.omega_ell / 2.0 - 1.0).abs() < 8.0 * f64::EPSILON);
        Ok(cfg)
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// Area of the magnetic disk of radius `2ℓ`.
    pub fn omega_ell(&self) -> f64 {
        self.omega_ell
    }

    /// Scale factor `(2πℓ²)⁻¹` relating the canonical trace to the IDOS.
    pub fn idos_scale(&self) -> f64 {
        self.idos_scale
    }

    /// Prefactor `√(2π)·ℓ` of the kernel series.
    pub fn kernel_prefactor(&self) -> f64 {
        (2.0 * PI).sqrt() * self.ell
    }

    /// Phase constant `1/(2ℓ²)` of the magnetic translations.
    pub fn phase_constant(&self) -> f64 {
        0.5 / (self.ell * self.ell)
    }
}

impl Default for MagneticConfig {
    fn default() -> Self {
        Self::new(1.0).expect("unit magnetic length is valid")
    }
}

/// Shorthand for [`MagneticConfig::new`].
pub fn make_config(ell: f64) -> Result<MagneticConfig> {
    MagneticConfig::new(ell)
}
