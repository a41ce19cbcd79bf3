//! Single-resonance Drude-Lorentz permittivity.
//!
//! All frequencies are measured in units of the transverse resonance
//! frequency ω_T, so the model reads ε(ω) = 1 + ω_p² / (1 − ω² − iωγ).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{principal_value, PvSettings};

/// Upper cutoff of the Kramers-Kronig dispersion integral, in ω_T.
pub const KK_CUTOFF: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzMedium {
    omega_p: f64,
    gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPermittivity {
    pub re: f64,
    pub im: f64,
}

impl ComplexPermittivity {
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexPermittivity {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Result of the numerical causality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KramersKronigResidual {
    pub residual: f64,
    /// Real part reconstructed from the absorption spectrum.
    pub reconstructed: f64,
    /// Quadrature error estimate plus the analytic tail bound.
    pub error: f64,
}

impl LorentzMedium {
    /// `omega_p = 0` is accepted as the vacuum limit; `gamma` must be positive.
    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p >= 0.0) {
            return Err(Error::Domain(format!("omega_p must be >= 0, got {omega_p}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(Self { omega_p, gamma })
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_vacuum(&self) -> bool {
        self.omega_p == 0.0
    }

    pub fn permittivity(&self, omega: f64) -> Result<ComplexPermittivity> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
        }
        Ok(self.eval(omega).into())
    }

    pub(crate) fn eval(&self, omega: f64) -> Complex64 {
        let denom = Complex64::new(1.0 - omega * omega, -omega * self.gamma);
        1.0 + self.omega_p * self.omega_p / denom
    }

    /// Transverse and longitudinal edges `(1, sqrt(1 + ω_p²))`.
    pub fn band_edges(&self) -> (f64, f64) {
        (1.0, (1.0 + self.omega_p * self.omega_p).sqrt())
    }

    /// Membership in the lossless band gap, open at both edges.
    pub fn in_band_gap(&self, omega: f64) -> bool {
        let (lo, hi) = self.band_edges();
        omega > lo && omega < hi
    }

    /// Frequency where Re ε = −1 in the lossless limit, i.e. the surface
    /// resonance of the half-space.
    pub fn surface_resonance(&self) -> f64 {
        (1.0 + 0.5 * self.omega_p * self.omega_p).sqrt()
    }

    /// Frequencies at which ε and the half-space response vary sharply.
    pub fn features(&self) -> Vec<f64> {
        let (t, l) = self.band_edges();
        let mut f = vec![t, self.surface_resonance(), l];
        f.dedup();
        f
    }

    /// |ε_R(ω) − 1 − (2/π) PV ∫₀^∞ ω′ε_I(ω′)/(ω′² − ω²) dω′|.
    pub fn kramers_kronig_residual(&self, omega: f64, settings: &PvSettings) -> Result<KramersKronigResidual> {
        let eps = self.permittivity(omega)?;
        if (omega - 1.0).abs() < self.gamma {
            return Err(Error::Domain(format!(
                "frequency {omega} is within one linewidth of the resonance"
            )));
        }
        if self.is_vacuum() {
            return Ok(KramersKronigResidual {
                residual: (eps.re - 1.0).abs(),
                reconstructed: 0.0,
                error: 0.0,
            });
        }
        // ω′/(ω′² − ω²) = [1/(ω′ + ω)] / (ω′ − ω)
        let g = |w: f64| w * self.eval(w).im / (w + omega);
        let est = principal_value(g, omega, 0.0, KK_CUTOFF, &self.features(), settings)?;
        // ε_I ~ ω_p²γ/ω³ beyond the cutoff, so the tail is ω_p²γ/(3Ω³).
        let tail = self.omega_p.powi(2) * self.gamma / (3.0 * KK_CUTOFF.powi(3));
        let reconstructed = 2.0 / PI * (est.value + tail);
        Ok(KramersKronigResidual {
            residual: (eps.re - 1.0 - reconstructed).abs(),
            reconstructed,
            error: 2.0 / PI * (est.error + tail),
        })
    }
}
