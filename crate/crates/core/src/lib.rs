//! Pumped two-level atom near a Drude-Lorentz half-space: permittivity,
//! surface-modified decay and line shift, amplitude dynamics and the total
//! phase, with sweep and output tooling.

pub mod berry;
pub mod dynamics;
pub mod error;
pub mod permittivity;
pub mod quadrature;
pub mod surface;
pub mod sweep;

pub use error::{Error, Result};
