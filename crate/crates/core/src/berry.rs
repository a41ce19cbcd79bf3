//! Total phase of the driven two-level state relative to its initial value.
//!
//! With the overlap `X + iY = C₁*(0)C₁(t) + C₂*(0)C₂(t)e^{−iω₀t}` the total
//! phase is `φ_t = −arcsin(Y/√(X² + Y²))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, AmplitudePair, DriveParams, Environment, InitialState, Solver};
use crate::error::{Error, Result};

/// Below this overlap magnitude the phase is reported as undefined.
pub const UNDERFLOW: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseConvention {
    /// `−arcsin(Y/r)`, in [−π/2, π/2].
    #[default]
    Arcsin,
    /// The full angle with the same sine, `atan2(−Y, X)`, in (−π, π].
    Atan2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub phi_t: f64,
    pub defined: bool,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, convention: PhaseConvention) -> Self {
        match total_phase(x, y, convention) {
            Some(phi_t) => Self { x, y, phi_t, defined: true },
            None => Self { x, y, phi_t: f64::NAN, defined: false },
        }
    }
}

/// Real and imaginary parts of the overlap with the initial state.
/// `omega0_t` is the optical phase ω₀t.
pub fn overlap_xy(ic: &InitialState, amps: &AmplitudePair, omega0_t: f64) -> (f64, f64) {
    let fast = Complex64::from_polar(1.0, -omega0_t);
    let z = ic.c1.conj() * amps.c1 + ic.c2.conj() * amps.c2 * fast;
    (z.re, z.im)
}

/// `None` when X² + Y² underflows.
pub fn total_phase(x: f64, y: f64, convention: PhaseConvention) -> Option<f64> {
    let r = x.hypot(y);
    if !(r >= UNDERFLOW) {
        return None;
    }
    Some(match convention {
        PhaseConvention::Arcsin => -(y / r).clamp(-1.0, 1.0).asin(),
        PhaseConvention::Atan2 => {
            let phi = (-y).atan2(x);
            if phi <= -PI {
                PI
            } else {
                phi
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    /// (|C₁|², |C₂|²) per time.
    pub populations: Vec<(f64, f64)>,
}

impl PhaseTrace {
    /// Checks populations and the phase/overlap relation.
    pub fn validate(&self) -> Result<()> {
        let mut prev = f64::INFINITY;
        for (i, &(p1, p2)) in self.populations.iter().enumerate() {
            let in_range = |p: f64| (-1e-12..=1.0 + 1e-12).contains(&p);
            if !in_range(p1) || !in_range(p2) {
                return Err(Error::Invariant(format!("population out of [0, 1] at index {i}")));
            }
            if p1 + p2 > prev + 1e-10 {
                return Err(Error::Invariant(format!("norm increased at index {i}")));
            }
            prev = p1 + p2;
        }
        for (i, p) in self.points.iter().enumerate().filter(|(_, p)| p.defined) {
            let r = p.x.hypot(p.y);
            if (p.phi_t.sin() * r + p.y).abs() > 1e-12 * r.max(1.0) {
                return Err(Error::Invariant(format!("phase does not match overlap at index {i}")));
            }
        }
        Ok(())
    }
}

/// Amplitudes, overlaps, phases and populations on `times`.
/// `omega0_over_gamma0` sets the optical phase ω₀t = (ω₀/Γ₀)(Γ₀t).
pub fn phase_trace(
    ic: &InitialState,
    env: &Environment,
    omega0_over_gamma0: f64,
    drive: &DriveParams,
    solver: Solver,
    times: &[f64],
    convention: PhaseConvention,
) -> Result<PhaseTrace> {
    if !(omega0_over_gamma0.is_finite() && omega0_over_gamma0 > 0.0) {
        return Err(Error::Domain(format!("omega0/Gamma0 must be > 0, got {omega0_over_gamma0}")));
    }
    let traj = evolve(env, ic, drive, solver, times)?;
    let points = traj
        .points
        .iter()
        .map(|a| {
            let (x, y) = overlap_xy(ic, a, omega0_over_gamma0 * a.t);
            PhasePoint::new(x, y, convention)
        })
        .collect();
    Ok(PhaseTrace {
        times: times.to_vec(),
        points,
        populations: traj.points.iter().map(AmplitudePair::populations).collect(),
    })
}
