//! Evolution of the pumped amplitudes C₁(t), C₂(t).
//!
//! Both environments reduce to the same pair of equations,
//!
//! ```text
//! Ċ₁ = i(Ω/2) e^{iϑ} e^{iΔt} C₂
//! Ċ₂ = i(Ω/2) e^{−iϑ} e^{−iΔt} C₁ − d·C₂
//! ```
//!
//! with a complex damping `d`: `d = Γ₀` in free space and `d = 2ϖ − iδω₀` near
//! the half-space. Time is measured in units of Γ₀⁻¹.

mod closed_form;
mod oracle;
mod volterra;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::MarkovKernel;

pub use closed_form::{amplitudes, amplitudes_dielectric, amplitudes_free, roots_dielectric, roots_free};
pub use oracle::{integrate_oracle, OracleSettings};
pub use volterra::{
    volterra_solve, FnDensity, MarkovLorentzian, SpectralDensity, UniformGrid, ZeroDensity,
};

/// Relative separation below which two characteristic roots are treated as one.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Ω_pmp in Γ₀ units.
    pub rabi: f64,
    /// Δ_p = ω_pmp − ω₀ in Γ₀ units.
    pub detuning: f64,
    /// ϑ_pmp in radians.
    pub phase: f64,
}

impl DriveParams {
    pub fn new(rabi: f64, detuning: f64, phase: f64) -> Result<Self> {
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(Error::Domain(format!("Rabi frequency must be >= 0, got {rabi}")));
        }
        if !detuning.is_finite() || !phase.is_finite() {
            return Err(Error::Domain("detuning and pump phase must be finite".into()));
        }
        Ok(Self { rabi, detuning, phase })
    }

    pub fn resonant(rabi: f64) -> Self {
        Self { rabi, detuning: 0.0, phase: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl InitialState {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let norm = c1.norm_sqr() + c2.norm_sqr();
        if !norm.is_finite() || norm > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "|C1(0)|^2 + |C2(0)|^2 must not exceed 1, got {norm}"
            )));
        }
        Ok(Self { c1, c2 })
    }

    /// C₁(0) = C₂(0) = 1/√2.
    pub fn equal_superposition() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c1: a, c2: a }
    }

    pub fn norm(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub t: f64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl AmplitudePair {
    pub fn populations(&self) -> (f64, f64) {
        (self.c1.norm_sqr(), self.c2.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<AmplitudePair>,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    /// Largest step-to-step growth of |C₁|² + |C₂|² (≤ 0 for a decaying run).
    pub fn max_norm_increase(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].norm() - w[0].norm())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// sup_t max(|ΔC₁|, |ΔC₂|) against another trajectory on the same grid.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a.c1 - b.c1).norm().max((a.c2 - b.c2).norm()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoots {
    pub r1: Complex64,
    pub r2: Complex64,
    pub degenerate: bool,
}

/// Coefficient `d` of the C₂ decay term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Damping(pub Complex64);

impl Damping {
    /// Free space: the full rate Γ₀ appears in the amplitude equation.
    pub fn free(gamma0: f64) -> Self {
        Self(Complex64::new(gamma0, 0.0))
    }

    /// Half-space: `2ϖ − iδω₀`, the free-space convention with Γ₀ → Γ³².
    /// The vacuum kernel (ϖ = ½, δω₀ = 0) gives exactly `Damping::free(1.0)`.
    pub fn from_kernel(kernel: &MarkovKernel) -> Self {
        Self(Complex64::new(2.0 * kernel.varpi, -kernel.shift))
    }

    /// Amplitude-equation rate constant, `−d`.
    pub fn rate(&self) -> Complex64 {
        -self.0
    }
}

/// Where the atom sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Environment {
    FreeSpace { gamma0: f64 },
    HalfSpace(MarkovKernel),
}

impl Environment {
    pub fn damping(&self) -> Damping {
        match self {
            Environment::FreeSpace { gamma0 } => Damping::free(*gamma0),
            Environment::HalfSpace(k) => Damping::from_kernel(k),
        }
    }

    /// Rate scale used in the degeneracy test.
    pub fn rate_scale(&self) -> f64 {
        match self {
            Environment::FreeSpace { gamma0 } => *gamma0,
            Environment::HalfSpace(_) => 1.0,
        }
    }

    /// ϖ of this environment: Γ₀/2 in free space.
    pub fn varpi(&self) -> f64 {
        match self {
            Environment::FreeSpace { gamma0 } => 0.5 * gamma0,
            Environment::HalfSpace(k) => k.varpi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Residue-theorem closed forms.
    Closed,
    /// Adaptive Runge-Kutta integration of the amplitude equations.
    Oracle,
    /// Product-integration of the memory-kernel form, using a Markov-matched
    /// Lorentzian kernel of the given width (Γ₀ units).
    Volterra { memory_width: f64 },
}

/// Trajectory of the given environment on `times` (monotone, starting at 0
/// for the integrating solvers; uniform for `Volterra`).
pub fn evolve(
    env: &Environment,
    ic: &InitialState,
    drive: &DriveParams,
    solver: Solver,
    times: &[f64],
) -> Result<Trajectory> {
    let damping = env.damping();
    match solver {
        Solver::Closed => {
            let roots = closed_form::roots(damping, drive, env.rate_scale());
            Ok(Trajectory {
                points: times
                    .iter()
                    .map(|&t| amplitudes(t, ic, damping, drive, &roots))
                    .collect(),
            })
        }
        Solver::Oracle => integrate_oracle(ic, damping, drive, times, &OracleSettings::default()),
        Solver::Volterra { memory_width } => {
            let grid = UniformGrid::from_times(times)?;
            let density = MarkovLorentzian::new(damping, memory_width)?;
            let mut traj = volterra_solve(ic, &density, drive, &grid)?;
            for (p, &t) in traj.points.iter_mut().zip(times) {
                p.t = t;
            }
            Ok(traj)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_kernel_matches_free_damping() {
        let k = MarkovKernel { varpi: 0.5, shift: 0.0 };
        assert_eq!(Damping::from_kernel(&k), Damping::free(1.0));
    }

    #[test]
    fn initial_state_normalisation() {
        assert!(InitialState::new(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)).is_err());
        assert!(InitialState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).is_ok());
        assert!((InitialState::equal_superposition().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_rabi_rejected() {
        assert!(DriveParams::new(-1.0, 0.0, 0.0).is_err());
    }
}
