//! Memory-kernel form of the amplitude equations,
//!
//! ```text
//! C₂(t) = C₂(0) + ∫₀ᵗ i(Ω/2) e^{−iϑ} e^{−iΔs} C₁(s) ds + ∫₀ᵗ 𝒦(t − τ) C₂(τ) dτ
//! C₁(t) = C₁(0) + ∫₀ᵗ i(Ω/2) e^{iϑ} e^{iΔs} C₂(s) ds
//! ```
//!
//! with `𝒦(τ) = ∫ J(ν) (e^{−iντ} − 1)/(iν) dν` built from a spectral density
//! J over the offset ν from the atomic frequency. Solved by trapezoidal
//! product integration on a uniform grid.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::closed_form::phi1;
use super::{AmplitudePair, Damping, DriveParams, InitialState, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, QuadSettings, GL8_NODES, GL8_WEIGHTS};

const MAX_FIXED_POINT_ITERATIONS: usize = 50;
const FIXED_POINT_TOL: f64 = 2e-15;
/// Geometric refinement levels of the first kernel cell toward τ = 0.
const GRADING_LEVELS: i32 = 40;

pub trait SpectralDensity {
    /// J(ν), in units of Γ₀.
    fn density(&self, nu: f64) -> f64;

    /// Finite interval carrying the density.
    fn support(&self) -> (f64, f64);

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn quad_settings(&self) -> QuadSettings {
        QuadSettings::default()
    }

    /// 𝒦(τ), by frequency quadrature unless overridden.
    fn integrated_kernel(&self, tau: f64) -> Result<Complex64> {
        let (lo, hi) = self.support();
        let mut breaks = self.breakpoints();
        breaks.push(0.0);
        let est = integrate_with_breaks(
            |nu: f64| {
                // (e^{−iντ} − 1)/(iν) = −τ·φ₁(−iντ)
                -tau * phi1(Complex64::new(0.0, -nu * tau)) * self.density(nu)
            },
            lo,
            hi,
            &breaks,
            &self.quad_settings(),
        )?;
        Ok(est.value)
    }
}

/// Lorentzian density whose kernel tends to `−d·δ(τ)` as the width grows:
/// `J(ν) = (aλ² + bλν) / (π(λ² + ν²))` with `d = a − ib`, so that
/// `K(τ) = −dλe^{−λτ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovLorentzian {
    damping: Complex64,
    width: f64,
}

impl MarkovLorentzian {
    pub fn new(damping: Damping, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Domain(format!("memory width must be > 0, got {width}")));
        }
        if !(damping.0.re >= 0.0) || !damping.0.im.is_finite() {
            return Err(Error::Domain(format!("damping must have Re >= 0, got {}", damping.0)));
        }
        Ok(Self { damping: damping.0, width })
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

impl SpectralDensity for MarkovLorentzian {
    fn density(&self, nu: f64) -> f64 {
        let l = self.width;
        let (a, b) = (self.damping.re, -self.damping.im);
        (a * l * l + b * l * nu) / (PI * (l * l + nu * nu))
    }

    fn support(&self) -> (f64, f64) {
        (-1e4 * self.width, 1e4 * self.width)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.width, self.width]
    }

    fn integrated_kernel(&self, tau: f64) -> Result<Complex64> {
        // −d(1 − e^{−λτ}) = −dλτ·φ₁(−λτ)
        Ok(-self.damping * self.width * tau * phi1(Complex64::new(-self.width * tau, 0.0)))
    }
}

/// No coupling to the field: pure Rabi dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZeroDensity;

impl SpectralDensity for ZeroDensity {
    fn density(&self, _nu: f64) -> f64 {
        0.0
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn integrated_kernel(&self, _tau: f64) -> Result<Complex64> {
        Ok(Complex64::default())
    }
}

/// Density given by a closure over a finite support.
pub struct FnDensity<F> {
    f: F,
    support: (f64, f64),
    breaks: Vec<f64>,
    settings: QuadSettings,
}

impl<F: Fn(f64) -> f64> FnDensity<F> {
    pub fn new(f: F, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("density support [{lo}, {hi}] is not a finite interval")));
        }
        Ok(Self { f, support: (lo, hi), breaks: Vec::new(), settings: QuadSettings::default() })
    }

    pub fn with_breakpoints(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn with_settings(mut self, settings: QuadSettings) -> Self {
        self.settings = settings;
        self
    }
}

impl<F: Fn(f64) -> f64> SpectralDensity for FnDensity<F> {
    fn density(&self, nu: f64) -> f64 {
        (self.f)(nu)
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }

    fn quad_settings(&self) -> QuadSettings {
        self.settings
    }
}

/// `t_n = n·dt` for `n = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub dt: f64,
    pub steps: usize,
}

impl UniformGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::Domain(format!(
                "uniform grid needs t_end > 0 and at least one step, got {t_end} and {steps}"
            )));
        }
        Ok(Self { dt: t_end / steps as f64, steps })
    }

    /// Recovers the grid from explicit times, which must start at 0 and be
    /// evenly spaced.
    pub fn from_times(times: &[f64]) -> Result<Self> {
        match times {
            [] => Err(Error::Domain("empty time grid".into())),
            [t0, ..] if *t0 != 0.0 => Err(Error::Domain(format!("time grid must start at 0, got {t0}"))),
            [_] => Ok(Self { dt: 0.0, steps: 0 }),
            [.., last] => {
                let grid = Self::new(*last, times.len() - 1)?;
                for (n, &t) in times.iter().enumerate() {
                    if (t - grid.time(n)).abs() > 1e-9 * last.abs() {
                        return Err(Error::Domain(format!("time grid is not uniform at index {n}")));
                    }
                }
                Ok(grid)
            }
        }
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|n| self.time(n)).collect()
    }
}

/// Weights of C₂ at the right and left ends of each kernel cell
/// `[m·dt, (m+1)·dt]` for a C₂ linear across the cell.
fn product_weights<S: SpectralDensity + ?Sized>(density: &S, grid: &UniformGrid) -> Result<Vec<(Complex64, Complex64)>> {
    let h = grid.dt;
    let mut weights = Vec::with_capacity(grid.steps);
    for m in 0..grid.steps {
        let a = m as f64 * h;
        let b = a + h;
        let mut cells = Vec::new();
        if m == 0 {
            let mut hi = h;
            for _ in 0..GRADING_LEVELS {
                cells.push((0.5 * hi, hi));
                hi *= 0.5;
            }
            cells.push((0.0, hi));
        } else {
            cells.push((a, b));
        }
        let mut right = Complex64::default();
        let mut left = Complex64::default();
        for (lo, hi) in cells {
            let (center, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (&x, &w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
                let u = center + half * x;
                let k = density.integrated_kernel(u)? * (w * half);
                right += k * ((b - u) / h);
                left += k * ((u - a) / h);
            }
        }
        weights.push((right, left));
    }
    Ok(weights)
}

/// Trapezoidal product integration of the memory-kernel equations on `grid`.
///
/// Each step is implicit in (C₁, C₂); it is resolved by a Gauss-Seidel
/// fixed-point iteration with the instantaneous kernel weight kept on the
/// left-hand side.
pub fn volterra_solve<S: SpectralDensity + ?Sized>(
    ic: &InitialState,
    density: &S,
    drive: &DriveParams,
    grid: &UniformGrid,
) -> Result<Trajectory> {
    let h = grid.dt;
    let weights = product_weights(density, grid)?;
    let coupling = Complex64::new(0.0, 0.5 * drive.rabi);
    let up = |t: f64| coupling * Complex64::from_polar(1.0, drive.phase + drive.detuning * t);
    let down = |t: f64| coupling * Complex64::from_polar(1.0, -(drive.phase + drive.detuning * t));

    let mut c1 = Vec::with_capacity(grid.steps + 1);
    let mut c2 = Vec::with_capacity(grid.steps + 1);
    c1.push(ic.c1);
    c2.push(ic.c2);
    let mut drive1 = Complex64::default();
    let mut drive2 = Complex64::default();

    for n in 1..=grid.steps {
        let (t_prev, t_n) = (grid.time(n - 1), grid.time(n));
        let mut memory = Complex64::default();
        for m in 1..n {
            memory += weights[m].0 * c2[n - m];
        }
        for m in 0..n {
            memory += weights[m].1 * c2[n - m - 1];
        }
        let old1 = 0.5 * h * up(t_prev) * c2[n - 1];
        let old2 = 0.5 * h * down(t_prev) * c1[n - 1];
        let base1 = ic.c1 + drive1 + old1;
        let base2 = ic.c2 + drive2 + old2 + memory;
        let (a1, a2) = (0.5 * h * up(t_n), 0.5 * h * down(t_n));
        let diag = 1.0 - weights[0].0;
        if diag.norm() < f64::EPSILON {
            return Err(Error::Singular(format!("instantaneous kernel weight equals 1 at step {n}")));
        }

        let (mut x1, mut x2) = (c1[n - 1], c2[n - 1]);
        let mut converged = false;
        let mut delta = f64::INFINITY;
        for _ in 0..MAX_FIXED_POINT_ITERATIONS {
            let y1 = base1 + a1 * x2;
            let y2 = (base2 + a2 * y1) / diag;
            delta = (y1 - x1).norm().max((y2 - x2).norm());
            x1 = y1;
            x2 = y2;
            if delta <= FIXED_POINT_TOL * (x1.norm() + x2.norm()) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::FixedPoint { step: n, residual: delta });
        }
        drive1 += old1 + a1 * x2;
        drive2 += old2 + a2 * x1;
        c1.push(x1);
        c2.push(x2);
    }

    Ok(Trajectory {
        points: (0..=grid.steps)
            .map(|n| AmplitudePair { t: grid.time(n), c1: c1[n], c2: c2[n] })
            .collect(),
    })
}
