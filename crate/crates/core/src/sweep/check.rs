//! Quick invariant suite behind the `check` subcommand.

use num_complex::Complex64;

use crate::berry::{phase_trace, PhaseConvention};
use crate::dynamics::{
    amplitudes_dielectric, amplitudes_free, evolve, integrate_oracle, volterra_solve, Damping, DriveParams,
    Environment, InitialState, MarkovLorentzian, OracleSettings, Solver, Trajectory, UniformGrid,
};
use crate::error::Result;
use crate::permittivity::LorentzMedium;
use crate::quadrature::PvSettings;
use crate::surface::{line_shift_halfspace, line_shift_pv, AtomSurfaceConfig, MarkovKernel};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn grid(n: usize, t_end: f64) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

fn outcome(name: &'static str, value: Result<f64>, limit: f64) -> CheckOutcome {
    match value {
        Ok(v) => CheckOutcome { name, passed: v <= limit, detail: format!("{v:.3e} (limit {limit:.0e})") },
        Err(e) => CheckOutcome { name, passed: false, detail: e.to_string() },
    }
}

fn kramers_kronig() -> Result<f64> {
    let m = LorentzMedium::new(0.5, 1e-2)?;
    Ok(m.kramers_kronig_residual(0.5, &PvSettings::default())?.residual)
}

fn closed_vs_oracle() -> Result<f64> {
    let times = grid(200, 10.0);
    let ic = InitialState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8))?;
    let mut worst: f64 = 0.0;
    for (rabi, detuning, varpi, shift) in [(1.0, 0.0, 0.5, 0.0), (2.3, -1.1, 0.3, 1.7), (0.4, 0.9, 0.9, -3.2)] {
        let drive = DriveParams::new(rabi, detuning, 0.3)?;
        let kernel = MarkovKernel { varpi, shift };
        let oracle = integrate_oracle(&ic, Damping::from_kernel(&kernel), &drive, &times, &OracleSettings::default())?;
        let closed = Trajectory {
            points: times.iter().map(|&t| amplitudes_dielectric(t, &ic, &kernel, &drive)).collect(),
        };
        worst = worst.max(closed.sup_distance(&oracle));
    }
    Ok(worst)
}

fn reduction() -> Result<f64> {
    let ic = InitialState::equal_superposition();
    let drive = DriveParams::new(1.3, 0.2, 0.0)?;
    let kernel = MarkovKernel { varpi: 0.5, shift: 0.0 };
    Ok(grid(99, 10.0)
        .into_iter()
        .map(|t| {
            let a = amplitudes_dielectric(t, &ic, &kernel, &drive);
            let b = amplitudes_free(t, &ic, 1.0, &drive);
            (a.c1 - b.c1).norm().max((a.c2 - b.c2).norm())
        })
        .fold(0.0, f64::max))
}

fn norm_growth() -> Result<f64> {
    let ic = InitialState::equal_superposition();
    let env = Environment::HalfSpace(MarkovKernel { varpi: 0.2404, shift: 3.0043 });
    let traj = evolve(&env, &ic, &DriveParams::resonant(0.4808), Solver::Closed, &grid(400, 10.0))?;
    Ok(traj.max_norm_increase().max(0.0))
}

fn vanishing_phase() -> Result<f64> {
    let ic = InitialState::new(Complex64::new(1.0, 0.0), Complex64::default())?;
    let trace = phase_trace(
        &ic,
        &Environment::FreeSpace { gamma0: 1.0 },
        50.0,
        &DriveParams::resonant(1.0),
        Solver::Closed,
        &grid(1000, 10.0),
        PhaseConvention::Arcsin,
    )?;
    Ok(trace.points.iter().map(|p| p.y.abs().max(p.phi_t.abs())).fold(0.0, f64::max))
}

fn line_shift() -> Result<f64> {
    let cfg = AtomSurfaceConfig::new(0.8, 0.05, LorentzMedium::new(0.5, 1e-2)?);
    let pv = line_shift_pv(&cfg, &PvSettings::default())?;
    let closed = line_shift_halfspace(&cfg)?;
    Ok(((pv.value - closed) / closed).abs())
}

fn volterra() -> Result<f64> {
    let ic = InitialState::equal_superposition();
    let drive = DriveParams::resonant(1.0);
    let density = MarkovLorentzian::new(Damping::free(1.0), 1e6)?;
    let traj = volterra_solve(&ic, &density, &drive, &UniformGrid::new(5.0, 500)?)?;
    Ok(traj
        .points
        .iter()
        .map(|p| {
            let e = amplitudes_free(p.t, &ic, 1.0, &drive);
            (p.c1 - e.c1).norm().max((p.c2 - e.c2).norm())
        })
        .fold(0.0, f64::max))
}

pub fn run_checks() -> Vec<CheckOutcome> {
    vec![
        outcome("kramers-kronig residual", kramers_kronig(), 1e-3),
        outcome("closed form vs oracle", closed_vs_oracle(), 1e-8),
        outcome("vacuum reduction", reduction(), 1e-12),
        outcome("norm growth", norm_growth(), 1e-10),
        outcome("vanishing phase", vanishing_phase(), 1e-12),
        outcome("line shift dispersion (relative)", line_shift(), 0.05),
        outcome("volterra vs markov", volterra(), 1e-3),
    ]
}
