//! Independent numerical integration of the amplitude equations in the lab
//! frame, with an embedded Dormand-Prince 5(4) pair.

use num_complex::Complex64;

use super::{AmplitudePair, Damping, DriveParams, InitialState, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            initial_step: 1e-3,
            max_steps: 5_000_000,
        }
    }
}

type State = [Complex64; 2];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Rhs {
    half_rabi: f64,
    detuning: f64,
    phase: f64,
    rate: Complex64,
}

impl Rhs {
    fn eval(&self, t: f64, y: &State) -> State {
        let up = Complex64::new(0.0, self.half_rabi) * Complex64::from_polar(1.0, self.phase + self.detuning * t);
        let down = Complex64::new(0.0, self.half_rabi) * Complex64::from_polar(1.0, -(self.phase + self.detuning * t));
        [up * y[1], down * y[0] + self.rate * y[1]]
    }
}

/// Integrates the lab-frame equations on `times` (non-decreasing, starting
/// at 0), landing exactly on each requested time.
pub fn integrate_oracle(
    ic: &InitialState,
    damping: Damping,
    drive: &DriveParams,
    times: &[f64],
    settings: &OracleSettings,
) -> Result<Trajectory> {
    match times.first() {
        Some(&t0) if t0 == 0.0 => {}
        Some(&t0) => return Err(Error::Domain(format!("time grid must start at 0, got {t0}"))),
        None => return Ok(Trajectory::default()),
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Domain("time grid must be non-decreasing".into()));
    }

    let rhs = Rhs {
        half_rabi: 0.5 * drive.rabi,
        detuning: drive.detuning,
        phase: drive.phase,
        rate: damping.rate(),
    };
    let mut y: State = [ic.c1, ic.c2];
    let mut t = 0.0;
    let mut h = settings.initial_step;
    let mut steps = 0usize;
    let mut points = Vec::with_capacity(times.len());
    let mut k0 = rhs.eval(t, &y);

    for &target in times {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            let mut k = [[Complex64::default(); 2]; 7];
            k[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j] * step;
                    if a != 0.0 {
                        ys[0] += kj[0] * a;
                        ys[1] += kj[1] * a;
                    }
                }
                k[s] = rhs.eval(t + C[s] * step, &ys);
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for comp in 0..2 {
                let mut hi = Complex64::default();
                let mut lo = Complex64::default();
                for s in 0..7 {
                    hi += k[s][comp] * B5[s];
                    lo += k[s][comp] * B4[s];
                }
                y5[comp] += hi * step;
                let scale = settings.abs_tol + settings.rel_tol * y[comp].norm().max(y5[comp].norm());
                err = err.max(((hi - lo) * step).norm() / scale);
            }

            steps += 1;
            if steps > settings.max_steps {
                return Err(Error::StepCollapse { t, step });
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y5;
                // FSAL: the last stage is the derivative at the new point.
                k0 = k[6];
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // Do not let a clipped final step shrink the working step size.
            h = if last && err <= 1.0 { h.max(step * factor) } else { step * factor };
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepCollapse { t, step: h });
            }
        }
        points.push(AmplitudePair { t: target, c1: y[0], c2: y[1] });
    }
    Ok(Trajectory { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::amplitudes_free;

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
    }

    #[test]
    fn undriven_ground_state_stays_put() {
        let ic = InitialState::new(Complex64::new(1.0, 0.0), Complex64::default()).unwrap();
        let traj = integrate_oracle(&ic, Damping::free(1.0), &DriveParams::resonant(0.0), &grid(20, 10.0), &OracleSettings::default()).unwrap();
        for p in &traj.points {
            assert_eq!(p.c1, Complex64::new(1.0, 0.0));
            assert_eq!(p.c2, Complex64::default());
        }
    }

    #[test]
    fn lossless_rabi_oscillation() {
        let ic = InitialState::new(Complex64::new(1.0, 0.0), Complex64::default()).unwrap();
        let rabi = 1.7;
        let traj = integrate_oracle(&ic, Damping::free(0.0), &DriveParams::resonant(rabi), &grid(100, 10.0), &OracleSettings::default()).unwrap();
        for p in &traj.points {
            assert!((p.c2.norm() - (0.5 * rabi * p.t).sin().abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_confluent_closed_form() {
        let ic = InitialState::equal_superposition();
        let drive = DriveParams::resonant(1.0);
        let times = grid(200, 10.0);
        let traj = integrate_oracle(&ic, Damping::free(1.0), &drive, &times, &OracleSettings::default()).unwrap();
        let closed = Trajectory { points: times.iter().map(|&t| amplitudes_free(t, &ic, 1.0, &drive)).collect() };
        assert!(traj.sup_distance(&closed) < 1e-8, "{}", traj.sup_distance(&closed));
        assert!(traj.max_norm_increase() <= 1e-10);
    }

    #[test]
    fn rejects_bad_grids() {
        let ic = InitialState::equal_superposition();
        let s = OracleSettings::default();
        assert!(integrate_oracle(&ic, Damping::free(1.0), &DriveParams::resonant(1.0), &[0.5, 1.0], &s).is_err());
        assert!(integrate_oracle(&ic, Damping::free(1.0), &DriveParams::resonant(1.0), &[0.0, 1.0, 0.5], &s).is_err());
    }
}
