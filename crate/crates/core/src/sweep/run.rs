//! Sweep orchestration over independent parameter points.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{AxisName, EnvironmentKind, Rabi, SolverKind, SweepSpec};
use super::emit::{Cell, Table};
use crate::berry::{phase_trace, total_phase, PhaseConvention};
use crate::dynamics::{DriveParams, Environment, InitialState, Solver, UniformGrid};
use crate::error::{Error, Result};
use crate::permittivity::LorentzMedium;
use crate::surface::{surface_response, AtomSurfaceConfig, DipoleOrientation, MarkovKernel};

pub const FLAG_SHORT_DISTANCE: &str = "short_distance";
pub const FLAG_UNDEFINED_PHASE: &str = "undefined_phase";
pub const FLAG_ERROR: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Axis values in sweep order.
    pub axes: Vec<f64>,
    pub eps_re: f64,
    pub eps_im: f64,
    pub gamma_ratio: f64,
    pub shift_ratio: f64,
    pub p1: f64,
    pub p2: f64,
    pub x: f64,
    pub y: f64,
    pub phi_arcsin: f64,
    pub phi_atan2: f64,
    pub defined: bool,
    pub flags: Vec<String>,
}

impl Row {
    fn failed(axes: Vec<f64>, message: &str) -> Self {
        let nan = f64::NAN;
        Self {
            axes,
            eps_re: nan,
            eps_im: nan,
            gamma_ratio: nan,
            shift_ratio: nan,
            p1: nan,
            p2: nan,
            x: nan,
            y: nan,
            phi_arcsin: nan,
            phi_atan2: nan,
            defined: false,
            flags: vec![format!("{FLAG_ERROR}: {message}")],
        }
    }

    pub fn is_failed(&self) -> bool {
        self.flags.iter().any(|f| f.starts_with(FLAG_ERROR))
    }

    /// Re-checks the invariants of the modules that produced the row.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.is_failed() {
            return Ok(());
        }
        let finite = [self.eps_re, self.eps_im, self.gamma_ratio, self.shift_ratio, self.p1, self.p2, self.x, self.y];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err("non-finite value".into());
        }
        if self.eps_im < 0.0 || self.gamma_ratio < 0.0 {
            return Err("negative absorption or decay rate".into());
        }
        let tol = 1e-12;
        for p in [self.p1, self.p2] {
            if !(-tol..=1.0 + tol).contains(&p) {
                return Err(format!("population {p} outside [0, 1]"));
            }
        }
        if self.defined {
            let r = self.x.hypot(self.y);
            for phi in [self.phi_arcsin, self.phi_atan2] {
                if (phi.sin() * r + self.y).abs() > tol * r.max(1.0) {
                    return Err("phase does not match overlap".into());
                }
            }
            if self.phi_arcsin.abs() > 0.5 * PI || !(self.phi_atan2 > -PI && self.phi_atan2 <= PI) {
                return Err("phase outside its range".into());
            }
        } else if !(self.phi_arcsin.is_nan() && self.phi_atan2.is_nan()) {
            return Err("undefined phase must be NaN".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub spec: SweepSpec,
    pub rows: Vec<Row>,
}

pub const VALUE_COLUMNS: &[(&str, &str)] = &[
    ("eps_re", "1"),
    ("eps_im", "1"),
    ("gamma_ratio", "Gamma0"),
    ("shift_ratio", "Gamma0"),
    ("P1", "1"),
    ("P2", "1"),
    ("X", "1"),
    ("Y", "1"),
    ("phi_arcsin", "rad"),
    ("phi_atan2", "rad"),
    ("defined", "bool"),
    ("flags", "text"),
];

impl Dataset {
    pub fn to_table(&self) -> Table {
        let mut columns: Vec<String> = self.spec.axes.iter().map(|a| a.name.as_str().to_string()).collect();
        let mut units: Vec<String> = self.spec.axes.iter().map(|a| a.name.unit().to_string()).collect();
        columns.extend(VALUE_COLUMNS.iter().map(|(c, _)| c.to_string()));
        units.extend(VALUE_COLUMNS.iter().map(|(_, u)| u.to_string()));
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut cells: Vec<Cell> = r.axes.iter().map(|&v| Cell::Num(v)).collect();
                cells.extend(
                    [r.eps_re, r.eps_im, r.gamma_ratio, r.shift_ratio, r.p1, r.p2, r.x, r.y, r.phi_arcsin, r.phi_atan2]
                        .map(Cell::Num),
                );
                cells.push(Cell::Bool(r.defined));
                cells.push(Cell::Text(r.flags.join("|")));
                cells
            })
            .collect();
        Table {
            columns,
            units,
            rows,
            config: serde_json::to_value(&self.spec).unwrap_or_default(),
        }
    }

    /// Rows where every listed axis equals the given value exactly.
    pub fn select(&self, name: AxisName, value: f64) -> Vec<&Row> {
        match self.spec.axes.iter().position(|a| a.name == name) {
            Some(i) => self.rows.iter().filter(|r| r.axes[i] == value).collect(),
            None => Vec::new(),
        }
    }
}

/// Parameters of one non-time point.
#[derive(Debug, Clone, Copy)]
struct Point {
    omega0: f64,
    z_a: f64,
    gamma: f64,
}

pub(crate) fn solver_of(spec: &SweepSpec) -> Solver {
    match spec.solver {
        SolverKind::Closed => Solver::Closed,
        SolverKind::Oracle => Solver::Oracle,
        SolverKind::Volterra => Solver::Volterra { memory_width: spec.volterra.width },
    }
}

/// Per-point outputs shared by every time value.
struct Response {
    env: Environment,
    eps: Complex64,
    gamma_ratio: f64,
    shift_ratio: f64,
    short_distance: bool,
}

fn response(spec: &SweepSpec, p: Point) -> Result<Response> {
    let medium = LorentzMedium::new(spec.medium.omega_p, p.gamma)?;
    match spec.environment {
        EnvironmentKind::FreeSpace => Ok(Response {
            env: Environment::FreeSpace { gamma0: 1.0 },
            eps: Complex64::new(1.0, 0.0),
            gamma_ratio: 1.0,
            shift_ratio: 0.0,
            short_distance: false,
        }),
        EnvironmentKind::HalfSpace => {
            let cfg = AtomSurfaceConfig {
                omega0: p.omega0,
                z_a: p.z_a,
                orientation: DipoleOrientation::new(spec.atom.dz_over_d_sq)?,
                medium,
                omega0_over_gamma0: spec.atom.omega0_over_gamma0,
                total_rate: spec.atom.total_rate,
            };
            let resp = surface_response(&cfg)?;
            let shift = if spec.atom.include_shift { resp.shift_ratio } else { 0.0 };
            Ok(Response {
                env: Environment::HalfSpace(MarkovKernel { varpi: 0.5 * resp.gamma_ratio, shift }),
                eps: medium.permittivity(p.omega0)?.to_complex(),
                gamma_ratio: resp.gamma_ratio,
                shift_ratio: resp.shift_ratio,
                short_distance: cfg.short_distance_violated(),
            })
        }
    }
}

/// Integration grid for `times` and the index of each requested time in it.
fn evaluation_grid(spec: &SweepSpec, times: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut grid = times.to_vec();
    let offset = usize::from(grid.first() != Some(&0.0));
    if offset == 1 {
        grid.insert(0, 0.0);
    }
    let mut picks: Vec<usize> = (offset..grid.len()).collect();
    if spec.solver == SolverKind::Volterra && grid.len() > 1 {
        let coarse = UniformGrid::from_times(&grid)?;
        let k = spec.volterra.substeps;
        let fine = UniformGrid { dt: coarse.dt / k as f64, steps: coarse.steps * k };
        grid = fine.times();
        picks = picks.into_iter().map(|i| i * k).collect();
    }
    Ok((grid, picks))
}

fn evaluate(spec: &SweepSpec, p: Point, times: &[f64]) -> Result<Vec<Row>> {
    let resp = response(spec, p)?;
    let rabi = match spec.drive.rabi {
        Rabi::Absolute(v) => v,
        Rabi::OverVarpi(k) => k * resp.env.varpi(),
    };
    let drive = DriveParams::new(rabi, spec.drive.detuning, spec.drive.phase)?;
    let [a, b] = spec.initial.c1;
    let [c, d] = spec.initial.c2;
    let ic = InitialState::new(Complex64::new(a, b), Complex64::new(c, d))?;
    let (grid, picks) = evaluation_grid(spec, times)?;
    let trace = phase_trace(
        &ic,
        &resp.env,
        spec.atom.omega0_over_gamma0,
        &drive,
        solver_of(spec),
        &grid,
        PhaseConvention::Arcsin,
    )?;
    trace.validate()?;

    Ok(picks
        .into_iter()
        .map(|i| {
            let pt = trace.points[i];
            let (p1, p2) = trace.populations[i];
            let mut flags = Vec::new();
            if resp.short_distance {
                flags.push(FLAG_SHORT_DISTANCE.to_string());
            }
            if !pt.defined {
                flags.push(FLAG_UNDEFINED_PHASE.to_string());
            }
            Row {
                axes: Vec::new(),
                eps_re: resp.eps.re,
                eps_im: resp.eps.im,
                gamma_ratio: resp.gamma_ratio,
                shift_ratio: resp.shift_ratio,
                p1,
                p2,
                x: pt.x,
                y: pt.y,
                phi_arcsin: pt.phi_t,
                phi_atan2: total_phase(pt.x, pt.y, PhaseConvention::Atan2).unwrap_or(f64::NAN),
                defined: pt.defined,
                flags,
            }
        })
        .collect())
}

/// Runs every point of `spec` on `workers` threads. Rows are in row-major
/// order over the axes (last axis fastest) whatever the worker count; a
/// failing point yields flagged rows unless every point fails.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Dataset> {
    spec.validate()?;
    let values: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let times = match spec.axes.iter().position(|a| a.name == AxisName::Time) {
        Some(i) => values[i].clone(),
        None => vec![spec.time],
    };

    // Non-time axes, row-major.
    let outer: Vec<usize> = (0..spec.axes.len()).filter(|&i| spec.axes[i].name != AxisName::Time).collect();
    let n_points: usize = outer.iter().map(|&i| values[i].len()).product();
    let point_of = |flat: usize| {
        let mut p = Point { omega0: spec.atom.omega0, z_a: spec.atom.z_a, gamma: spec.medium.gamma };
        let mut rest = flat;
        for &i in outer.iter().rev() {
            let n = values[i].len();
            let v = values[i][rest % n];
            rest /= n;
            match spec.axes[i].name {
                AxisName::Omega0 => p.omega0 = v,
                AxisName::ZA => p.z_a = v,
                AxisName::Gamma => p.gamma = v,
                AxisName::Time => {}
            }
        }
        p
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<Vec<Row>>> = pool.install(|| {
        (0..n_points)
            .into_par_iter()
            .map(|k| {
                let rows = evaluate(spec, point_of(k), &times)?;
                match rows.iter().find_map(|r| r.validate().err()) {
                    Some(msg) => Err(Error::Invariant(msg)),
                    None => Ok(rows),
                }
            })
            .collect()
    });

    if n_points > 0 && results.iter().all(|r| r.is_err()) {
        if let Some(Err(e)) = results.into_iter().next() {
            return Err(e);
        }
        unreachable!("at least one point was evaluated");
    }
    let per_point: Vec<std::result::Result<Vec<Row>, String>> =
        results.into_iter().map(|r| r.map_err(|e| e.to_string())).collect();

    let total: usize = values.iter().map(Vec::len).product();
    let mut rows = Vec::with_capacity(total);
    let mut index = vec![0usize; spec.axes.len()];
    for _ in 0..total {
        let mut point = 0;
        let mut t_index = 0;
        for (i, &j) in index.iter().enumerate() {
            if spec.axes[i].name == AxisName::Time {
                t_index = j;
            } else {
                point = point * values[i].len() + j;
            }
        }
        let axes: Vec<f64> = index.iter().enumerate().map(|(i, &j)| values[i][j]).collect();
        rows.push(match &per_point[point] {
            Ok(r) => Row { axes, ..r[t_index].clone() },
            Err(msg) => Row::failed(axes, msg),
        });
        for i in (0..index.len()).rev() {
            index[i] += 1;
            if index[i] < values[i].len() {
                break;
            }
            index[i] = 0;
        }
    }
    Ok(Dataset { spec: spec.clone(), rows })
}
