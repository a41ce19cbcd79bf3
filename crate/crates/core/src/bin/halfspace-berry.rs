use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use halfspace_berry::berry::{phase_trace, PhaseConvention};
use halfspace_berry::dynamics::{evolve, DriveParams, Environment, InitialState, Solver};
use halfspace_berry::error::{Error, Result};
use halfspace_berry::permittivity::LorentzMedium;
use halfspace_berry::quadrature::PvSettings;
use halfspace_berry::surface::{line_shift_pv, surface_response, AtomSurfaceConfig, DipoleOrientation, MarkovKernel};
use halfspace_berry::sweep::check::run_checks;
use halfspace_berry::sweep::{
    emit, parse_config_onto, preset, run_sweep, Axis, AxisName, Cell, ConfigError, EnvironmentKind, Format,
    OutputFormat, Rabi, SolverKind, SweepSpec, Table,
};

#[derive(Parser)]
#[command(name = "halfspace-berry", version, about = "Pumped atom near a Drude-Lorentz half-space")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Figure preset (fig2 ... fig21); a config file overrides its values.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Output file (standard output when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long, global = true, value_enum)]
    phase: Option<PhaseArg>,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Closed,
    Oracle,
    Volterra,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    Arcsin,
    Atan2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResponseAxis {
    #[value(name = "omega0")]
    Omega0,
    #[value(name = "zA")]
    ZA,
}

#[derive(Subcommand)]
enum Command {
    /// Table of ε(ω).
    Permittivity {
        #[arg(long, default_value_t = 0.5)]
        min: f64,
        #[arg(long, default_value_t = 1.5)]
        max: f64,
        #[arg(long, default_value_t = 501)]
        count: usize,
    },
    /// Decay rate and line shift against ω₀ or zA.
    Response {
        #[arg(long, value_enum, default_value = "omega0")]
        over: ResponseAxis,
        #[arg(long)]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        count: usize,
        /// Add the dispersion-integral line shift.
        #[arg(long)]
        pv: bool,
    },
    /// Single amplitude trajectory over [0, time].
    Evolve {
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Overlap, total phase and populations over [0, time].
    Berry {
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Dataset over the configured axes.
    Sweep,
    /// Run the invariant suite.
    Check,
}

fn config_error(field: &str, constraint: impl Into<String>) -> Error {
    Error::Config(ConfigError::Invalid { field: field.into(), constraint: constraint.into() })
}

fn load_spec(common: &Common) -> Result<SweepSpec> {
    let base = match &common.preset {
        Some(name) => preset(name)?,
        None => SweepSpec::default(),
    };
    let mut spec = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            parse_config_onto(&text, base)?
        }
        None => base,
    };
    if let Some(f) = common.format {
        spec.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        };
    }
    if let Some(s) = common.solver {
        spec.solver = match s {
            SolverArg::Closed => SolverKind::Closed,
            SolverArg::Oracle => SolverKind::Oracle,
            SolverArg::Volterra => SolverKind::Volterra,
        };
    }
    if let Some(p) = common.phase {
        spec.phase = match p {
            PhaseArg::Arcsin => PhaseConvention::Arcsin,
            PhaseArg::Atan2 => PhaseConvention::Atan2,
        };
    }
    if common.workers == 0 {
        return Err(config_error("workers", "workers >= 1"));
    }
    spec.validate()?;
    Ok(spec)
}

fn spec_json(spec: &SweepSpec) -> serde_json::Value {
    serde_json::to_value(spec).unwrap_or_default()
}

fn table(spec: &SweepSpec, columns: &[(&str, &str)], rows: Vec<Vec<Cell>>) -> Table {
    Table {
        columns: columns.iter().map(|(c, _)| c.to_string()).collect(),
        units: columns.iter().map(|(_, u)| u.to_string()).collect(),
        rows,
        config: spec_json(spec),
    }
}

fn atom_config(spec: &SweepSpec, omega0: f64, z_a: f64) -> Result<AtomSurfaceConfig> {
    Ok(AtomSurfaceConfig {
        omega0,
        z_a,
        orientation: DipoleOrientation::new(spec.atom.dz_over_d_sq)?,
        medium: LorentzMedium::new(spec.medium.omega_p, spec.medium.gamma)?,
        omega0_over_gamma0: spec.atom.omega0_over_gamma0,
        total_rate: spec.atom.total_rate,
    })
}

fn grid_axis(min: f64, max: f64, count: usize, field: &str) -> Result<Vec<f64>> {
    if count < 2 || !(min < max) {
        return Err(config_error(field, "count >= 2 and min < max"));
    }
    Ok(Axis::linear(AxisName::Omega0, min, max, count).values())
}

fn permittivity_table(spec: &SweepSpec, min: f64, max: f64, count: usize) -> Result<Table> {
    if !(min > 0.0) {
        return Err(config_error("min", "min > 0"));
    }
    let medium = LorentzMedium::new(spec.medium.omega_p, spec.medium.gamma)?;
    let rows = grid_axis(min, max, count, "count")?
        .into_iter()
        .map(|w| {
            let e = medium.permittivity(w)?;
            Ok(vec![Cell::Num(w), Cell::Num(e.re), Cell::Num(e.im), Cell::Bool(medium.in_band_gap(w))])
        })
        .collect::<Result<_>>()?;
    Ok(table(spec, &[("omega", "omega_T"), ("eps_re", "1"), ("eps_im", "1"), ("in_gap", "bool")], rows))
}

fn response_table(spec: &SweepSpec, over: ResponseAxis, min: Option<f64>, max: Option<f64>, count: usize, pv: bool) -> Result<Table> {
    let (name, unit, lo, hi) = match over {
        ResponseAxis::Omega0 => ("omega0", "omega_T", min.unwrap_or(0.5), max.unwrap_or(1.5)),
        ResponseAxis::ZA => ("zA", "lambda_T", min.unwrap_or(0.01), max.unwrap_or(1.0)),
    };
    if !(lo > 0.0) {
        return Err(config_error("min", format!("{name} > 0")));
    }
    let settings = PvSettings::default();
    let mut rows = Vec::new();
    for x in grid_axis(lo, hi, count, "count")? {
        let cfg = match over {
            ResponseAxis::Omega0 => atom_config(spec, x, spec.atom.z_a)?,
            ResponseAxis::ZA => atom_config(spec, spec.atom.omega0, x)?,
        };
        let r = surface_response(&cfg)?;
        let mut row = vec![Cell::Num(x), Cell::Num(r.gamma_ratio), Cell::Num(r.shift_ratio)];
        if pv {
            match line_shift_pv(&cfg, &settings) {
                Ok(l) => row.extend([Cell::Num(l.value), Cell::Num(l.resonant), Cell::Num(l.error)]),
                Err(e) => {
                    row.extend([Cell::Num(f64::NAN), Cell::Num(f64::NAN), Cell::Num(f64::NAN)]);
                    row.push(Cell::Bool(cfg.short_distance_violated()));
                    row.push(Cell::Text(format!("error: {e}")));
                    rows.push(row);
                    continue;
                }
            }
        }
        row.push(Cell::Bool(cfg.short_distance_violated()));
        row.push(Cell::Text(String::new()));
        rows.push(row);
    }
    let mut columns = vec![(name, unit), ("gamma_ratio", "Gamma0"), ("shift_ratio", "Gamma0")];
    if pv {
        columns.extend([("shift_pv", "Gamma0"), ("shift_pv_resonant", "Gamma0"), ("shift_pv_error", "Gamma0")]);
    }
    columns.extend([("short_distance", "bool"), ("flags", "text")]);
    Ok(table(spec, &columns, rows))
}

/// Environment, drive and initial state of the spec's single point.
fn single_point(spec: &SweepSpec) -> Result<(Environment, DriveParams, InitialState)> {
    let env = match spec.environment {
        EnvironmentKind::FreeSpace => Environment::FreeSpace { gamma0: 1.0 },
        EnvironmentKind::HalfSpace => {
            let r = surface_response(&atom_config(spec, spec.atom.omega0, spec.atom.z_a)?)?;
            let shift = if spec.atom.include_shift { r.shift_ratio } else { 0.0 };
            Environment::HalfSpace(MarkovKernel { varpi: 0.5 * r.gamma_ratio, shift })
        }
    };
    let rabi = match spec.drive.rabi {
        Rabi::Absolute(v) => v,
        Rabi::OverVarpi(k) => k * env.varpi(),
    };
    let drive = DriveParams::new(rabi, spec.drive.detuning, spec.drive.phase)?;
    let [a, b] = spec.initial.c1;
    let [c, d] = spec.initial.c2;
    let ic = InitialState::new(Complex64::new(a, b), Complex64::new(c, d))?;
    Ok((env, drive, ic))
}

fn solver(spec: &SweepSpec) -> Solver {
    match spec.solver {
        SolverKind::Closed => Solver::Closed,
        SolverKind::Oracle => Solver::Oracle,
        SolverKind::Volterra => Solver::Volterra { memory_width: spec.volterra.width },
    }
}

fn time_grid(spec: &SweepSpec, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(spec.time > 0.0) {
        return Err(config_error("time", "time > 0 and steps >= 1"));
    }
    Ok((0..=steps).map(|i| spec.time * i as f64 / steps as f64).collect())
}

fn evolve_table(spec: &SweepSpec, steps: usize) -> Result<Table> {
    let (env, drive, ic) = single_point(spec)?;
    let traj = evolve(&env, &ic, &drive, solver(spec), &time_grid(spec, steps)?)?;
    let rows = traj
        .points
        .iter()
        .map(|p| {
            let (p1, p2) = p.populations();
            [p.t, p.c1.re, p.c1.im, p.c2.re, p.c2.im, p1, p2].map(Cell::Num).to_vec()
        })
        .collect();
    Ok(table(
        spec,
        &[("time", "1/Gamma0"), ("c1_re", "1"), ("c1_im", "1"), ("c2_re", "1"), ("c2_im", "1"), ("P1", "1"), ("P2", "1")],
        rows,
    ))
}

fn berry_table(spec: &SweepSpec, steps: usize) -> Result<Table> {
    let (env, drive, ic) = single_point(spec)?;
    let times = time_grid(spec, steps)?;
    let trace = phase_trace(&ic, &env, spec.atom.omega0_over_gamma0, &drive, solver(spec), &times, spec.phase)?;
    trace.validate()?;
    let rows = trace
        .times
        .iter()
        .zip(&trace.points)
        .zip(&trace.populations)
        .map(|((&t, p), &(p1, p2))| {
            vec![
                Cell::Num(t),
                Cell::Num(p.x),
                Cell::Num(p.y),
                Cell::Num(p.phi_t),
                Cell::Num(p.phi_t.to_degrees()),
                Cell::Bool(p.defined),
                Cell::Num(p1),
                Cell::Num(p2),
            ]
        })
        .collect();
    Ok(table(
        spec,
        &[
            ("time", "1/Gamma0"),
            ("X", "1"),
            ("Y", "1"),
            ("phi_t", "rad"),
            ("phi_t_deg", "deg"),
            ("defined", "bool"),
            ("P1", "1"),
            ("P2", "1"),
        ],
        rows,
    ))
}

fn write(table: &Table, spec: &SweepSpec, out: Option<&Path>) -> Result<()> {
    emit(table, OutputFormat::from(spec.format), out)
}

fn run(cli: &Cli) -> Result<()> {
    let out = cli.common.out.as_deref();
    if let Command::Check = cli.command {
        let outcomes = run_checks();
        let mut failed = 0;
        for c in &outcomes {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            failed += usize::from(!c.passed);
        }
        if failed > 0 {
            return Err(Error::Invariant(format!("{failed} of {} checks failed", outcomes.len())));
        }
        return Ok(());
    }

    let spec = load_spec(&cli.common)?;
    let table = match &cli.command {
        Command::Permittivity { min, max, count } => permittivity_table(&spec, *min, *max, *count)?,
        Command::Response { over, min, max, count, pv } => response_table(&spec, *over, *min, *max, *count, *pv)?,
        Command::Evolve { steps } => evolve_table(&spec, *steps)?,
        Command::Berry { steps } => berry_table(&spec, *steps)?,
        Command::Sweep => {
            if spec.axes.is_empty() {
                return Err(config_error("axis", "a sweep needs at least one [[axis]]"));
            }
            let ds = run_sweep(&spec, cli.common.workers)?;
            let failed = ds.rows.iter().filter(|r| r.is_failed()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} rows failed and are flagged", ds.rows.len());
            }
            ds.to_table()
        }
        Command::Check => unreachable!(),
    };
    write(&table, &spec, out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
