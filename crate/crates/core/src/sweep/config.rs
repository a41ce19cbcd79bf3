//! Sweep configuration: a TOML document with dotted sections.
//!
//! ```toml
//! preset = "fig4"            # optional starting point
//! environment = "half_space" # or "free_space"
//! solver = "closed"          # closed | oracle | volterra
//! phase = "arcsin"           # arcsin | atan2
//! format = "csv"             # csv | jsonl
//! time = 10.0                # Γ₀t when time is not an axis
//!
//! [medium]
//! omega_p = 0.5
//! gamma = 1e-3
//!
//! [atom]
//! omega0 = 1.05
//! zA = 0.05
//! dz_over_d_sq = 0.0
//! omega0_over_gamma0 = 50.0
//! total_rate = false
//! include_shift = false
//!
//! [drive]
//! rabi_over_varpi = 2.0      # or `rabi`, in Γ₀ units
//! detuning = 0.0
//! phase = 0.0
//!
//! [initial]
//! c1 = [0.7071067811865476, 0.0]
//! c2 = [0.7071067811865476, 0.0]
//!
//! [volterra]
//! width = 1e4
//! substeps = 10
//!
//! [[axis]]
//! name = "omega0"            # omega0 | time | zA | gamma
//! min = 0.5
//! max = 1.5
//! count = 201
//! spacing = "linear"         # linear | log
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

use super::presets;
use crate::berry::PhaseConvention;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("invalid value for `{field}`: {constraint}")]
    Invalid { field: String, constraint: String },

    #[error("unknown key `{key}`{}", hint(.suggestion))]
    UnknownKey { key: String, suggestion: Option<String> },

    #[error("unknown preset `{name}`{}", hint(.suggestion))]
    UnknownPreset { name: String, suggestion: Option<String> },
}

fn hint(suggestion: &Option<String>) -> String {
    suggestion
        .as_ref()
        .map(|s| format!("; did you mean `{s}`?"))
        .unwrap_or_default()
}

fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), constraint: constraint.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    FreeSpace,
    HalfSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Closed,
    Oracle,
    Volterra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisName {
    #[serde(rename = "omega0")]
    Omega0,
    #[serde(rename = "time")]
    Time,
    #[serde(rename = "zA")]
    ZA,
    #[serde(rename = "gamma")]
    Gamma,
}

impl AxisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::Omega0 => "omega0",
            AxisName::Time => "time",
            AxisName::ZA => "zA",
            AxisName::Gamma => "gamma",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            AxisName::Omega0 | AxisName::Gamma => "omega_T",
            AxisName::Time => "1/Gamma0",
            AxisName::ZA => "lambda_T",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [AxisName::Omega0, AxisName::Time, AxisName::ZA, AxisName::Gamma]
            .into_iter()
            .find(|a| a.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: AxisName, min: f64, max: f64, count: usize) -> Self {
        Self { name, min, max, count, spacing: Spacing::Linear }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    return self.max;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub omega_p: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub omega0: f64,
    #[serde(rename = "zA")]
    pub z_a: f64,
    pub dz_over_d_sq: f64,
    pub omega0_over_gamma0: f64,
    pub total_rate: bool,
    /// Keep the surface line shift δω₀ in the damping.
    pub include_shift: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rabi {
    /// Ω in Γ₀ units.
    Absolute(f64),
    /// Ω as a multiple of the point's ϖ.
    OverVarpi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub rabi: Rabi,
    pub detuning: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub c1: [f64; 2],
    pub c2: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraSpec {
    /// Width λ of the Markov-matched Lorentzian kernel, Γ₀ units.
    pub width: f64,
    /// Internal steps per output time interval.
    pub substeps: usize,
}

/// Fully resolved sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub preset: Option<String>,
    pub environment: EnvironmentKind,
    pub solver: SolverKind,
    pub phase: PhaseConvention,
    pub format: Format,
    pub time: f64,
    pub medium: MediumSpec,
    pub atom: AtomSpec,
    pub drive: DriveSpec,
    pub initial: InitialSpec,
    pub volterra: VolterraSpec,
    pub axes: Vec<Axis>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            preset: None,
            environment: EnvironmentKind::HalfSpace,
            solver: SolverKind::Closed,
            phase: PhaseConvention::Arcsin,
            format: Format::Csv,
            time: 10.0,
            medium: MediumSpec { omega_p: 0.5, gamma: 1e-3 },
            atom: AtomSpec {
                omega0: 1.05,
                z_a: 0.05,
                dz_over_d_sq: 0.0,
                omega0_over_gamma0: 50.0,
                total_rate: false,
                include_shift: false,
            },
            drive: DriveSpec { rabi: Rabi::OverVarpi(2.0), detuning: 0.0, phase: 0.0 },
            initial: InitialSpec { c1: [s, 0.0], c2: [s, 0.0] },
            volterra: VolterraSpec { width: 1e4, substeps: 10 },
            axes: Vec::new(),
        }
    }
}

impl SweepSpec {
    pub fn axis(&self, name: AxisName) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    /// Checks every constraint; parse_config calls this before returning.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("{} > 0 (got {v})", leaf(field))))
            }
        };
        let non_negative = |field: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("{} >= 0 (got {v})", leaf(field))))
            }
        };
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("{} must be finite", leaf(field))))
            }
        };

        non_negative("time", self.time)?;
        non_negative("medium.omega_p", self.medium.omega_p)?;
        positive("medium.gamma", self.medium.gamma)?;
        positive("atom.omega0", self.atom.omega0)?;
        positive("atom.zA", self.atom.z_a)?;
        if !(0.0..=1.0).contains(&self.atom.dz_over_d_sq) {
            return Err(invalid("atom.dz_over_d_sq", "0 <= dz_over_d_sq <= 1"));
        }
        positive("atom.omega0_over_gamma0", self.atom.omega0_over_gamma0)?;
        match self.drive.rabi {
            Rabi::Absolute(v) => non_negative("drive.rabi", v)?,
            Rabi::OverVarpi(v) => non_negative("drive.rabi_over_varpi", v)?,
        }
        finite("drive.detuning", self.drive.detuning)?;
        finite("drive.phase", self.drive.phase)?;
        let [a, b] = self.initial.c1;
        let [c, d] = self.initial.c2;
        for (field, v) in [("initial.c1", a), ("initial.c1", b), ("initial.c2", c), ("initial.c2", d)] {
            finite(field, v)?;
        }
        if a * a + b * b + c * c + d * d > 1.0 + 1e-12 {
            return Err(invalid("initial", "|c1|^2 + |c2|^2 <= 1"));
        }
        positive("volterra.width", self.volterra.width)?;
        if self.volterra.substeps == 0 {
            return Err(invalid("volterra.substeps", "substeps >= 1"));
        }

        if self.axes.len() > 2 {
            return Err(invalid("axis", "at most two axes"));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            let field = |k: &str| format!("axis[{i}].{k}");
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(invalid(field("name"), format!("axis `{}` listed twice", axis.name.as_str())));
            }
            if axis.count < 2 {
                return Err(invalid(field("count"), "count >= 2"));
            }
            if !(axis.min.is_finite() && axis.max.is_finite() && axis.min < axis.max) {
                return Err(invalid(field("max"), "min < max"));
            }
            let lower_ok = match axis.name {
                AxisName::Time => axis.min >= 0.0,
                _ => axis.min > 0.0,
            };
            if !lower_ok {
                let op = if axis.name == AxisName::Time { ">=" } else { ">" };
                return Err(invalid(field("min"), format!("{} {op} 0", axis.name.as_str())));
            }
            if axis.spacing == Spacing::Log && axis.min <= 0.0 {
                return Err(invalid(field("spacing"), "log spacing needs min > 0"));
            }
        }
        Ok(())
    }
}

fn leaf(field: &str) -> &str {
    field.rsplit('.').next().unwrap_or(field)
}

const TOP_KEYS: &[&str] = &["preset", "environment", "solver", "phase", "format", "time", "medium", "atom", "drive", "initial", "volterra", "axis"];
const SECTIONS: &[(&str, &[&str])] = &[
    ("medium", &["omega_p", "gamma"]),
    ("atom", &["omega0", "zA", "dz_over_d_sq", "omega0_over_gamma0", "total_rate", "include_shift"]),
    ("drive", &["rabi", "rabi_over_varpi", "detuning", "phase"]),
    ("initial", &["c1", "c2"]),
    ("volterra", &["width", "substeps"]),
    ("axis", &["name", "min", "max", "count", "spacing"]),
];

/// Nearest valid key by edit distance on the final path component.
fn suggest(key: &str) -> Option<String> {
    let leaf_key = leaf(key);
    let candidates = TOP_KEYS
        .iter()
        .map(|k| (k.to_string(), *k))
        .chain(SECTIONS.iter().flat_map(|(s, keys)| keys.iter().map(move |k| (format!("{s}.{k}"), *k))));
    candidates
        .map(|(path, k)| (strsim::levenshtein(leaf_key, k), path))
        .min_by_key(|(d, _)| *d)
        .map(|(_, path)| path)
}

fn unknown(key: String) -> ConfigError {
    let suggestion = suggest(&key);
    ConfigError::UnknownKey { key, suggestion }
}

fn check_keys(table: &Table, prefix: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
            return Err(unknown(path));
        }
    }
    Ok(())
}

fn number(v: &Value, field: &str) -> Result<f64, ConfigError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(invalid(field, "expected a number")),
    }
}

fn integer(v: &Value, field: &str) -> Result<usize, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(invalid(field, "expected a non-negative integer")),
    }
}

fn boolean(v: &Value, field: &str) -> Result<bool, ConfigError> {
    v.as_bool().ok_or_else(|| invalid(field, "expected true or false"))
}

fn complex(v: &Value, field: &str) -> Result<[f64; 2], ConfigError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok([number(re, field)?, number(im, field)?]),
        _ => Err(invalid(field, "expected [re, im]")),
    }
}

fn choice<T: Copy>(v: &Value, field: &str, options: &[(&str, T)]) -> Result<T, ConfigError> {
    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
    let s = v.as_str().ok_or_else(|| invalid(field, format!("one of {}", names.join(", "))))?;
    options
        .iter()
        .find(|(n, _)| *n == s)
        .map(|(_, t)| *t)
        .ok_or_else(|| invalid(field, format!("one of {} (got `{s}`)", names.join(", "))))
}

fn section<'a>(root: &'a Table, name: &str) -> Result<Option<&'a Table>, ConfigError> {
    match root.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => {
            let allowed = SECTIONS.iter().find(|(s, _)| *s == name).map(|(_, k)| *k).unwrap_or(&[]);
            check_keys(t, name, allowed)?;
            Ok(Some(t))
        }
        Some(_) => Err(invalid(name, "expected a section")),
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn solver_options() -> [(&'static str, SolverKind); 3] {
    [("closed", SolverKind::Closed), ("oracle", SolverKind::Oracle), ("volterra", SolverKind::Volterra)]
}

pub fn phase_options() -> [(&'static str, PhaseConvention); 2] {
    [("arcsin", PhaseConvention::Arcsin), ("atan2", PhaseConvention::Atan2)]
}

pub fn format_options() -> [(&'static str, Format); 2] {
    [("csv", Format::Csv), ("jsonl", Format::Jsonl)]
}

/// Parses and validates a configuration document. Keys not present keep the
/// preset's value (if any) or the documented default.
pub fn parse_config(text: &str) -> Result<SweepSpec, ConfigError> {
    parse_config_onto(text, SweepSpec::default())
}

/// As [`parse_config`], with `base` supplying values the document omits
/// (unless the document names its own preset).
pub fn parse_config_onto(text: &str, base: SweepSpec) -> Result<SweepSpec, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Syntax { line, column, message: e.message().to_string() }
    })?;
    check_keys(&root, "", TOP_KEYS)?;

    let mut spec = match root.get("preset") {
        None => base,
        Some(v) => {
            let name = v.as_str().ok_or_else(|| invalid("preset", "expected a preset name"))?;
            presets::preset(name)?
        }
    };

    if let Some(v) = root.get("environment") {
        spec.environment = choice(v, "environment", &[("free_space", EnvironmentKind::FreeSpace), ("half_space", EnvironmentKind::HalfSpace)])?;
    }
    if let Some(v) = root.get("solver") {
        spec.solver = choice(v, "solver", &solver_options())?;
    }
    if let Some(v) = root.get("phase") {
        spec.phase = choice(v, "phase", &phase_options())?;
    }
    if let Some(v) = root.get("format") {
        spec.format = choice(v, "format", &format_options())?;
    }
    if let Some(v) = root.get("time") {
        spec.time = number(v, "time")?;
    }

    if let Some(t) = section(&root, "medium")? {
        if let Some(v) = t.get("omega_p") {
            spec.medium.omega_p = number(v, "medium.omega_p")?;
        }
        if let Some(v) = t.get("gamma") {
            spec.medium.gamma = number(v, "medium.gamma")?;
        }
    }
    if let Some(t) = section(&root, "atom")? {
        if let Some(v) = t.get("omega0") {
            spec.atom.omega0 = number(v, "atom.omega0")?;
        }
        if let Some(v) = t.get("zA") {
            spec.atom.z_a = number(v, "atom.zA")?;
        }
        if let Some(v) = t.get("dz_over_d_sq") {
            spec.atom.dz_over_d_sq = number(v, "atom.dz_over_d_sq")?;
        }
        if let Some(v) = t.get("omega0_over_gamma0") {
            spec.atom.omega0_over_gamma0 = number(v, "atom.omega0_over_gamma0")?;
        }
        if let Some(v) = t.get("total_rate") {
            spec.atom.total_rate = boolean(v, "atom.total_rate")?;
        }
        if let Some(v) = t.get("include_shift") {
            spec.atom.include_shift = boolean(v, "atom.include_shift")?;
        }
    }
    if let Some(t) = section(&root, "drive")? {
        match (t.get("rabi"), t.get("rabi_over_varpi")) {
            (Some(_), Some(_)) => return Err(invalid("drive.rabi", "give either rabi or rabi_over_varpi, not both")),
            (Some(v), None) => spec.drive.rabi = Rabi::Absolute(number(v, "drive.rabi")?),
            (None, Some(v)) => spec.drive.rabi = Rabi::OverVarpi(number(v, "drive.rabi_over_varpi")?),
            (None, None) => {}
        }
        if let Some(v) = t.get("detuning") {
            spec.drive.detuning = number(v, "drive.detuning")?;
        }
        if let Some(v) = t.get("phase") {
            spec.drive.phase = number(v, "drive.phase")?;
        }
    }
    if let Some(t) = section(&root, "initial")? {
        if let Some(v) = t.get("c1") {
            spec.initial.c1 = complex(v, "initial.c1")?;
        }
        if let Some(v) = t.get("c2") {
            spec.initial.c2 = complex(v, "initial.c2")?;
        }
    }
    if let Some(t) = section(&root, "volterra")? {
        if let Some(v) = t.get("width") {
            spec.volterra.width = number(v, "volterra.width")?;
        }
        if let Some(v) = t.get("substeps") {
            spec.volterra.substeps = integer(v, "volterra.substeps")?;
        }
    }

    if let Some(v) = root.get("axis") {
        let list = v.as_array().ok_or_else(|| invalid("axis", "expected [[axis]] tables"))?;
        let (_, axis_keys) = SECTIONS.iter().find(|(s, _)| *s == "axis").copied().unwrap_or(("axis", &[]));
        spec.axes = list
            .iter()
            .enumerate()
            .map(|(i, item)| {
                let field = |k: &str| format!("axis[{i}].{k}");
                let t = item.as_table().ok_or_else(|| invalid(format!("axis[{i}]"), "expected a table"))?;
                check_keys(t, "axis", axis_keys)?;
                let get = |k: &str| t.get(k).ok_or_else(|| invalid(field(k), "required"));
                let name_str = get("name")?.as_str().ok_or_else(|| invalid(field("name"), "expected a string"))?;
                let name = AxisName::parse(name_str)
                    .ok_or_else(|| invalid(field("name"), format!("one of omega0, time, zA, gamma (got `{name_str}`)")))?;
                let spacing = match t.get("spacing") {
                    Some(v) => choice(v, &field("spacing"), &[("linear", Spacing::Linear), ("log", Spacing::Log)])?,
                    None => Spacing::Linear,
                };
                Ok(Axis {
                    name,
                    min: number(get("min")?, &field("min"))?,
                    max: number(get("max")?, &field("max"))?,
                    count: integer(get("count")?, &field("count"))?,
                    spacing,
                })
            })
            .collect::<Result<_, ConfigError>>()?;
    }

    spec.validate()?;
    Ok(spec)
}
