//! Configuration, parameter sweeps and dataset output.

pub mod check;
pub mod config;
pub mod emit;
pub mod presets;
pub mod run;

pub use config::{parse_config, parse_config_onto, Axis, AxisName, ConfigError, EnvironmentKind, Format, Rabi, SolverKind, Spacing, SweepSpec};
pub use emit::{emit, from_jsonl, render, to_csv, to_jsonl, Cell, OutputFormat, Table};
pub use presets::{preset, PRESETS};
pub use run::{run_sweep, Dataset, Row};
