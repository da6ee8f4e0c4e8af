//! Parameter sweeps over the asymptotic theory and the finite-size
//! laboratory, written out as CSV or JSON tables.

mod config;
mod emit;
mod presets;
mod run;

pub use config::{
    parse_config, parse_config_with, ConfigError, Extras, Method, Mode, Options, Param, Point, SweepSpec, Target,
};
pub use emit::{emit, parse_csv, parse_json, render, EmitError, Format, TextRow};
pub use presets::{preset, PRESET_NAMES};
pub use run::{run_sweep, ResultRow, SweepError, Value, LAMBDA_GRID};
