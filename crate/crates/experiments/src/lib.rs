//! Parameter sweeps over the SU(1,1) feedback schemes.
//!
//! A [`SweepSpec`] describes a grid of schemes, squeezing amplitudes, loss
//! rates, loop counts and phases; [`run_sweep`] evaluates it in parallel and
//! returns rows in a fixed order, and [`write_sweep_csv`] renders them.
//! [`presets`] holds the reconstructed figure grids, [`compare`] the matched
//! resource comparison and [`validate`] the release checks.

pub mod cli;
pub mod compare;
pub mod error;
pub mod output;
pub mod plot;
pub mod presets;
pub mod spec;
pub mod sweep;
pub mod validate;

pub use compare::{compare_resources, write_compare_csv, CompareRow};
pub use error::{Error, Result};
pub use output::{format_float, sweep_csv_string, write_sweep_csv, SWEEP_HEADER};
pub use presets::{preset, Preset, PRESET_NAMES};
pub use spec::{FormulaChoice, LoopRange, SwapInterval, SweepSpec};
pub use sweep::{run_sweep, SweepRow};
pub use validate::{run_validation, Check, ValidateOptions};
