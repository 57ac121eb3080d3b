//! Configuration files, parameter sweeps, analytic-vs-simulation validation
//! and CSV/JSON emission on top of `nnoma-core`.

pub mod config;
pub mod emit;
pub mod error;
pub mod sweep;
pub mod validate;

pub use config::{load_config, parse_config, McSettings, Modes, RunConfig};
pub use emit::{emit, Format};
pub use error::{HarnessError, Result};
pub use sweep::{run_point, run_sweep, Grid, GridScale, SweepParam, SweepRecord, SweepSpec};
pub use validate::{validate, window_doubling, Tolerance, ValidationReport};
