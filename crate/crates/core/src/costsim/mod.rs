//! Deterministic virtual-time execution of declarative loop nests.
//!
//! A [`SimProgram`] describes a nest of loop levels, the work between and
//! inside them and the runtime's overhead constants. [`simulate`] executes
//! it level by level, asking a [`Decider`](crate::decider::Decider) which
//! version of each annotated level to run. Parallel executions are modelled
//! arithmetically: a static schedule of contiguous blocks whose elapsed
//! time is that of the slowest thread. Nothing runs concurrently, so every
//! report is reproducible bit for bit.

mod analytic;
mod engine;
mod program;
mod report;
mod scenario;
mod sweep;

use thiserror::Error;

use crate::decider::DeciderError;

pub use analytic::{analytic_inner, analytic_outer, threshold_outer_work};
pub use engine::{simulate, simulate_forced, simulate_with, SimReport, Strategy};
pub use program::{Count, LoopLevel, OverheadModel, SimProgram};
pub use report::{csv_row, report_toml, RunLabel, CSV_HEADER};
pub use scenario::{load_scenario, parse_override, to_toml};
pub use sweep::{crossing, grid, sweep, sweep_crossing, SweepPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("level `{level}`: count table has {len} entries but index {index} was requested")]
    Schedule {
        level: String,
        index: usize,
        len: usize,
    },
    #[error("{0}")]
    Precondition(String),
    #[error("sweep grid: {0}")]
    Grid(String),
    #[error("scenario{}: {message}", if path.is_empty() || path == "." { String::new() } else { format!(" at `{path}`") })]
    Scenario { path: String, message: String },
    #[error("override `{key}`: {message}")]
    Override { key: String, message: String },
    #[error(transparent)]
    Decider(DeciderError),
}
