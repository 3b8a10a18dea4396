//! Runtime decision functions choosing the serial or parallel version of a
//! loop at each execution.
//!
//! The heuristic decider is stateless. The profiling deciders share one
//! per-loop state machine and differ only in the work measure the caller
//! supplies: the accurate profiler passes the nested work counted during the
//! loop's previous execution, the relaxed profiler the loop's own iteration
//! count.

mod context;
mod registry;
mod state;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use context::ThreadContext;
pub use registry::{Decider, Request, TraceRecord};
pub use state::{LoopProfileState, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeciderKind {
    Heuristic,
    Profiling,
    RelaxedProfiling,
}

impl DeciderKind {
    pub const ALL: [DeciderKind; 3] = [
        DeciderKind::Heuristic,
        DeciderKind::Profiling,
        DeciderKind::RelaxedProfiling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DeciderKind::Heuristic => "heuristic",
            DeciderKind::Profiling => "profiling",
            DeciderKind::RelaxedProfiling => "relaxed_profiling",
        }
    }

    pub fn is_profiling(self) -> bool {
        self != DeciderKind::Heuristic
    }
}

impl fmt::Display for DeciderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DeciderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DeciderKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                format!(
                    "unknown decider `{s}` (expected heuristic, profiling or relaxed_profiling)"
                )
            })
    }
}

/// The version of a loop that runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Version {
    Serial,
    Parallel,
}

impl Version {
    pub fn as_str(self) -> &'static str {
        match self {
            Version::Serial => "serial",
            Version::Parallel => "parallel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Serial,
    Parallel,
    /// Run serially and record the elapsed time.
    SerialProfiled,
    /// Run in parallel and record the elapsed time.
    ParallelProfiled,
}

impl Decision {
    pub fn version(self) -> Version {
        match self {
            Decision::Serial | Decision::SerialProfiled => Version::Serial,
            Decision::Parallel | Decision::ParallelProfiled => Version::Parallel,
        }
    }

    pub fn is_parallel(self) -> bool {
        self.version() == Version::Parallel
    }

    pub fn is_profiled(self) -> bool {
        matches!(self, Decision::SerialProfiled | Decision::ParallelProfiled)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Serial => "serial",
            Decision::Parallel => "parallel",
            Decision::SerialProfiled => "serial_profiled",
            Decision::ParallelProfiled => "parallel_profiled",
        }
    }
}

impl From<Version> for Decision {
    fn from(v: Version) -> Self {
        match v {
            Version::Serial => Decision::Serial,
            Version::Parallel => Decision::Parallel,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What drove a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    /// An enclosing loop already runs in parallel.
    OuterActive,
    /// The loop has no iterations.
    Empty,
    HeuristicPass,
    HeuristicFail,
    /// The work measure changed; timings were discarded and a fresh serial
    /// profile starts.
    Invalidated,
    ProfileSerial,
    ProfileParallel,
    /// Both timings are known; the faster version was chosen.
    Timings,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::OuterActive => "outer_active",
            Reason::Empty => "empty",
            Reason::HeuristicPass => "heuristic_pass",
            Reason::HeuristicFail => "heuristic_fail",
            Reason::Invalidated => "invalidated",
            Reason::ProfileSerial => "profile_serial",
            Reason::ProfileParallel => "profile_parallel",
            Reason::Timings => "timings",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeciderError {
    #[error("loop {loop_id}: {version} timing recorded in phase {phase}")]
    PhaseMismatch {
        loop_id: usize,
        version: &'static str,
        phase: Phase,
    },
    #[error("loop {loop_id}: timing recorded without a profiled decision")]
    UnknownLoop { loop_id: usize },
    #[error("exit without matching enter")]
    Unbalanced,
}

/// True when `iters / threads >= threshold`.
fn heuristic_passes(iters: i64, threads: usize, threshold: f64) -> bool {
    iters > 0 && iters as f64 / threads as f64 >= threshold
}

/// Stateless decision: serial under an active outer parallel loop,
/// otherwise parallel iff there are at least `threshold` iterations per
/// thread.
///
/// # Panics
///
/// If `threads` is 0 or `threshold` is not positive.
pub fn heuristic_decide(iters: i64, threads: usize, threshold: f64, outer_active: bool) -> Version {
    heuristic_with_reason(iters, threads, threshold, outer_active).0
}

pub(crate) fn heuristic_with_reason(
    iters: i64,
    threads: usize,
    threshold: f64,
    outer_active: bool,
) -> (Version, Reason) {
    assert!(threads >= 1, "thread count must be at least 1");
    assert!(
        threshold > 0.0,
        "threshold must be positive, got {threshold}"
    );
    if outer_active {
        (Version::Serial, Reason::OuterActive)
    } else if iters <= 0 {
        (Version::Serial, Reason::Empty)
    } else if heuristic_passes(iters, threads, threshold) {
        (Version::Parallel, Reason::HeuristicPass)
    } else {
        (Version::Serial, Reason::HeuristicFail)
    }
}

/// One step of the profiling state machine.
///
/// The heuristic is checked first on every execution; only when it fails
/// are timings consulted, recorded or invalidated.
pub fn profiling_decide(
    state: &mut LoopProfileState,
    iters: i64,
    threads: usize,
    threshold: f64,
    outer_active: bool,
    current_work: i64,
) -> (Decision, Reason) {
    let (v, reason) = heuristic_with_reason(iters, threads, threshold, outer_active);
    if reason != Reason::HeuristicFail {
        return (v.into(), reason);
    }
    let invalidated = state.phase != Phase::Unprofiled && state.recorded_work != Some(current_work);
    if invalidated {
        state.invalidate();
    }
    match state.phase {
        Phase::Unprofiled => (
            Decision::SerialProfiled,
            if invalidated {
                Reason::Invalidated
            } else {
                Reason::ProfileSerial
            },
        ),
        Phase::SerialTimed => (Decision::ParallelProfiled, Reason::ProfileParallel),
        Phase::BothTimed => {
            let s = state.serial_time.expect("both_timed has a serial time");
            let p = state.parallel_time.expect("both_timed has a parallel time");
            if s <= p {
                (Decision::Serial, Reason::Timings)
            } else {
                (Decision::Parallel, Reason::Timings)
            }
        }
    }
}
