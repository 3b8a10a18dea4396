use std::fmt;

use super::{DeciderError, Version};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Unprofiled,
    SerialTimed,
    BothTimed,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Unprofiled => "unprofiled",
            Phase::SerialTimed => "serial_timed",
            Phase::BothTimed => "both_timed",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Profiling record of one loop.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopProfileState {
    pub loop_id: usize,
    pub phase: Phase,
    pub serial_time: Option<f64>,
    pub parallel_time: Option<f64>,
    /// Work measure at the time the recorded timings were taken.
    pub recorded_work: Option<i64>,
    /// Whether the latest decision for this loop ran the parallel version.
    pub currently_parallel: bool,
}

impl LoopProfileState {
    pub fn new(loop_id: usize) -> LoopProfileState {
        LoopProfileState {
            loop_id,
            phase: Phase::Unprofiled,
            serial_time: None,
            parallel_time: None,
            recorded_work: None,
            currently_parallel: false,
        }
    }

    /// Discards all timings.
    pub fn invalidate(&mut self) {
        *self = LoopProfileState {
            currently_parallel: self.currently_parallel,
            ..LoopProfileState::new(self.loop_id)
        };
    }

    /// Stores the elapsed time of a profiled run and advances the phase.
    /// A parallel timing whose work differs from the serial one invalidates
    /// the state instead. Returns the new phase.
    pub fn record_timing(
        &mut self,
        version: Version,
        elapsed: f64,
        work: i64,
    ) -> Result<Phase, DeciderError> {
        let expected = match version {
            Version::Serial => Phase::Unprofiled,
            Version::Parallel => Phase::SerialTimed,
        };
        if self.phase != expected {
            return Err(DeciderError::PhaseMismatch {
                loop_id: self.loop_id,
                version: version.as_str(),
                phase: self.phase,
            });
        }
        match version {
            Version::Serial => {
                self.serial_time = Some(elapsed);
                self.recorded_work = Some(work);
                self.phase = Phase::SerialTimed;
            }
            Version::Parallel if self.recorded_work != Some(work) => self.invalidate(),
            Version::Parallel => {
                self.parallel_time = Some(elapsed);
                self.phase = Phase::BothTimed;
            }
        }
        Ok(self.phase)
    }
}
