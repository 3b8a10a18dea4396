use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

use crate::frontend::{trip_count, Comparison};

use super::{
    heuristic_with_reason, profiling_decide, DeciderError, DeciderKind, Decision, LoopProfileState,
    Phase, Reason, Version,
};

/// Inputs of one decision call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Request {
    pub loop_id: usize,
    pub iters: i64,
    pub threads: usize,
    pub threshold: f64,
    pub outer_active: bool,
    /// Work measure for profiling deciders; ignored by the heuristic.
    pub current_work: i64,
}

impl Request {
    /// A request for a loop header `for (v = init; v < bound; v += step)`,
    /// as passed to the runtime's decision call.
    pub fn from_header(
        loop_id: usize,
        init: i64,
        bound: i64,
        step: i64,
        threshold: f64,
        threads: usize,
        outer_active: bool,
    ) -> Request {
        let iters = trip_count(init, bound, step, Comparison::Lt);
        Request {
            loop_id,
            iters,
            threads,
            threshold,
            outer_active,
            current_work: iters,
        }
    }
}

/// One line of a decision trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub loop_id: usize,
    /// Zero-based count of earlier decisions for the same loop.
    pub invocation_index: usize,
    pub iters: i64,
    pub threads: usize,
    pub outer_active: bool,
    /// Profiling phase before the decision, or `stateless`.
    pub phase: &'static str,
    pub decision: Decision,
    pub reason: Reason,
}

impl TraceRecord {
    pub const HEADER: &'static str =
        "loop_id,invocation_index,iters,threads,outer_active,decider_phase,decision,reason";
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{}",
            self.loop_id,
            self.invocation_index,
            self.iters,
            self.threads,
            self.outer_active,
            self.phase,
            self.decision,
            self.reason
        )
    }
}

#[derive(Debug)]
struct Entry {
    state: LoopProfileState,
    invocations: usize,
}

/// Decision state for all loops of a run, safe to share between threads.
/// Each decision or timing update holds only its own loop's lock.
#[derive(Debug)]
pub struct Decider {
    kind: DeciderKind,
    loops: Mutex<HashMap<usize, Arc<Mutex<Entry>>>>,
    trace: Mutex<Vec<TraceRecord>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl Decider {
    pub fn new(kind: DeciderKind) -> Decider {
        Decider {
            kind,
            loops: Mutex::new(HashMap::new()),
            trace: Mutex::new(Vec::new()),
        }
    }

    pub fn kind(&self) -> DeciderKind {
        self.kind
    }

    fn entry(&self, loop_id: usize) -> Arc<Mutex<Entry>> {
        lock(&self.loops)
            .entry(loop_id)
            .or_insert_with(|| {
                Arc::new(Mutex::new(Entry {
                    state: LoopProfileState::new(loop_id),
                    invocations: 0,
                }))
            })
            .clone()
    }

    /// Decides one execution of a loop and appends it to the trace.
    pub fn decide(&self, req: Request) -> Decision {
        let entry = self.entry(req.loop_id);
        let mut e = lock(&entry);
        let (phase, (decision, reason)) = match self.kind {
            DeciderKind::Heuristic => {
                let (v, r) =
                    heuristic_with_reason(req.iters, req.threads, req.threshold, req.outer_active);
                ("stateless", (Decision::from(v), r))
            }
            DeciderKind::Profiling | DeciderKind::RelaxedProfiling => (
                e.state.phase.as_str(),
                profiling_decide(
                    &mut e.state,
                    req.iters,
                    req.threads,
                    req.threshold,
                    req.outer_active,
                    req.current_work,
                ),
            ),
        };
        e.state.currently_parallel = decision.is_parallel();
        let record = TraceRecord {
            loop_id: req.loop_id,
            invocation_index: e.invocations,
            iters: req.iters,
            threads: req.threads,
            outer_active: req.outer_active,
            phase,
            decision,
            reason,
        };
        e.invocations += 1;
        lock(&self.trace).push(record);
        decision
    }

    /// Records the elapsed time of a profiled execution.
    pub fn record(
        &self,
        loop_id: usize,
        version: Version,
        elapsed: f64,
        work: i64,
    ) -> Result<Phase, DeciderError> {
        let entry = lock(&self.loops)
            .get(&loop_id)
            .cloned()
            .ok_or(DeciderError::UnknownLoop { loop_id })?;
        let mut e = lock(&entry);
        e.state.record_timing(version, elapsed, work)
    }

    pub fn state(&self, loop_id: usize) -> Option<LoopProfileState> {
        let entry = lock(&self.loops).get(&loop_id).cloned()?;
        let st = lock(&entry).state.clone();
        Some(st)
    }

    pub fn trace(&self) -> Vec<TraceRecord> {
        lock(&self.trace).clone()
    }

    pub fn into_trace(self) -> Vec<TraceRecord> {
        self.trace.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}
