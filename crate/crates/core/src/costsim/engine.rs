use crate::decider::{Decider, DeciderKind, Request, ThreadContext, TraceRecord, Version};
use crate::transformer::GenerationMode;

use super::program::{Count, SimProgram};
use super::SimError;

/// How the version of each loop execution is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Every parallelisable level asks the decider.
    Decide(DeciderKind),
    /// The given level always runs in parallel and all others serially,
    /// with no decision calls or instrumentation: a hand-written static
    /// parallelisation. `None` runs everything serially.
    Force(Option<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub total_time: f64,
    /// Time of each iteration of the repeat loop.
    pub repeat_times: Vec<f64>,
    /// Number of executions of each level that ran the parallel version,
    /// in level order.
    pub per_level_parallel_counts: Vec<(String, u64)>,
    pub trace: Vec<TraceRecord>,
    /// Instrumentation calls executed.
    pub bookkeeping_ops: u64,
    pub decisions: u64,
    /// Parallel regions opened, including one-thread regions in ompif mode.
    pub regions: u64,
    /// Level name of each loop id.
    pub loop_levels: Vec<String>,
}

impl SimReport {
    /// Time of the final repeat, when the deciders have settled.
    pub fn last_repeat_time(&self) -> f64 {
        *self.repeat_times.last().expect("at least one repeat")
    }

    pub fn parallel_count(&self, level: &str) -> u64 {
        self.per_level_parallel_counts
            .iter()
            .find(|(n, _)| n == level)
            .map_or(0, |(_, c)| *c)
    }
}

/// Runs `program` under a decider.
pub fn simulate(
    program: &SimProgram,
    threads: usize,
    decider: DeciderKind,
    mode: GenerationMode,
) -> Result<SimReport, SimError> {
    simulate_with(program, threads, Strategy::Decide(decider), mode)
}

/// Runs `program` with a fixed parallelisation.
pub fn simulate_forced(
    program: &SimProgram,
    threads: usize,
    level: Option<usize>,
) -> Result<SimReport, SimError> {
    simulate_with(
        program,
        threads,
        Strategy::Force(level),
        GenerationMode::Duplicate,
    )
}

pub fn simulate_with(
    program: &SimProgram,
    threads: usize,
    strategy: Strategy,
    mode: GenerationMode,
) -> Result<SimReport, SimError> {
    if threads == 0 {
        return Err(SimError::Precondition("threads must be at least 1".into()));
    }
    let keys = program.validate()?;
    if let Strategy::Force(Some(l)) = strategy {
        if l >= program.levels.len() {
            return Err(SimError::Precondition(format!(
                "forced level {l} does not exist; the program has {} levels",
                program.levels.len()
            )));
        }
    }
    let mut loop_ids = Vec::new();
    let mut loop_levels = Vec::new();
    for l in &program.levels {
        if l.parallelisable {
            loop_ids.push(Some(loop_levels.len()));
            loop_levels.push(l.name.clone());
        } else {
            loop_ids.push(None);
        }
    }
    let n = program.levels.len();
    let mut eng = Engine {
        prog: program,
        keys,
        threads,
        mode,
        strategy,
        decider: match strategy {
            Strategy::Decide(k) => Some(Decider::new(k)),
            Strategy::Force(_) => None,
        },
        loop_ids,
        last_work: vec![0; n],
        parallel_counts: vec![0; n],
        bookkeeping: 0,
        decisions: 0,
        regions: 0,
    };
    let mut repeat_times = Vec::with_capacity(program.repeats as usize);
    let mut idx = Vec::with_capacity(n);
    for _ in 0..program.repeats {
        let mut ctx = ThreadContext::new();
        repeat_times.push(eng.visit(0, &mut idx, &mut ctx)?.time);
    }
    Ok(SimReport {
        total_time: repeat_times.iter().sum(),
        repeat_times,
        per_level_parallel_counts: program
            .levels
            .iter()
            .map(|l| l.name.clone())
            .zip(eng.parallel_counts.iter().copied())
            .collect(),
        trace: eng.decider.map(Decider::into_trace).unwrap_or_default(),
        bookkeeping_ops: eng.bookkeeping,
        decisions: eng.decisions,
        regions: eng.regions,
        loop_levels,
    })
}

struct Engine<'p> {
    prog: &'p SimProgram,
    keys: Vec<Option<usize>>,
    threads: usize,
    mode: GenerationMode,
    strategy: Strategy,
    decider: Option<Decider>,
    loop_ids: Vec<Option<usize>>,
    /// Innermost iterations executed by the latest visit of each level.
    last_work: Vec<i64>,
    parallel_counts: Vec<u64>,
    bookkeeping: u64,
    decisions: u64,
    regions: u64,
}

struct Visit {
    time: f64,
    /// Innermost iterations executed.
    work: i64,
}

impl Engine<'_> {
    fn count(&self, k: usize, idx: &[i64]) -> Result<i64, SimError> {
        let level = &self.prog.levels[k];
        match &level.count {
            Count::Constant(c) => Ok(*c),
            Count::Table { values, .. } => {
                let by = self.keys[k].expect("resolved table key");
                let i = idx[by] as usize;
                values.get(i).copied().ok_or_else(|| SimError::Schedule {
                    level: level.name.clone(),
                    index: i,
                    len: values.len(),
                })
            }
        }
    }

    fn kind(&self) -> Option<DeciderKind> {
        self.decider.as_ref().map(Decider::kind)
    }

    /// One execution of level `k`; `idx` holds the indices of the
    /// enclosing levels.
    fn visit(
        &mut self,
        k: usize,
        idx: &mut Vec<i64>,
        ctx: &mut ThreadContext,
    ) -> Result<Visit, SimError> {
        let n = self.count(k, idx)?;
        let ov = self.prog.overheads;
        let mut overhead = 0.0;

        if self.kind() == Some(DeciderKind::Profiling) {
            overhead += 2.0 * ov.instrument_call;
            self.bookkeeping += 2;
        }

        let loop_id = self.loop_ids[k];
        let mut decision = None;
        let version = match self.strategy {
            Strategy::Force(l) => {
                if l == Some(k) {
                    Version::Parallel
                } else {
                    Version::Serial
                }
            }
            Strategy::Decide(kind) => match loop_id {
                None => Version::Serial,
                Some(id) => {
                    overhead += ov.decision_call;
                    self.decisions += 1;
                    let current_work = match kind {
                        DeciderKind::Profiling => self.last_work[k],
                        DeciderKind::Heuristic | DeciderKind::RelaxedProfiling => n,
                    };
                    let d = self.decider.as_ref().expect("decider").decide(Request {
                        loop_id: id,
                        iters: n,
                        threads: self.threads,
                        threshold: self.prog.levels[k].threshold,
                        outer_active: ctx.outer_active(),
                        current_work,
                    });
                    decision = Some(d);
                    d.version()
                }
            },
        };

        let tracked =
            loop_id.is_some() || matches!(self.strategy, Strategy::Force(Some(l)) if l == k);
        if tracked {
            ctx.enter(version);
        }
        let body = match version {
            Version::Serial => self.serial(k, n, idx, ctx)?,
            Version::Parallel => self.parallel(k, n, idx, ctx)?,
        };
        if tracked {
            ctx.exit().map_err(SimError::Decider)?;
        }

        let team = version == Version::Parallel && self.threads > 1;
        let ompif_region =
            self.mode == GenerationMode::OmpIf && ov.ompif_serial_region && decision.is_some();
        let mut elapsed = body.time;
        if team || ompif_region {
            elapsed += ov.region_create;
            self.regions += 1;
        }
        if version == Version::Parallel {
            self.parallel_counts[k] += 1;
        }

        if let (Some(d), Some(id)) = (decision, loop_id) {
            if d.is_profiled() {
                let kind = self.kind().expect("decider");
                let work = match kind {
                    DeciderKind::Profiling => body.work,
                    _ => n,
                };
                if kind == DeciderKind::RelaxedProfiling {
                    overhead += 2.0 * ov.instrument_call;
                    self.bookkeeping += 2;
                }
                let recorded = match version {
                    Version::Serial => elapsed,
                    Version::Parallel => elapsed + self.prog.perturbation,
                };
                self.decider
                    .as_ref()
                    .expect("decider")
                    .record(id, version, recorded, work)
                    .map_err(SimError::Decider)?;
            }
        }
        self.last_work[k] = body.work;
        Ok(Visit {
            time: overhead + elapsed,
            work: body.work,
        })
    }

    fn innermost(&self, k: usize) -> bool {
        k + 1 == self.prog.levels.len()
    }

    fn iteration(
        &mut self,
        k: usize,
        it: i64,
        idx: &mut Vec<i64>,
        ctx: &mut ThreadContext,
    ) -> Result<Visit, SimError> {
        let level = &self.prog.levels[k];
        let pre = level.pre_work;
        idx.push(it);
        let child = self.visit(k + 1, idx, ctx);
        idx.pop();
        let child = child?;
        Ok(Visit {
            time: pre + child.time,
            work: child.work,
        })
    }

    fn serial(
        &mut self,
        k: usize,
        n: i64,
        idx: &mut Vec<i64>,
        ctx: &mut ThreadContext,
    ) -> Result<Visit, SimError> {
        if self.innermost(k) {
            return Ok(Visit {
                time: n.max(0) as f64 * self.prog.levels[k].body_work,
                work: n.max(0),
            });
        }
        let mut total = Visit { time: 0.0, work: 0 };
        for it in 0..n {
            let v = self.iteration(k, it, idx, ctx)?;
            total.time += v.time;
            total.work += v.work;
        }
        Ok(total)
    }

    /// Static schedule: contiguous blocks, the first `n % threads` threads
    /// taking one extra iteration. Elapsed time is that of the slowest
    /// thread.
    fn parallel(
        &mut self,
        k: usize,
        n: i64,
        idx: &mut Vec<i64>,
        ctx: &ThreadContext,
    ) -> Result<Visit, SimError> {
        let n = n.max(0);
        let t = self.threads as i64;
        if self.innermost(k) {
            let chunk = (n + t - 1) / t;
            return Ok(Visit {
                time: chunk as f64 * self.prog.levels[k].body_work,
                work: n,
            });
        }
        let (q, r) = (n / t, n % t);
        let mut start = 0;
        let mut slowest = 0.0f64;
        let mut work = 0;
        for thread in 0..t.min(n) {
            let size = q + i64::from(thread < r);
            let mut tctx = ctx.clone();
            let mut time = 0.0;
            for it in start..start + size {
                let v = self.iteration(k, it, idx, &mut tctx)?;
                time += v.time;
                work += v.work;
            }
            slowest = slowest.max(time);
            start += size;
        }
        Ok(Visit {
            time: slowest,
            work,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costsim::program::{LoopLevel, OverheadModel};

    #[test]
    fn forced_uneven_distribution() {
        let p = SimProgram::synthetic(8, 16, 0.0, 1.0);
        assert_eq!(simulate_forced(&p, 6, Some(0)).unwrap().total_time, 32.0);
        assert_eq!(simulate_forced(&p, 6, Some(1)).unwrap().total_time, 24.0);
        assert_eq!(simulate_forced(&p, 6, None).unwrap().total_time, 128.0);
    }

    #[test]
    fn heuristic_synthetic() {
        let p = SimProgram::synthetic(8, 16, 0.0, 1.0);
        let r = simulate(&p, 8, DeciderKind::Heuristic, GenerationMode::Duplicate).unwrap();
        assert_eq!(r.total_time, 16.0);
        assert_eq!(r.parallel_count("outer"), 1);
        assert_eq!(r.parallel_count("inner"), 0);
        assert_eq!(r.decisions, 9);
        assert!(r.trace[1..].iter().all(|t| t.outer_active));
    }

    #[test]
    fn profiling_settles_on_outer() {
        let p = SimProgram::synthetic(8, 16, 0.079, 0.0409).repeats(4);
        let r = simulate(&p, 16, DeciderKind::Profiling, GenerationMode::Duplicate).unwrap();
        let outer: Vec<_> = r
            .trace
            .iter()
            .filter(|t| t.loop_id == 0)
            .map(|t| t.decision.as_str())
            .collect();
        assert_eq!(
            outer,
            [
                "serial_profiled",
                "parallel_profiled",
                "parallel",
                "parallel"
            ]
        );
        approx::assert_relative_eq!(
            r.last_repeat_time(),
            0.079 + 16.0 * 0.0409,
            max_relative = 1e-12
        );
    }

    #[test]
    fn schedule_error() {
        let p = SimProgram::new(vec![
            LoopLevel::new("a", 3),
            LoopLevel::new("b", 0)
                .table(None, vec![1, 2])
                .body_work(1.0),
        ]);
        let e = simulate_forced(&p, 1, None).unwrap_err();
        assert_eq!(
            e,
            SimError::Schedule {
                level: "b".into(),
                index: 2,
                len: 2
            }
        );
    }

    #[test]
    fn ompif_charges_serial_regions() {
        let o = OverheadModel {
            region_create: 0.5,
            ompif_serial_region: true,
            ..Default::default()
        };
        let p = SimProgram::synthetic(8, 16, 0.0, 1.0).overheads(o);
        let dup = simulate(&p, 8, DeciderKind::Heuristic, GenerationMode::Duplicate).unwrap();
        let omp = simulate(&p, 8, DeciderKind::Heuristic, GenerationMode::OmpIf).unwrap();
        assert_eq!(dup.regions, 1);
        assert_eq!(omp.regions, 9);
        assert_eq!(dup.total_time, 16.5);
        assert_eq!(omp.total_time, 17.0);
    }
}
