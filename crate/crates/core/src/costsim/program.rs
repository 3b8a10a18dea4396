use serde::{Deserialize, Serialize};

use super::SimError;

/// Iteration count of a level, re-read at every visit.
#[derive(Debug, Clone, PartialEq)]
pub enum Count {
    Constant(i64),
    /// One count per iteration of an enclosing level. `by` names that level;
    /// `None` means the immediately enclosing one.
    Table {
        by: Option<String>,
        values: Vec<i64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopLevel {
    pub name: String,
    pub count: Count,
    /// Work per iteration of this level, executed before the next level.
    pub pre_work: f64,
    /// Work per iteration of the innermost level.
    pub body_work: f64,
    /// Whether the level carries a preomp directive.
    pub parallelisable: bool,
    /// Argument of the level's `parallel_threshold` clause.
    pub threshold: f64,
}

impl LoopLevel {
    pub fn new(name: &str, count: i64) -> LoopLevel {
        LoopLevel {
            name: name.to_string(),
            count: Count::Constant(count),
            pre_work: 0.0,
            body_work: 0.0,
            parallelisable: true,
            threshold: 1.0,
        }
    }

    pub fn pre_work(mut self, t: f64) -> LoopLevel {
        self.pre_work = t;
        self
    }

    pub fn body_work(mut self, t: f64) -> LoopLevel {
        self.body_work = t;
        self
    }

    pub fn parallelisable(mut self, p: bool) -> LoopLevel {
        self.parallelisable = p;
        self
    }

    pub fn threshold(mut self, t: f64) -> LoopLevel {
        self.threshold = t;
        self
    }

    pub fn table(mut self, by: Option<&str>, values: Vec<i64>) -> LoopLevel {
        self.count = Count::Table {
            by: by.map(str::to_string),
            values,
        };
        self
    }
}

/// Durations charged by the runtime rather than by the program's own work.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverheadModel {
    /// Opening a parallel region.
    pub region_create: f64,
    /// One decision-function call.
    pub decision_call: f64,
    /// One enter or exit instrumentation call.
    pub instrument_call: f64,
    /// In ompif mode, serial decisions still open a (one-thread) region.
    pub ompif_serial_region: bool,
}

/// No costs; ompif serial decisions still open regions.
impl Default for OverheadModel {
    fn default() -> Self {
        OverheadModel {
            region_create: 0.0,
            decision_call: 0.0,
            instrument_call: 0.0,
            ompif_serial_region: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimProgram {
    /// Outermost levels first.
    pub levels: Vec<LoopLevel>,
    /// Iterations of the enclosing timing loop, which is never parallelised.
    pub repeats: u64,
    pub overheads: OverheadModel,
    /// Added to every recorded parallel timing.
    pub perturbation: f64,
}

impl SimProgram {
    pub fn new(levels: Vec<LoopLevel>) -> SimProgram {
        SimProgram {
            levels,
            repeats: 1,
            overheads: OverheadModel::default(),
            perturbation: 0.0,
        }
    }

    /// The two-level synthetic benchmark nest with both loops annotated.
    pub fn synthetic(outer_iters: i64, inner_iters: i64, t_outer: f64, t_inner: f64) -> SimProgram {
        SimProgram::new(vec![
            LoopLevel::new("outer", outer_iters).pre_work(t_outer),
            LoopLevel::new("inner", inner_iters).body_work(t_inner),
        ])
    }

    pub fn repeats(mut self, r: u64) -> SimProgram {
        self.repeats = r;
        self
    }

    pub fn overheads(mut self, o: OverheadModel) -> SimProgram {
        self.overheads = o;
        self
    }

    pub fn level_index(&self, name: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.name == name)
    }

    /// Checks the program's invariants and resolves every count table to
    /// the index of the level it is keyed by.
    pub fn validate(&self) -> Result<Vec<Option<usize>>, SimError> {
        let invalid = |m: String| Err(SimError::Invalid(m));
        if self.levels.is_empty() {
            return invalid("a program needs at least one level".into());
        }
        if self.repeats == 0 {
            return invalid("repeats must be at least 1".into());
        }
        let o = &self.overheads;
        for (name, v) in [
            ("overheads.region_create", o.region_create),
            ("overheads.decision_call", o.decision_call),
            ("overheads.instrument_call", o.instrument_call),
            ("perturbation", self.perturbation),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!(
                    "{name} must be a finite non-negative duration, got {v}"
                ));
            }
        }
        let last = self.levels.len() - 1;
        let mut keys = Vec::with_capacity(self.levels.len());
        for (k, l) in self.levels.iter().enumerate() {
            if self.levels[..k].iter().any(|p| p.name == l.name) {
                return invalid(format!("duplicate level name `{}`", l.name));
            }
            for (what, v) in [("pre_work", l.pre_work), ("body_work", l.body_work)] {
                if !(v >= 0.0 && v.is_finite()) {
                    return invalid(format!(
                        "level `{}`: {what} must be a finite non-negative duration, got {v}",
                        l.name
                    ));
                }
            }
            if k == last && l.pre_work != 0.0 {
                return invalid(format!(
                    "level `{}`: the innermost level has no pre_work; use body_work",
                    l.name
                ));
            }
            if k != last && l.body_work != 0.0 {
                return invalid(format!(
                    "level `{}`: only the innermost level has body_work",
                    l.name
                ));
            }
            if !(l.threshold > 0.0 && l.threshold.is_finite()) {
                return invalid(format!("level `{}`: threshold must be positive", l.name));
            }
            keys.push(match &l.count {
                Count::Constant(c) if *c < 0 => {
                    return invalid(format!("level `{}`: count must be non-negative", l.name))
                }
                Count::Constant(_) => None,
                Count::Table { by, values } => {
                    if values.iter().any(|&v| v < 0) {
                        return invalid(format!("level `{}`: counts must be non-negative", l.name));
                    }
                    let idx = match by {
                        None if k == 0 => {
                            return invalid(format!(
                                "level `{}`: the outermost level has no enclosing level to key a count table by",
                                l.name
                            ))
                        }
                        None => k - 1,
                        Some(b) => match self.levels[..k].iter().position(|p| &p.name == b) {
                            Some(i) => i,
                            None => {
                                return invalid(format!(
                                    "level `{}`: count table key `{b}` is not an enclosing level",
                                    l.name
                                ))
                            }
                        },
                    };
                    Some(idx)
                }
            });
        }
        Ok(keys)
    }
}
