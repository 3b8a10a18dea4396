use toml::{Table, Value};

use crate::decider::TraceRecord;
use crate::transformer::GenerationMode;

use super::engine::SimReport;

/// What a report was produced under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunLabel {
    pub threads: usize,
    /// Decider name, or `forced:<level>` for a static strategy.
    pub strategy: String,
    pub mode: GenerationMode,
}

fn int(v: u64) -> Value {
    Value::Integer(i64::try_from(v).unwrap_or(i64::MAX))
}

/// Renders a report as TOML; `trace` adds the decision trace lines.
pub fn report_toml(label: &RunLabel, r: &SimReport, trace: bool) -> String {
    let mut t = Table::new();
    t.insert("threads".into(), int(label.threads as u64));
    t.insert("strategy".into(), Value::String(label.strategy.clone()));
    t.insert("mode".into(), Value::String(label.mode.to_string()));
    t.insert("total_time".into(), Value::Float(r.total_time));
    t.insert(
        "last_repeat_time".into(),
        Value::Float(r.last_repeat_time()),
    );
    t.insert("bookkeeping_ops".into(), int(r.bookkeeping_ops));
    t.insert("decisions".into(), int(r.decisions));
    t.insert("regions".into(), int(r.regions));
    let counts: Table = r
        .per_level_parallel_counts
        .iter()
        .map(|(n, c)| (n.clone(), int(*c)))
        .collect();
    t.insert("per_level_parallel_counts".into(), Value::Table(counts));
    if trace {
        t.insert(
            "trace_columns".into(),
            Value::String(TraceRecord::HEADER.to_string()),
        );
        t.insert(
            "trace".into(),
            Value::Array(
                r.trace
                    .iter()
                    .map(|x| Value::String(x.to_string()))
                    .collect(),
            ),
        );
    }
    toml::to_string_pretty(&t).expect("report serialises")
}

pub const CSV_HEADER: &str =
    "threads,strategy,mode,total_time,last_repeat_time,bookkeeping_ops,decisions,regions";

pub fn csv_row(label: &RunLabel, r: &SimReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        label.threads,
        label.strategy,
        label.mode,
        r.total_time,
        r.last_repeat_time(),
        r.bookkeeping_ops,
        r.decisions,
        r.regions
    )
}
