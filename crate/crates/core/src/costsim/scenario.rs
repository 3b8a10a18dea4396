//! TOML scenario files.
//!
//! ```toml
//! repeats = 5
//! perturbation = 0.0
//!
//! [overheads]
//! region_create = 0.001
//! decision_call = 0.0
//! instrument_call = 0.0
//! ompif_serial_region = true
//!
//! [[levels]]
//! name = "block"
//! count = 4
//! parallelisable = true
//!
//! [[levels]]
//! name = "j"
//! count_table = { by = "block", values = [8, 2496, 8, 2496] }
//! parallelisable = true
//! ```

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::program::{Count, LoopLevel, OverheadModel, SimProgram};
use super::SimError;

fn one() -> u64 {
    1
}

fn default_threshold() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default = "one")]
    repeats: u64,
    #[serde(default)]
    perturbation: f64,
    #[serde(default)]
    overheads: OverheadModel,
    levels: Vec<LevelFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<i64>,
    #[serde(default)]
    pre_work: f64,
    #[serde(default)]
    body_work: f64,
    #[serde(default)]
    parallelisable: bool,
    #[serde(default = "default_threshold")]
    threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count_table: Option<TableFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    by: Option<String>,
    values: Vec<i64>,
}

fn from_table(t: Table) -> Result<ScenarioFile, SimError> {
    serde_path_to_error::deserialize(t).map_err(|e| SimError::Scenario {
        path: e.path().to_string(),
        message: e.inner().message().trim().to_string(),
    })
}

fn to_program(f: ScenarioFile) -> Result<SimProgram, SimError> {
    let mut levels = Vec::with_capacity(f.levels.len());
    for (i, l) in f.levels.into_iter().enumerate() {
        let count = match (l.count, l.count_table) {
            (Some(c), None) => Count::Constant(c),
            (None, Some(t)) => Count::Table {
                by: t.by,
                values: t.values,
            },
            (c, _) => {
                return Err(SimError::Scenario {
                    path: format!("levels[{i}]"),
                    message: if c.is_some() {
                        "`count` and `count_table` are mutually exclusive".into()
                    } else {
                        "one of `count` or `count_table` is required".into()
                    },
                })
            }
        };
        levels.push(LoopLevel {
            name: l.name,
            count,
            pre_work: l.pre_work,
            body_work: l.body_work,
            parallelisable: l.parallelisable,
            threshold: l.threshold,
        });
    }
    let p = SimProgram {
        levels,
        repeats: f.repeats,
        overheads: f.overheads,
        perturbation: f.perturbation,
    };
    p.validate()?;
    Ok(p)
}

fn to_file(p: &SimProgram) -> ScenarioFile {
    ScenarioFile {
        repeats: p.repeats,
        perturbation: p.perturbation,
        overheads: p.overheads,
        levels: p
            .levels
            .iter()
            .map(|l| {
                let (count, count_table) = match &l.count {
                    Count::Constant(c) => (Some(*c), None),
                    Count::Table { by, values } => (
                        None,
                        Some(TableFile {
                            by: by.clone(),
                            values: values.clone(),
                        }),
                    ),
                };
                LevelFile {
                    name: l.name.clone(),
                    count,
                    pre_work: l.pre_work,
                    body_work: l.body_work,
                    parallelisable: l.parallelisable,
                    threshold: l.threshold,
                    count_table,
                }
            })
            .collect(),
    }
}

/// Serialises a program as a scenario file with every default spelled out.
pub fn to_toml(p: &SimProgram) -> String {
    toml::to_string(&to_file(p)).expect("scenario serialises")
}

/// Parses a scenario and applies `key=value` overrides. Keys are dotted
/// paths into the document with defaults filled in, e.g. `repeats`,
/// `overheads.region_create`, `levels[1].pre_work` or `levels.inner.count`.
pub fn load_scenario(source: &str, overrides: &[(String, String)]) -> Result<SimProgram, SimError> {
    let raw: Table = source
        .parse()
        .map_err(|e: toml::de::Error| SimError::Scenario {
            path: String::new(),
            message: e.message().trim().to_string(),
        })?;
    let file = from_table(raw)?;
    if overrides.is_empty() {
        return to_program(file);
    }
    let mut doc = Table::try_from(&file).expect("scenario serialises");
    for (k, v) in overrides {
        apply_override(&mut doc, k, v)?;
    }
    to_program(from_table(doc)?)
}

/// Splits a `key=value` argument.
pub fn parse_override(arg: &str) -> Result<(String, String), SimError> {
    match arg.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(SimError::Override {
            key: arg.to_string(),
            message: "expected key=value".into(),
        }),
    }
}

enum Seg<'a> {
    Key(&'a str),
    Index(usize),
}

fn segments(key: &str) -> Option<Vec<Seg<'_>>> {
    let mut out = Vec::new();
    for part in key.split('.') {
        let (name, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if name.is_empty() && rest.is_empty() {
            return None;
        }
        if !name.is_empty() {
            out.push(match name.parse() {
                Ok(i) => Seg::Index(i),
                Err(_) => Seg::Key(name),
            });
        }
        while !rest.is_empty() {
            let close = rest.find(']')?;
            out.push(Seg::Index(rest[1..close].parse().ok()?));
            rest = &rest[close + 1..];
            if !rest.is_empty() && !rest.starts_with('[') {
                return None;
            }
        }
    }
    Some(out)
}

fn parse_value(text: &str) -> Value {
    format!("v = {text}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(text.to_string()))
}

fn apply_override(doc: &mut Table, key: &str, value: &str) -> Result<(), SimError> {
    let err = |message: String| SimError::Override {
        key: key.to_string(),
        message,
    };
    let segs = segments(key).ok_or_else(|| err("malformed key".into()))?;
    let (last, path) = segs.split_last().ok_or_else(|| err("empty key".into()))?;
    let mut cur: &mut Value = doc
        .get_mut(match path.first().unwrap_or(last) {
            Seg::Key(k) => *k,
            Seg::Index(_) => return Err(err("a key must start with a name".into())),
        })
        .ok_or_else(|| err("no such key".into()))?;
    if path.is_empty() {
        *cur = parse_value(value);
        return Ok(());
    }
    for seg in path[1..].iter().chain(std::iter::once(last)) {
        let is_last = std::ptr::eq(seg, last);
        let next = match (seg, cur) {
            (Seg::Index(i), Value::Array(a)) => a.get_mut(*i),
            (Seg::Key(name), Value::Array(a)) => a
                .iter_mut()
                .find(|v| v.get("name").and_then(Value::as_str) == Some(*name)),
            (Seg::Key(k), Value::Table(t)) => t.get_mut(*k),
            _ => None,
        };
        cur = next.ok_or_else(|| err("no such key".into()))?;
        if is_last {
            *cur = parse_value(value);
        }
    }
    Ok(())
}
