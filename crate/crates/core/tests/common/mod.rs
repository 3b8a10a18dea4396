#![allow(dead_code)]

use std::path::{Path, PathBuf};

use proptest::prelude::*;

use preomp::costsim::{Count, LoopLevel, OverheadModel, SimProgram};

pub fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// Durations that are exact in binary floating point, so that sums do not
/// depend on evaluation order.
pub fn dyadic() -> impl Strategy<Value = f64> {
    (0u32..=16).prop_map(|k| f64::from(k) / 8.0)
}

pub fn overheads() -> impl Strategy<Value = OverheadModel> {
    (dyadic(), dyadic(), dyadic(), any::<bool>()).prop_map(|(r, d, i, s)| OverheadModel {
        region_create: r,
        decision_call: d / 4.0,
        instrument_call: i / 4.0,
        ompif_serial_region: s,
    })
}

/// Level `k` of `depth`; counts may be tables keyed by the enclosing level
/// when `tables` is set.
fn level(k: usize, depth: usize, tables: bool) -> impl Strategy<Value = LoopLevel> {
    let innermost = k + 1 == depth;
    let count = if tables && k > 0 {
        prop_oneof![
            (0i64..10).prop_map(Count::Constant),
            prop::collection::vec(0i64..10, 10)
                .prop_map(|values| Count::Table { by: None, values }),
        ]
        .boxed()
    } else {
        (0i64..10).prop_map(Count::Constant).boxed()
    };
    (
        count,
        dyadic(),
        any::<bool>(),
        prop::sample::select(vec![0.5, 1.0, 2.0]),
    )
        .prop_map(move |(count, w, par, threshold)| {
            let mut l = LoopLevel::new(&format!("l{k}"), 0)
                .parallelisable(par)
                .threshold(threshold);
            l.count = count;
            if innermost {
                l.body_work = w;
            } else {
                l.pre_work = w;
            }
            l
        })
}

fn levels(tables: bool) -> impl Strategy<Value = Vec<LoopLevel>> {
    (1usize..=3).prop_flat_map(move |depth| {
        (0..depth)
            .map(|k| level(k, depth, tables))
            .collect::<Vec<_>>()
    })
}

pub fn program_with(tables: bool) -> impl Strategy<Value = SimProgram> {
    (levels(tables), 1u64..=3, overheads()).prop_map(|(levels, repeats, overheads)| SimProgram {
        levels,
        repeats,
        overheads,
        perturbation: 0.0,
    })
}

pub fn program() -> impl Strategy<Value = SimProgram> {
    program_with(true)
}

pub fn threads() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 2, 3, 4, 6, 8, 16])
}

/// Iteration count of level `k` under the enclosing indices `idx`.
pub fn count_at(p: &SimProgram, k: usize, idx: &[i64]) -> i64 {
    match &p.levels[k].count {
        Count::Constant(c) => *c,
        Count::Table { by, values } => {
            let key = match by {
                Some(name) => p.level_index(name).unwrap(),
                None => k - 1,
            };
            values[idx[key] as usize]
        }
    }
}

/// Fully serial time of one repeat with no overheads, by direct recursion.
pub fn serial_time(p: &SimProgram) -> f64 {
    fn go(p: &SimProgram, k: usize, idx: &mut Vec<i64>) -> f64 {
        let n = count_at(p, k, idx);
        let l = &p.levels[k];
        if k + 1 == p.levels.len() {
            return n as f64 * l.body_work;
        }
        let mut t = 0.0;
        for it in 0..n {
            idx.push(it);
            t += l.pre_work + go(p, k + 1, idx);
            idx.pop();
        }
        t
    }
    go(p, 0, &mut Vec::new())
}

/// Visits of level `k` in execution order, as (enclosing indices, own count,
/// innermost iterations beneath the visit).
pub fn visits(p: &SimProgram, k: usize) -> Vec<(Vec<i64>, i64, i64)> {
    fn work(p: &SimProgram, k: usize, idx: &mut Vec<i64>) -> i64 {
        let n = count_at(p, k, idx);
        if k + 1 == p.levels.len() {
            return n;
        }
        let mut w = 0;
        for it in 0..n {
            idx.push(it);
            w += work(p, k + 1, idx);
            idx.pop();
        }
        w
    }
    fn go(
        p: &SimProgram,
        d: usize,
        k: usize,
        idx: &mut Vec<i64>,
        out: &mut Vec<(Vec<i64>, i64, i64)>,
    ) {
        if d == k {
            let n = count_at(p, k, idx);
            out.push((idx.clone(), n, work(p, k, idx)));
            return;
        }
        for it in 0..count_at(p, d, idx) {
            idx.push(it);
            go(p, d + 1, k, idx, out);
            idx.pop();
        }
    }
    let mut out = Vec::new();
    go(p, 0, k, &mut Vec::new(), &mut out);
    out
}
