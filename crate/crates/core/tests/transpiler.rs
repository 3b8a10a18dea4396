use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use proptest::prelude::*;

use preomp::frontend::ast::{walk_stmts, Item, StmtKind, SyntaxTree};
use preomp::frontend::lexer::token_texts;
use preomp::frontend::{directive_count, extract_descriptors, parse_unit, validate, Severity};
use preomp::transformer::sites::{DECIDE, ENTER, EXIT};
use preomp::transformer::{emit_c, strip_instrumentation, transform, Branch, GenerationMode};

const MODES: [GenerationMode; 2] = [GenerationMode::Duplicate, GenerationMode::OmpIf];

fn data_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(sub)
}

fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<_> = fs::read_dir(data_dir("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "c"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect()
}

fn transpile(src: &str, mode: GenerationMode) -> String {
    let tree = parse_unit(src).unwrap();
    let ds = extract_descriptors(&tree).unwrap();
    emit_c(&transform(&tree, &ds, mode).unwrap()).text
}

fn pragma_lines(src: &str) -> usize {
    src.lines()
        .filter(|l| l.trim_start().starts_with("#pragma preomp"))
        .count()
}

#[test]
fn corpus_is_large_enough_and_valid() {
    let c = corpus();
    assert!(c.len() >= 10, "{} programs", c.len());
    assert!(c.iter().any(|(n, _)| n == "poorly_nested"));
    for (name, src) in &c {
        let tree = parse_unit(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let errors: Vec<_> = validate(&tree)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
    }
}

#[test]
fn goldens() {
    let src = fs::read_to_string(data_dir("corpus").join("listing7.c")).unwrap();
    for mode in MODES {
        let path = data_dir("golden").join(format!("listing7.{mode}.c"));
        let got = transpile(&src, mode);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            fs::write(&path, &got).unwrap();
        }
        let want = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; run with UPDATE_GOLDEN=1", path.display()));
        assert_eq!(got, want, "{mode} output differs from {}", path.display());
    }
}

#[test]
fn listing7_site_counts() {
    let src = fs::read_to_string(data_dir("corpus").join("listing7.c")).unwrap();
    let dup = transpile(&src, GenerationMode::Duplicate);
    assert_eq!(decide_ids(&dup), [0, 1]);
    assert_eq!(dup.matches("if (preomp_decide(").count(), 3);
    assert_eq!(dup.matches("work();").count(), 4);
    assert_eq!(dup.matches("#include \"preomp_rt.h\"").count(), 1);
    let omp = transpile(&src, GenerationMode::OmpIf);
    let if_lines = omp
        .lines()
        .filter(|l| l.trim_start().starts_with("#pragma omp parallel for") && l.contains(" if("))
        .count();
    assert_eq!(if_lines, 2);
    assert_eq!(omp.matches("work();").count(), 1);
    assert_eq!(transpile(&src, GenerationMode::Duplicate), dup);
}

#[test]
fn strip_round_trip_over_corpus() {
    for (name, src) in corpus() {
        let original = parse_unit(&src).unwrap().without_spans();
        for mode in MODES {
            let text = transpile(&src, mode);
            let emitted = parse_unit(&text).unwrap_or_else(|e| panic!("{name} {mode}: {e}"));
            for branch in [Branch::Serial, Branch::Parallel] {
                let stripped = strip_instrumentation(&emitted, branch)
                    .unwrap_or_else(|e| panic!("{name} {mode} {branch:?}: {e}"));
                assert_eq!(
                    stripped.without_spans(),
                    original,
                    "{name} {mode} {branch:?}"
                );
            }
        }
    }
}

#[test]
fn strip_rejects_tampered_branches() {
    let src = fs::read_to_string(data_dir("corpus").join("listing7.c")).unwrap();
    let text = transpile(&src, GenerationMode::Duplicate);
    let pos = text.rfind("work();").unwrap();
    let tampered = format!("{}work(); work();{}", &text[..pos], &text[pos + 7..]);
    let tree = parse_unit(&tampered).unwrap();
    assert!(strip_instrumentation(&tree, Branch::Serial).is_err());
    let stray = text.replacen("preomp_exit(1);", "preomp_exit(1); preomp_enter(7);", 1);
    assert!(strip_instrumentation(&parse_unit(&stray).unwrap(), Branch::Parallel).is_err());
}

#[test]
fn untransformed_emit_is_token_equivalent() {
    for (name, src) in corpus() {
        let out = emit_c(&parse_unit(&src).unwrap()).text;
        assert_eq!(
            token_texts(&out).unwrap(),
            token_texts(&src).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn no_directives_is_identity_in_both_modes() {
    let src = fs::read_to_string(data_dir("corpus").join("no_directives.c")).unwrap();
    for mode in MODES {
        let out = transpile(&src, mode);
        assert_eq!(token_texts(&out).unwrap(), token_texts(&src).unwrap());
        assert!(!out.contains("preomp_rt.h"));
    }
}

#[test]
fn descriptor_count_matches_pragma_lines() {
    for (name, src) in corpus() {
        let tree = parse_unit(&src).unwrap();
        let ds = extract_descriptors(&tree).unwrap();
        assert_eq!(ds.len(), pragma_lines(&src), "{name}");
        assert_eq!(directive_count(&tree), ds.len(), "{name}");
        let ids: Vec<_> = ds.iter().map(|d| d.loop_id).collect();
        assert_eq!(ids, (0..ds.len()).collect::<Vec<_>>(), "{name}");
    }
}

#[test]
fn synthetic_three_deep_manifest() {
    let src = "\
void delay(int reps);

void bench(int num_iters, int outer_iters, int inner_iters, int outer_delayreps, int inner_delayreps) {
  int i, j, k;
  for (i = 0; i < num_iters; i++) {
    #pragma preomp parallel for private(k)
    for (j = 0; j < outer_iters; j++) {
      delay(outer_delayreps);
      #pragma preomp parallel for
      for (k = 0; k < inner_iters; k++) {
        delay(inner_delayreps);
      }
    }
  }
}
";
    let tree = parse_unit(src).unwrap();
    let ds = extract_descriptors(&tree).unwrap();
    let unit = emit_c(&transform(&tree, &ds, GenerationMode::Duplicate).unwrap());
    let ids: Vec<_> = unit.manifest.iter().map(|m| m.loop_id).collect();
    let depths: Vec<_> = unit.manifest.iter().map(|m| m.depth).collect();
    assert_eq!(ids, [0, 1]);
    assert_eq!(depths, [0, 1]);
    assert!(unit
        .manifest
        .iter()
        .all(|m| m.mode == Some(GenerationMode::Duplicate) && m.nest_id == 0));
}

/// Calls to `name` with their argument counts, read off the token stream.
fn call_arities(text: &str, name: &str) -> Vec<usize> {
    let toks = token_texts(text).unwrap();
    let mut out = Vec::new();
    for i in 0..toks.len() {
        if toks[i] != name || toks.get(i + 1).map(String::as_str) != Some("(") {
            continue;
        }
        let (mut depth, mut commas, mut j) = (0, 0, i + 1);
        loop {
            match toks[j].as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                "," if depth == 1 => commas += 1,
                _ => {}
            }
            j += 1;
        }
        out.push(commas + 1);
    }
    out
}

#[test]
fn decision_calls_have_five_arguments() {
    for (name, src) in corpus() {
        for mode in MODES {
            let text = transpile(&src, mode);
            let text = strip_pragma_prefix(&text);
            let arities = call_arities(&text, DECIDE);
            assert_eq!(decide_ids(&text).len(), pragma_lines(&src), "{name} {mode}");
            assert!(
                arities.iter().all(|&a| a == 5),
                "{name} {mode}: {arities:?}"
            );
        }
    }
}

/// Distinct loop ids passed to decision calls.
fn decide_ids(text: &str) -> Vec<usize> {
    let mut ids: Vec<usize> = text
        .match_indices("preomp_decide(")
        .map(|(i, m)| {
            let rest = &text[i + m.len()..];
            rest[..rest.find(',').unwrap()].trim().parse().unwrap()
        })
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Turns pragma lines into ordinary lines so that calls inside an `if(...)`
/// clause are tokenised.
fn strip_pragma_prefix(text: &str) -> String {
    text.lines()
        .map(
            |l| match l.trim_start().strip_prefix("#pragma omp parallel for") {
                Some(rest) => rest.to_string(),
                None => l.to_string(),
            },
        )
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn enter_exit_calls_nest_properly() {
    for (name, src) in corpus() {
        for mode in MODES {
            let toks = token_texts(&transpile(&src, mode)).unwrap();
            let mut stack = Vec::new();
            for w in toks.windows(4) {
                if w[1] != "(" || w[3] != ")" {
                    continue;
                }
                if w[0] == ENTER {
                    stack.push(w[2].clone());
                } else if w[0] == EXIT {
                    assert_eq!(stack.pop().as_ref(), Some(&w[2]), "{name} {mode}");
                }
            }
            assert!(stack.is_empty(), "{name} {mode}");
        }
    }
}

#[test]
fn clauses_are_preserved() {
    for (name, src) in corpus() {
        let tree = parse_unit(&src).unwrap();
        let mut want: HashMap<usize, Vec<(String, Vec<String>)>> = HashMap::new();
        for d in extract_descriptors(&tree).unwrap() {
            let cl = d
                .data_clauses
                .iter()
                .map(|c| (c.kind.as_str().to_string(), c.idents.clone()))
                .collect();
            want.insert(d.loop_id, cl);
        }
        for mode in MODES {
            let emitted = parse_unit(&transpile(&src, mode)).unwrap();
            let got = omp_pragmas_by_site(&emitted);
            let mut ids: Vec<_> = got.iter().map(|g| g.0).collect();
            ids.dedup();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), want.len(), "{name} {mode}");
            for (id, text) in got {
                let clauses = parse_clauses(&text);
                assert_eq!(clauses, want[&id], "{name} {mode} loop {id}: {text}");
            }
        }
    }
}

/// Emitted `omp parallel for` pragma text keyed by the loop id of the
/// decision call that governs it.
fn omp_pragmas_by_site(tree: &SyntaxTree) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for item in &tree.items {
        let Item::Function(f) = item else { continue };
        let Some(b) = &f.body else { continue };
        let mut last_enter = None;
        walk_stmts(&b.stmts, &mut |s| match &s.kind {
            StmtKind::Expr(e) => {
                let t = e.to_string();
                if let Some(rest) = t.strip_prefix("preomp_enter(") {
                    last_enter = rest.trim_end_matches(')').parse::<usize>().ok();
                }
            }
            StmtKind::Pragma(p) if p.starts_with("pragma omp parallel for") => {
                out.push((last_enter.expect("enter precedes pragma"), p.clone()));
            }
            _ => {}
        });
    }
    out
}

fn parse_clauses(pragma: &str) -> Vec<(String, Vec<String>)> {
    let rest = pragma.trim_start_matches("pragma omp parallel for");
    let mut out = Vec::new();
    for kind in ["private", "shared"] {
        let mut s = rest;
        while let Some(i) = s.find(&format!("{kind}(")) {
            let after = &s[i + kind.len() + 1..];
            let close = after.find(')').unwrap();
            let idents = after[..close]
                .split(',')
                .map(|x| x.trim().to_string())
                .collect();
            out.push((i, kind.to_string(), idents));
            s = &after[close..];
        }
    }
    out.sort_by_key(|c| c.0);
    out.into_iter().map(|(_, k, v)| (k, v)).collect()
}

#[test]
fn manifest_lists_every_site_for_untransformed_trees() {
    for (name, src) in corpus() {
        let unit = emit_c(&parse_unit(&src).unwrap());
        assert_eq!(unit.manifest.len(), pragma_lines(&src), "{name}");
        assert!(unit.manifest.iter().all(|m| m.mode.is_none()), "{name}");
    }
}

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "n", "m", "x", "y"]).prop_map(str::to_string)
}

fn bound() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec!["a", "b", "n", "m"]).prop_map(str::to_string),
        (0i64..40).prop_map(|v| v.to_string()),
        prop::sample::select(vec!["n + 1", "m * 2", "(a + b) / 2"]).prop_map(str::to_string),
    ]
}

fn expr(depth: u32) -> BoxedStrategy<String> {
    let leaf = prop_oneof![ident(), (0i64..100).prop_map(|v| v.to_string())];
    if depth == 0 {
        return leaf.boxed();
    }
    prop_oneof![
        leaf,
        (
            expr(depth - 1),
            prop::sample::select(vec!["+", "-", "*", "/", "<", "=="]),
            expr(depth - 1)
        )
            .prop_map(|(l, op, r)| format!("({l} {op} {r})")),
        (ident(), expr(depth - 1)).prop_map(|(f, a)| format!("f{f}({a})")),
    ]
    .boxed()
}

/// Statements at loop nesting `level`; loops at each level use their own
/// induction variable `i<level>` and bodies only write `x` and `y`.
fn stmt(depth: u32, level: usize) -> BoxedStrategy<String> {
    let simple = prop_oneof![
        (prop::sample::select(vec!["x", "y"]), expr(2)).prop_map(|(v, e)| format!("{v} = {e};")),
        expr(2).prop_map(|e| format!("g({e});")),
        Just(";".to_string()),
    ];
    if depth == 0 {
        return simple.boxed();
    }
    let v = format!("i{level}");
    let body = prop::collection::vec(stmt(depth - 1, level + 1), 0..3).prop_map(|v| v.join("\n"));
    let flat = prop::collection::vec(stmt(depth - 1, level), 0..3).prop_map(|v| v.join("\n"));
    let (v1, v2) = (v.clone(), v);
    prop_oneof![
        simple,
        (bound(), any::<bool>(), body.clone()).prop_map(move |(b, le, body)| {
            let cmp = if le { "<=" } else { "<" };
            format!("for ({v1} = 0; {v1} {cmp} {b}; {v1}++) {{\n{body}\n}}")
        }),
        (
            bound(),
            prop::option::of(prop::sample::select(vec!["x", "y"])),
            any::<bool>(),
            body
        )
            .prop_map(move |(b, private, thr, body)| {
                let mut d = "#pragma preomp parallel for".to_string();
                if let Some(p) = private {
                    d.push_str(&format!(" private({p})"));
                }
                if thr {
                    d.push_str(" parallel_threshold(2.0)");
                }
                format!("{d}\nfor ({v2} = 1; {v2} < {b}; {v2} += 2) {{\n{body}\n}}")
            }),
        (expr(1), flat.clone(), flat)
            .prop_map(|(c, t, e)| format!("if ({c}) {{\n{t}\n}} else {{\n{e}\n}}")),
    ]
    .boxed()
}

fn program() -> impl Strategy<Value = String> {
    prop::collection::vec(stmt(3, 0), 0..4).prop_map(|body| {
        format!(
            "int g(int v);\nint fa(int v);\nint fb(int v);\nint fn(int v);\nint fm(int v);\nint fx(int v);\nint fy(int v);\n\nvoid f(int a, int b, int n, int m) {{\n  int x, y, i0, i1, i2, i3;\n{}\n}}\n",
            body.join("\n")
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn emit_parse_is_idempotent(src in program()) {
        let once = emit_c(&parse_unit(&src).unwrap()).text;
        let twice = emit_c(&parse_unit(&once).unwrap()).text;
        prop_assert_eq!(token_texts(&twice).unwrap(), token_texts(&once).unwrap());
        prop_assert_eq!(token_texts(&once).unwrap(), token_texts(&src).unwrap());
    }

    #[test]
    fn transform_then_strip_is_identity(src in program()) {
        let tree = parse_unit(&src).unwrap();
        let ds = extract_descriptors(&tree).unwrap();
        prop_assert_eq!(ds.len(), pragma_lines(&src));
        for mode in MODES {
            let text = emit_c(&transform(&tree, &ds, mode).unwrap()).text;
            let again = emit_c(&parse_unit(&text).unwrap()).text;
            prop_assert_eq!(&again, &text);
            let emitted = parse_unit(&text).unwrap();
            for branch in [Branch::Serial, Branch::Parallel] {
                let stripped = strip_instrumentation(&emitted, branch).unwrap();
                prop_assert_eq!(stripped.without_spans(), tree.without_spans());
            }
        }
    }
}
