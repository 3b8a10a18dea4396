use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use toml::Table;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_preomp"));
    c.env_remove("PREOMP_THREADS");
    c
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn listing7() -> PathBuf {
    repo("crates/core/tests/corpus/listing7.c")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("preomp-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(c: &mut Command) -> (Output, String, String) {
    let out = c.output().unwrap();
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    (out, stdout, stderr)
}

fn ok(c: &mut Command) -> String {
    let (out, stdout, stderr) = run(c);
    assert!(out.status.success(), "stderr: {stderr}");
    stdout
}

fn fails(c: &mut Command) -> String {
    let (out, _, stderr) = run(c);
    assert_eq!(out.status.code(), Some(1), "stderr: {stderr}");
    stderr
}

#[test]
fn transpile_duplicate_matches_golden() {
    let out = scratch("dup.c");
    ok(bin()
        .arg("transpile")
        .arg(listing7())
        .arg("-o")
        .arg(&out)
        .args(["--mode", "duplicate"]));
    let text = fs::read_to_string(&out).unwrap();
    let golden = fs::read_to_string(repo("crates/core/tests/golden/listing7.duplicate.c")).unwrap();
    assert_eq!(text, golden);
    let manifest = fs::read_to_string(out.with_extension("c.manifest")).unwrap();
    assert_eq!(
        manifest,
        "loop_id,nest_id,depth,line,column,mode\n0,0,0,5,3,duplicate\n1,0,1,7,5,duplicate\n"
    );
}

#[test]
fn transpile_ompif() {
    let out = scratch("omp.c");
    ok(bin()
        .arg("transpile")
        .args(["--mode", "ompif"])
        .arg(listing7())
        .arg("-o")
        .arg(&out));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches(" if(preomp_decide(").count(), 2);
    let golden = fs::read_to_string(repo("crates/core/tests/golden/listing7.ompif.c")).unwrap();
    assert_eq!(text, golden);
}

#[test]
fn transpile_empty_program() {
    let src = scratch("empty.c");
    fs::write(&src, "void f(void) {\n}\n").unwrap();
    let out = scratch("empty.out.c");
    ok(bin().arg("transpile").arg(&src).arg("-o").arg(&out));
    assert_eq!(fs::read_to_string(&out).unwrap(), "void f(void) {\n}\n");
    assert_eq!(
        fs::read_to_string(out.with_extension("c.manifest")).unwrap(),
        "loop_id,nest_id,depth,line,column,mode\n"
    );
}

#[test]
fn transpile_reports_diagnostics() {
    let src = scratch("bad.c");
    fs::write(
        &src,
        "void f(int n) {\n  int i;\n  #pragma preomp parallel for private(q)\n  for (i = 0; i < n; i++) {\n  }\n}\n",
    )
    .unwrap();
    let out = scratch("bad.out.c");
    let _ = fs::remove_file(&out);
    let stderr = fails(bin().arg("transpile").arg(&src).arg("-o").arg(&out));
    assert!(stderr.contains("bad.c:3:"), "{stderr}");
    assert!(stderr.contains("error"), "{stderr}");
    assert!(!out.exists());

    fs::write(
        &src,
        "void f(int n) {\n  #pragma preomp parallel for\n  while (n) { n--; }\n}\n",
    )
    .unwrap();
    fails(bin().arg("transpile").arg(&src).arg("-o").arg(&out));
    fails(
        bin()
            .arg("transpile")
            .arg(scratch("missing.c"))
            .arg("-o")
            .arg(&out),
    );
}

#[test]
fn simulate_uneven_distribution() {
    let stdout = ok(bin()
        .arg("simulate")
        .arg(repo("scenarios/synthetic.toml"))
        .args([
            "--threads",
            "6",
            "--decider",
            "heuristic",
            "--set",
            "repeats=1",
        ]));
    let t: Table = stdout.parse().unwrap();
    assert_eq!(t["total_time"].as_float(), Some(32.0));
    assert_eq!(
        t["per_level_parallel_counts"]["outer"].as_integer(),
        Some(1)
    );
    assert_eq!(t["strategy"].as_str(), Some("heuristic"));
    assert!(t.get("trace").is_none());
}

#[test]
fn simulate_forced_and_serial() {
    let s = repo("scenarios/synthetic.toml");
    let stdout = ok(bin().arg("simulate").arg(&s).args([
        "--threads",
        "6",
        "--force",
        "inner",
        "--set",
        "repeats=1",
    ]));
    let t: Table = stdout.parse().unwrap();
    assert_eq!(t["total_time"].as_float(), Some(24.0));
    assert_eq!(t["strategy"].as_str(), Some("forced:inner"));
    let stdout = ok(bin().arg("simulate").arg(&s).args(["--threads", "1"]));
    let t: Table = stdout.parse().unwrap();
    assert_eq!(t["total_time"].as_float(), Some(3.0 * 128.0));
    let stderr = fails(
        bin()
            .arg("simulate")
            .arg(&s)
            .args(["--threads", "2", "--force", "nope"]),
    );
    assert!(stderr.contains("nope"), "{stderr}");
}

#[test]
fn simulate_trace_and_threads_env() {
    let stdout = ok(bin()
        .env("PREOMP_THREADS", "16")
        .arg("simulate")
        .arg(repo("scenarios/synthetic.toml"))
        .args(["--decider", "relaxed_profiling", "--trace"]));
    let t: Table = stdout.parse().unwrap();
    assert_eq!(t["threads"].as_integer(), Some(16));
    assert_eq!(
        t["trace_columns"].as_str(),
        Some("loop_id,invocation_index,iters,threads,outer_active,decider_phase,decision,reason")
    );
    let trace = t["trace"].as_array().unwrap();
    assert_eq!(trace.len() as i64, t["decisions"].as_integer().unwrap());
    assert_eq!(
        trace[0].as_str(),
        Some("0,0,8,16,false,unprofiled,serial_profiled,profile_serial")
    );
}

#[test]
fn simulate_reprofiles_on_alternating_extents() {
    let stdout = ok(bin()
        .arg("simulate")
        .arg(repo("scenarios/cfd_alternating.toml"))
        .args([
            "--threads",
            "16",
            "--decider",
            "relaxed_profiling",
            "--trace",
            "--set",
            "repeats=1",
        ]));
    let t: Table = stdout.parse().unwrap();
    let invalidated: Vec<_> = t["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .filter(|l| l.ends_with(",invalidated"))
        .collect();
    assert!(!invalidated.is_empty());
    assert!(invalidated.iter().all(|l| l.starts_with("2,")));
}

#[test]
fn simulate_csv() {
    let stdout = ok(bin()
        .arg("simulate")
        .arg(repo("scenarios/synthetic.toml"))
        .args([
            "--threads",
            "2,16",
            "--decider",
            "heuristic,profiling",
            "--format",
            "csv",
        ]));
    let lines: Vec<_> = stdout.lines().collect();
    assert_eq!(
        lines[0],
        "threads,strategy,mode,total_time,last_repeat_time,bookkeeping_ops,decisions,regions"
    );
    assert_eq!(lines.len(), 5);
    assert!(
        lines[1].starts_with("2,heuristic,duplicate,192,64,"),
        "{}",
        lines[1]
    );
    assert!(
        lines[4].starts_with("16,profiling,duplicate,"),
        "{}",
        lines[4]
    );
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "--threads",
        "12",
        "--decider",
        "profiling",
        "--mode",
        "ompif",
        "--trace",
    ];
    let s = repo("scenarios/three_level.toml");
    let a = ok(bin().arg("simulate").arg(&s).args(args));
    let b = ok(bin().arg("simulate").arg(&s).args(args));
    assert_eq!(a, b);
}

#[test]
fn simulate_errors() {
    let s = repo("scenarios/synthetic.toml");
    let stderr = fails(bin().arg("simulate").arg(&s).args(["--threads", "2,4"]));
    assert!(stderr.contains("--format csv"), "{stderr}");
    let stderr =
        fails(
            bin()
                .arg("simulate")
                .arg(&s)
                .args(["--threads", "2", "--format", "csv", "--trace"]),
        );
    assert!(stderr.contains("--trace"), "{stderr}");
    let stderr = fails(bin().arg("simulate").arg(&s).args(["--threads", "0"]));
    assert!(stderr.contains("at least 1"), "{stderr}");
    let stderr = fails(bin().arg("simulate").arg(&s).args([
        "--threads",
        "2",
        "--set",
        "levels.nope.count=3",
    ]));
    assert!(stderr.contains("levels.nope.count"), "{stderr}");

    let bad = scratch("bad.toml");
    fs::write(
        &bad,
        fs::read_to_string(&s)
            .unwrap()
            .replace("body_work = 1.0", "body_work = \"slow\""),
    )
    .unwrap();
    let stderr = fails(bin().arg("simulate").arg(&bad).args(["--threads", "2"]));
    assert!(stderr.contains("levels[1].body_work"), "{stderr}");

    let (out, _, stderr) = run(bin().arg("simulate").arg(&s));
    assert!(!out.status.success());
    assert!(stderr.contains("--threads"), "{stderr}");
}

#[test]
fn model_threshold() {
    let stdout = ok(bin().args([
        "model",
        "--outer-iters",
        "8",
        "--inner-iters",
        "16",
        "--t-inner",
        "0.0409",
        "--outer-threads",
        "8",
        "--inner-threads",
        "16",
    ]));
    let t: Table = stdout.parse().unwrap();
    let th = t["threshold_outer_work"].as_float().unwrap();
    assert!((th - 0.0468).abs() < 0.0005, "{th}");
    assert_eq!(t["analytic_outer"].as_float(), Some(16.0 * 0.0409));
    assert!(t.get("sweep").is_none());
}

#[test]
fn model_sweep_and_equal_threads() {
    let base = [
        "model",
        "--outer-iters",
        "8",
        "--inner-iters",
        "16",
        "--t-inner",
        "0.0409",
    ];
    let stdout =
        ok(bin()
            .args(base)
            .args(["--outer-threads", "8", "--inner-threads", "16", "--sweep"]));
    let t: Table = stdout.parse().unwrap();
    assert_eq!(t["crossing"].as_float(), Some(0.047));
    let rows = t["sweep"].as_array().unwrap();
    assert_eq!(rows[0]["faster"].as_str(), Some("inner"));
    assert_eq!(rows.last().unwrap()["faster"].as_str(), Some("outer"));

    let stdout = ok(bin()
        .args(base)
        .args(["--outer-threads", "8", "--inner-threads", "8"]));
    let t: Table = stdout.parse().unwrap();
    assert_eq!(t["threshold_outer_work"].as_float(), Some(0.0));
}

#[test]
fn model_rejects_one_outer_thread() {
    let stderr = fails(bin().args([
        "model",
        "--outer-iters",
        "8",
        "--inner-iters",
        "16",
        "--t-inner",
        "1",
        "--outer-threads",
        "1",
        "--inner-threads",
        "16",
    ]));
    assert!(stderr.starts_with("error:"), "{stderr}");
}

#[test]
fn help_lists_every_flag() {
    let cases: [(&str, &[&str]); 3] = [
        ("transpile", &["--output", "--mode"]),
        (
            "simulate",
            &[
                "--threads",
                "--decider",
                "--mode",
                "--force",
                "--set",
                "--trace",
                "--format",
                "PREOMP_THREADS",
            ],
        ),
        (
            "model",
            &[
                "--outer-iters",
                "--inner-iters",
                "--t-outer",
                "--t-inner",
                "--outer-threads",
                "--inner-threads",
                "--sweep",
                "--sweep-start",
                "--sweep-stop",
                "--sweep-step",
            ],
        ),
    ];
    for (sub, flags) in cases {
        let help = ok(bin().args([sub, "--help"]));
        for f in flags {
            assert!(help.contains(f), "{sub} --help lacks {f}:\n{help}");
        }
    }
    let top = ok(bin().arg("--help"));
    for sub in ["transpile", "simulate", "model"] {
        assert!(top.contains(sub));
    }
}
