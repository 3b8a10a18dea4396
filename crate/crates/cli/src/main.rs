use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use toml::{Table, Value};

use preomp::costsim::{
    analytic_inner, analytic_outer, crossing, csv_row, grid, load_scenario, parse_override,
    report_toml, simulate_with, sweep, threshold_outer_work, RunLabel, SimProgram, Strategy,
    CSV_HEADER,
};
use preomp::decider::DeciderKind;
use preomp::frontend::{check_source, extract_descriptors, Severity};
use preomp::transformer::{emit_c, transform, GenerationMode};

#[derive(Parser)]
#[command(
    name = "preomp",
    version,
    about = "Directive-driven loop parallelisation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite `#pragma preomp` loops into OpenMP C with runtime decisions.
    Transpile(TranspileArgs),
    /// Run a loop-nest scenario in virtual time.
    Simulate(SimulateArgs),
    /// Evaluate the closed-form cost model of a two-level nest.
    Model(ModelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Duplicate,
    Ompif,
}

impl From<Mode> for GenerationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Duplicate => GenerationMode::Duplicate,
            Mode::Ompif => GenerationMode::OmpIf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Decider {
    Heuristic,
    Profiling,
    #[value(name = "relaxed_profiling")]
    RelaxedProfiling,
}

impl From<Decider> for DeciderKind {
    fn from(d: Decider) -> Self {
        match d {
            Decider::Heuristic => DeciderKind::Heuristic,
            Decider::Profiling => DeciderKind::Profiling,
            Decider::RelaxedProfiling => DeciderKind::RelaxedProfiling,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Toml,
    Csv,
}

#[derive(clap::Args)]
struct TranspileArgs {
    /// C source file with preomp directives.
    input: PathBuf,
    /// Output C file; the manifest is written next to it with a `.manifest` suffix.
    #[arg(short, long)]
    output: PathBuf,
    /// Code generation mode.
    #[arg(long, value_enum, default_value = "duplicate")]
    mode: Mode,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Thread counts, comma separated.
    #[arg(long, env = "PREOMP_THREADS", value_delimiter = ',', required = true)]
    threads: Vec<usize>,
    /// Decision functions, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "heuristic")]
    decider: Vec<Decider>,
    /// Code generation mode being modelled.
    #[arg(long, value_enum, default_value = "duplicate")]
    mode: Mode,
    /// Statically parallelise the named level (or `none` for a serial run)
    /// instead of asking a decider.
    #[arg(long, value_name = "LEVEL")]
    force: Option<String>,
    /// Override a scenario key, e.g. `levels.inner.count=32`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Include the decision trace in the report.
    #[arg(long)]
    trace: bool,
    /// Report format; csv prints one row per thread count and decider.
    #[arg(long, value_enum, default_value = "toml")]
    format: Format,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// Outer loop iteration count.
    #[arg(long)]
    outer_iters: i64,
    /// Inner loop iteration count.
    #[arg(long)]
    inner_iters: i64,
    /// Work between the loops per outer iteration.
    #[arg(long, default_value_t = 0.0)]
    t_outer: f64,
    /// Work per inner iteration.
    #[arg(long)]
    t_inner: f64,
    /// Threads when the outer loop is parallel.
    #[arg(long)]
    outer_threads: i64,
    /// Threads when the inner loop is parallel.
    #[arg(long)]
    inner_threads: i64,
    /// Also simulate both static strategies over a grid of t_outer values.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 0.0)]
    sweep_start: f64,
    /// Defaults to twice the threshold.
    #[arg(long)]
    sweep_stop: Option<f64>,
    #[arg(long, default_value_t = 0.001)]
    sweep_step: f64,
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn run_transpile(a: &TranspileArgs) -> Result<()> {
    let src =
        fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (tree, diags) = check_source(&src);
    let name = a.input.display();
    for d in &diags {
        eprintln!("{name}:{d}");
    }
    let errors = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .count();
    let Some(tree) = tree.filter(|_| errors == 0) else {
        bail!("{name}: {errors} error(s); no output written");
    };
    let descriptors = extract_descriptors(&tree)?;
    let out = transform(&tree, &descriptors, a.mode.into())?;
    let unit = emit_c(&out);
    fs::write(&a.output, &unit.text).with_context(|| format!("writing {}", a.output.display()))?;
    let mpath = manifest_path(&a.output);
    fs::write(&mpath, unit.manifest_text())
        .with_context(|| format!("writing {}", mpath.display()))?;
    Ok(())
}

fn run_simulate(a: &SimulateArgs) -> Result<()> {
    let src = fs::read_to_string(&a.scenario)
        .with_context(|| format!("reading {}", a.scenario.display()))?;
    let overrides = a
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let program = load_scenario(&src, &overrides)
        .with_context(|| format!("loading {}", a.scenario.display()))?;
    if a.threads.contains(&0) {
        bail!("--threads values must be at least 1");
    }

    let strategies: Vec<(String, Strategy)> = match &a.force {
        Some(level) if level == "none" => vec![("serial".into(), Strategy::Force(None))],
        Some(level) => {
            let i = program
                .level_index(level)
                .with_context(|| format!("--force: no level named `{level}`"))?;
            vec![(format!("forced:{level}"), Strategy::Force(Some(i)))]
        }
        None => a
            .decider
            .iter()
            .map(|&d| {
                let k = DeciderKind::from(d);
                (k.to_string(), Strategy::Decide(k))
            })
            .collect(),
    };
    let runs = a.threads.len() * strategies.len();
    if a.format == Format::Toml && runs > 1 {
        bail!("several thread counts or deciders need --format csv");
    }
    if a.format == Format::Csv && a.trace {
        bail!("--trace is only available with --format toml");
    }

    if a.format == Format::Csv {
        println!("{CSV_HEADER}");
    }
    for &threads in &a.threads {
        for (name, strategy) in &strategies {
            let report = simulate_with(&program, threads, *strategy, a.mode.into())?;
            let label = RunLabel {
                threads,
                strategy: name.clone(),
                mode: a.mode.into(),
            };
            match a.format {
                Format::Toml => print!("{}", report_toml(&label, &report, a.trace)),
                Format::Csv => println!("{}", csv_row(&label, &report)),
            }
        }
    }
    Ok(())
}

fn run_model(a: &ModelArgs) -> Result<()> {
    for (flag, v) in [
        ("--outer-iters", a.outer_iters),
        ("--inner-iters", a.inner_iters),
        ("--outer-threads", a.outer_threads),
        ("--inner-threads", a.inner_threads),
    ] {
        if v < 1 {
            bail!("{flag} must be at least 1");
        }
    }
    if !(a.t_outer >= 0.0 && a.t_inner >= 0.0) {
        bail!("--t-outer and --t-inner must be non-negative");
    }
    let threshold =
        threshold_outer_work(a.inner_iters, a.t_inner, a.outer_threads, a.inner_threads)?;
    let mut t = Table::new();
    t.insert(
        "analytic_outer".into(),
        Value::Float(analytic_outer(
            a.outer_iters,
            a.inner_iters,
            a.t_outer,
            a.t_inner,
            a.outer_threads,
        )),
    );
    t.insert(
        "analytic_inner".into(),
        Value::Float(analytic_inner(
            a.outer_iters,
            a.inner_iters,
            a.t_outer,
            a.t_inner,
            a.inner_threads,
        )),
    );
    t.insert("threshold_outer_work".into(), Value::Float(threshold));
    if a.sweep {
        let stop = a.sweep_stop.unwrap_or(2.0 * threshold);
        let g = grid(a.sweep_start, stop, a.sweep_step)?;
        let template = SimProgram::synthetic(a.outer_iters, a.inner_iters, 0.0, a.t_inner);
        let points = sweep(
            &template,
            a.outer_threads as usize,
            a.inner_threads as usize,
            &g,
        )?;
        match crossing(&points) {
            Ok(c) => t.insert("crossing".into(), Value::Float(c)),
            Err(e) => t.insert("crossing_error".into(), Value::String(e.to_string())),
        };
        let rows = points
            .iter()
            .map(|p| {
                let mut r = Table::new();
                r.insert("t_outer".into(), Value::Float(p.t_outer));
                r.insert("outer".into(), Value::Float(p.outer));
                r.insert("inner".into(), Value::Float(p.inner));
                let faster = if p.outer <= p.inner { "outer" } else { "inner" };
                r.insert("faster".into(), Value::String(faster.into()));
                Value::Table(r)
            })
            .collect();
        t.insert("sweep".into(), Value::Array(rows));
    }
    print!("{}", toml::to_string(&t)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transpile(a) => run_transpile(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Model(a) => run_model(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
