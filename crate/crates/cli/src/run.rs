//! One function per subcommand. Each resolves its defaults into the config,
//! runs the experiment and returns the report document.

use polymer_core::lattice::burke::{self, BurkeEntry};
use polymer_core::lattice::experiment::{self, partition_limit_experiment};
use polymer_core::lattice::rwre::{self, BetaEnvironment, MAX_ENUMERATION_STEPS};
use polymer_core::lattice::{self, model_by_name, simulate_ordered, Boundary, GridSummary, LatticeGrid, MODEL_NAMES};
use polymer_core::maps::{identities, limits};
use polymer_core::stattest::stationarity::{self, verify_stationarity};
use polymer_core::stattest::{balance, dist_limit, stability, StabilityReport, STABILITY_ALLOWED};
use polymer_core::{Component, PolymerMap, Temperature, TestReport, Verdict, SCHEMA_VERSION};
use serde::Serialize;

use crate::config::{ExperimentConfig, Temp};
use crate::output::{report_rows, REPORT_CSV_HEADER};
use crate::{CliError, Sub};

/// Largest step count for which `rwre` also enumerates every walk.
const RWRE_ENUMERATION_STEPS: usize = 16;
const RWRE_TOL: f64 = 1e-12;

pub struct Outcome {
    pub json: String,
    pub csv: String,
    pub passed: bool,
    /// Human-readable lines for the terminal.
    pub lines: Vec<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum RunResult {
    Report(TestReport),
    Stability(StabilityReport),
}

impl RunResult {
    fn passed(&self) -> bool {
        match self {
            RunResult::Report(r) => r.passed(),
            RunResult::Stability(s) => s.passed(),
        }
    }

    fn reports(&self) -> Vec<&TestReport> {
        match self {
            RunResult::Report(r) => vec![r],
            RunResult::Stability(s) => s.runs.iter().collect(),
        }
    }
}

#[derive(Serialize)]
struct Entry {
    case: String,
    expect_pass: bool,
    as_expected: bool,
    #[serde(flatten)]
    result: RunResult,
}

type RunFn<'a> = Box<dyn Fn(u64) -> polymer_core::Result<TestReport> + Sync + 'a>;

struct Job<'a> {
    key: String,
    expect_pass: bool,
    run: RunFn<'a>,
}

impl<'a> Job<'a> {
    fn new(key: impl Into<String>, expect_pass: bool, run: impl Fn(u64) -> polymer_core::Result<TestReport> + Sync + 'a) -> Self {
        Self { key: key.into(), expect_pass, run: Box::new(run) }
    }
}

fn allowed(cfg: &ExperimentConfig, sub: Sub) -> Result<(), CliError> {
    use Sub::*;
    let ok: &[&str] = match sub {
        Identity => &["case", "n", "seed"],
        Limit => &["case", "schedule"],
        Db => &["case", "n", "seed", "seeds"],
        Stationary => &["case", "n", "seed", "seeds", "model", "temperature", "laws"],
        Simulate => &["case", "seed", "N", "M", "model", "temperature", "laws", "degenerate-x", "order"],
        Burke => &["case", "n", "seed", "seeds", "N", "M", "model", "temperature", "laws"],
        Rwre => &["seed", "N", "M", "law"],
        Zlimit => &["case", "n", "seed", "N", "M", "schedule"],
        DistLimit => &["case", "n", "seed", "seeds", "schedule"],
        List => &[],
    };
    let extra: Vec<&str> = cfg.present().into_iter().filter(|f| !ok.contains(f)).collect();
    if extra.is_empty() {
        Ok(())
    } else {
        let list = extra.iter().map(|f| format!("--{f}")).collect::<Vec<_>>().join(", ");
        Err(CliError::invalid(format!("{list} not used by `{}`", sub.name())))
    }
}

fn schedule_ok(s: &Option<Vec<f64>>) -> Result<(), CliError> {
    match s {
        Some(v) if v.len() < 3 => Err(CliError::invalid(format!("--schedule needs at least 3 values, got {}", v.len()))),
        Some(v) if v.iter().any(|x| !x.is_finite() || *x <= 0.0) => Err(CliError::invalid("--schedule values must be positive and finite")),
        _ => Ok(()),
    }
}

/// Runs a subcommand with defaults filled into `cfg`.
pub fn execute(sub: Sub, cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    allowed(cfg, sub)?;
    schedule_ok(&cfg.schedule)?;
    if cfg.seeds == Some(0) {
        return Err(CliError::invalid("--seeds must be at least 1"));
    }
    match sub {
        Sub::Simulate => return simulate_cmd(cfg),
        Sub::Rwre => return rwre_cmd(cfg),
        Sub::List => unreachable!("handled by the caller"),
        _ => {}
    }
    let jobs = jobs(sub, cfg)?;
    let seed = cfg.seed.unwrap_or(0);
    let seeds = cfg.seeds.unwrap_or(1);
    let mut entries = Vec::new();
    for j in &jobs {
        let result = if seeds > 1 {
            RunResult::Stability(stability(&j.key, seed, seeds, STABILITY_ALLOWED, |s| (j.run)(s))?)
        } else {
            RunResult::Report((j.run)(seed)?)
        };
        let as_expected = result.passed() == j.expect_pass;
        entries.push(Entry { case: j.key.clone(), expect_pass: j.expect_pass, as_expected, result });
    }
    Ok(document(sub, cfg, entries))
}

fn document(sub: Sub, cfg: &ExperimentConfig, entries: Vec<Entry>) -> Outcome {
    let passed = entries.iter().all(|e| e.as_expected);
    let mut csv = format!("{REPORT_CSV_HEADER}\n");
    let mut lines = Vec::new();
    for e in &entries {
        for r in e.result.reports() {
            report_rows(r, &mut csv);
        }
        let verdict = if e.result.passed() { "pass" } else { "fail" };
        let note = match &e.result {
            RunResult::Stability(s) => format!(" ({}/{} seeds failed)", s.failures, s.runs.len()),
            RunResult::Report(_) => String::new(),
        };
        let tag = if e.as_expected { "ok  " } else { "FAIL" };
        let expect = if e.expect_pass { "" } else { " [negative control]" };
        lines.push(format!("{tag} {} {verdict}{note}{expect}", e.case));
        if !e.as_expected {
            for r in e.result.reports() {
                for c in r.failing().take(5) {
                    lines.push(format!("       {}: {} vs {}", c.name, c.statistic, c.threshold));
                }
            }
        }
    }
    Outcome { json: Document::render(sub, cfg, passed, Entries { entries }), csv, passed, lines }
}

/// Top-level layout of every report file.
#[derive(Serialize)]
struct Document<'a, B: Serialize> {
    schema_version: u32,
    subcommand: &'static str,
    config: &'a ExperimentConfig,
    verdict: Verdict,
    #[serde(flatten)]
    body: B,
}

impl<'a, B: Serialize> Document<'a, B> {
    fn render(sub: Sub, config: &'a ExperimentConfig, passed: bool, body: B) -> String {
        to_json(&Document { schema_version: SCHEMA_VERSION, subcommand: sub.name(), config, verdict: Verdict::from_bool(passed), body })
    }
}

#[derive(Serialize)]
struct Entries {
    entries: Vec<Entry>,
}

#[derive(Serialize)]
struct Simulated {
    summary: GridSummary,
}

#[derive(Serialize)]
struct Walks {
    report: TestReport,
    values: Vec<WalkValue>,
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Registry entries selected by `--case`, or all of them.
fn pick<'a, T>(all: &'a [T], case: &Option<String>, get: impl Fn(&str) -> polymer_core::Result<&'a T>) -> Result<Vec<&'a T>, CliError> {
    Ok(match case {
        Some(k) => vec![get(k)?],
        None => all.iter().collect(),
    })
}

fn explicit_model(cfg: &ExperimentConfig) -> Result<Option<PolymerMap>, CliError> {
    match &cfg.model {
        Some(name) => {
            let t: Temperature = cfg.temperature.unwrap_or(Temp::Zero).into();
            Ok(Some(model_by_name(name, t)?))
        }
        None => Ok(None),
    }
}

fn jobs<'a>(sub: Sub, cfg: &mut ExperimentConfig) -> Result<Vec<Job<'a>>, CliError> {
    let case = cfg.case.clone();
    Ok(match sub {
        Sub::Identity => {
            let n = *cfg.n.get_or_insert(10_000);
            cfg.seed.get_or_insert(1);
            pick(identities::registry(), &case, identities::get)?
                .into_iter()
                .map(|e| Job::new(e.key, true, move |s| e.check(n, s)))
                .collect()
        }
        Sub::Limit => {
            let sched = cfg.schedule.clone();
            pick(limits::registry(), &case, limits::get)?
                .into_iter()
                .map(|e| {
                    let sched = sched.clone();
                    Job::new(e.key, true, move |_| match &sched {
                        Some(s) => e.run_with(s),
                        None => e.run(),
                    })
                })
                .collect()
        }
        Sub::Db => {
            let n = *cfg.n.get_or_insert(100_000);
            cfg.seed.get_or_insert(1);
            pick(balance::registry(), &case, balance::get)?
                .into_iter()
                .map(|e| Job::new(e.key, e.expect_pass, move |s| e.run(n, s)))
                .collect()
        }
        Sub::Stationary => {
            let n = *cfg.n.get_or_insert(100_000);
            cfg.seed.get_or_insert(1);
            match (explicit_model(cfg)?, cfg.laws) {
                (Some(model), Some(laws)) => {
                    if case.is_some() {
                        return Err(CliError::invalid("give either --case or --model with --laws, not both"));
                    }
                    cfg.temperature.get_or_insert(Temp::Zero);
                    vec![Job::new("custom", true, move |s| verify_stationarity(&model, laws, n, s))]
                }
                (None, None) => pick(stationarity::registry(), &case, stationarity::get)?
                    .into_iter()
                    .map(|e| Job::new(e.key, e.expect_pass, move |s| e.run(n, s)))
                    .collect(),
                _ => return Err(CliError::invalid("--model and --laws go together")),
            }
        }
        Sub::Burke => {
            let samples = *cfg.n.get_or_insert(10_000);
            let nn = *cfg.grid_n.get_or_insert(200);
            let mm = *cfg.grid_m.get_or_insert(200);
            cfg.seed.get_or_insert(1);
            match (explicit_model(cfg)?, cfg.laws) {
                (Some(model), Some(laws)) => {
                    if case.is_some() {
                        return Err(CliError::invalid("give either --case or --model with --laws, not both"));
                    }
                    cfg.temperature.get_or_insert(Temp::Zero);
                    let entry = BurkeEntry {
                        key: "custom",
                        statement: "user-supplied laws".into(),
                        model,
                        boundary: Boundary::new(laws),
                        mu: laws[1],
                        nu: laws[2],
                        expect_pass: true,
                    };
                    vec![Job::new("custom", true, move |s| entry.run(nn, mm, samples, s))]
                }
                (None, None) => pick(burke::registry(), &case, burke::get)?
                    .into_iter()
                    .map(|e| Job::new(e.key, e.expect_pass, move |s| e.run(nn, mm, samples, s)))
                    .collect(),
                _ => return Err(CliError::invalid("--model and --laws go together")),
            }
        }
        Sub::Zlimit => {
            let reps = *cfg.n.get_or_insert(experiment::DEFAULT_REPLICATES);
            let site = (*cfg.grid_n.get_or_insert(experiment::DEFAULT_SITE.0), *cfg.grid_m.get_or_insert(experiment::DEFAULT_SITE.1));
            cfg.seed.get_or_insert(1);
            let sched = cfg.schedule.clone();
            pick(experiment::registry(), &case, experiment::get)?
                .into_iter()
                .map(|e| {
                    let sched = sched.clone().unwrap_or_else(|| e.schedule.clone());
                    Job::new(e.key, true, move |s| partition_limit_experiment(e, &sched, site, reps, s))
                })
                .collect()
        }
        Sub::DistLimit => {
            let n = *cfg.n.get_or_insert(100_000);
            cfg.seed.get_or_insert(1);
            let sched = cfg.schedule.clone();
            pick(dist_limit::registry(), &case, dist_limit::get)?
                .into_iter()
                .map(|e| {
                    let sched = sched.clone().unwrap_or_else(|| e.schedule.clone());
                    Job::new(e.key, true, move |s| e.run_with(&sched, n, s))
                })
                .collect()
        }
        Sub::Simulate | Sub::Rwre | Sub::List => unreachable!(),
    })
}

fn simulate_cmd(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let nn = *cfg.grid_n.get_or_insert(10);
    let mm = *cfg.grid_m.get_or_insert(10);
    let order = (*cfg.order.get_or_insert(crate::config::Order::Rows)).into();
    let grid: LatticeGrid = if let Some(k) = cfg.degenerate_x {
        if cfg.case.is_some() || cfg.laws.is_some() {
            return Err(CliError::invalid("--degenerate-x replaces --case and --laws"));
        }
        let name = cfg.model.clone().ok_or_else(|| CliError::invalid("--degenerate-x needs --model"))?;
        cfg.temperature.get_or_insert(Temp::Zero);
        let model = explicit_model(cfg)?.expect("model given");
        LatticeGrid::from_inputs(&model, &vec![k; nn * mm], &vec![k; nn], &vec![k; mm], order)
            .map_err(|e| CliError::invalid(format!("{name} with constant {k}: {e}")))?
    } else {
        let seed = *cfg.seed.get_or_insert(1);
        let (model, boundary) = match (&cfg.case, explicit_model(cfg)?, cfg.laws) {
            (Some(k), None, None) => {
                let e = burke::get(k)?;
                (e.model.clone(), e.boundary)
            }
            (None, Some(model), Some(laws)) => (model, Boundary::new(laws)),
            (None, Some(model), None) => {
                let e = burke::registry()
                    .iter()
                    .find(|e| e.expect_pass && e.model == model)
                    .ok_or_else(|| CliError::invalid(format!("no registered stationary laws for {}; pass --laws", model.name())))?;
                cfg.case = Some(e.key.to_string());
                (model, e.boundary)
            }
            (None, None, _) => {
                return Err(CliError::invalid(format!(
                    "simulate needs --case, --model (one of {}) or --degenerate-x",
                    MODEL_NAMES.join(", ")
                )))
            }
            (Some(_), _, _) => return Err(CliError::invalid("give either --case or --model, not both")),
        };
        if cfg.temperature.is_none() {
            cfg.temperature = Some(match model.temperature {
                Temperature::Positive => Temp::Positive,
                Temperature::Zero => Temp::Zero,
            });
        }
        simulate_ordered(&model, nn, mm, &boundary, seed, order)?
    };
    let summary = grid.summary()?;
    let passed = summary.consistency.ok();
    let zname = if matches!(grid.encoding, lattice::Encoding::Log) { "logZ" } else { "Z" };
    let lines = vec![
        format!("{} {nn}x{mm}: {zname}[{nn},{mm}] = {}", grid.model.name(), summary.z_corner),
        format!(
            "{} consistency: recursion {:.2e}, rows {:.2e}, columns {:.2e}",
            if passed { "ok  " } else { "FAIL" },
            summary.consistency.recursion,
            summary.consistency.rows,
            summary.consistency.columns
        ),
    ];
    Ok(Outcome { json: Document::render(Sub::Simulate, cfg, passed, Simulated { summary }), csv: grid.to_csv(), passed, lines })
}

#[derive(Serialize)]
struct WalkValue {
    n: usize,
    m: usize,
    recursion: f64,
    enumeration: Option<f64>,
    shear: f64,
}

fn rwre_cmd(cfg: &mut ExperimentConfig) -> Result<Outcome, CliError> {
    let nn = *cfg.grid_n.get_or_insert(10);
    let mm = *cfg.grid_m.get_or_insert(10);
    let seed = *cfg.seed.get_or_insert(1);
    let law = *cfg.law.get_or_insert(polymer_core::distributions::laws::be(1.0, 1.0));
    let env = BetaEnvironment::sample(&law, nn, mm, seed)?;
    let mut values = Vec::new();
    let (mut gap_enum, mut gap_shear) = (0.0f64, 0.0f64);
    for m in 1..=mm {
        for n in 1..=nn.min(m) {
            let r = rwre::rwre_partition(&env, n as i64, m)?;
            let e = if m <= RWRE_ENUMERATION_STEPS.min(MAX_ENUMERATION_STEPS) {
                Some(rwre::path_enumeration(&env, n as i64, m)?)
            } else {
                None
            };
            let s = rwre::sheared_partition(&env, n as i64, m)?;
            if let Some(e) = e {
                gap_enum = gap_enum.max((r - e).abs());
            }
            gap_shear = gap_shear.max((r - s).abs());
            values.push(WalkValue { n, m, recursion: r, enumeration: e, shear: s });
        }
    }
    let report = TestReport::new(
        "rwre",
        values.len(),
        vec![
            Component::at_most("recursion_vs_enumeration", gap_enum, RWRE_TOL),
            Component::at_most("recursion_vs_shear", gap_shear, RWRE_TOL),
        ],
    )
    .with_seed(seed);
    let passed = report.passed();
    let mut csv = String::from("n,m,recursion,enumeration,shear\n");
    let sig = polymer_core::stattest::report::sig17;
    for v in &values {
        csv.push_str(&format!("{},{},{},{},{}\n", v.n, v.m, sig(v.recursion), v.enumeration.map(sig).unwrap_or_default(), sig(v.shear)));
    }
    let lines = vec![format!(
        "{} walk probabilities for n ≤ {nn}, m ≤ {mm}: enumeration gap {gap_enum:.1e}, shear gap {gap_shear:.1e}",
        if passed { "ok  " } else { "FAIL" }
    )];
    Ok(Outcome { json: Document::render(Sub::Rwre, cfg, passed, Walks { report, values }), csv, passed, lines })
}

#[derive(Serialize)]
pub struct Listing {
    subcommand: &'static str,
    key: String,
    statement: String,
    expect_pass: bool,
}

/// Every registry key, grouped by the subcommand that runs it.
pub fn listing() -> Vec<Listing> {
    let mut out = Vec::new();
    let mut add = |sub: &'static str, key: &str, statement: String, expect_pass: bool| {
        out.push(Listing { subcommand: sub, key: key.to_string(), statement, expect_pass })
    };
    for e in identities::registry() {
        add("identity", e.key, e.statement.clone(), true);
    }
    for e in limits::registry() {
        add("limit", e.key, e.statement.clone(), true);
    }
    for e in balance::registry() {
        add("db", e.key, e.statement.into(), e.expect_pass);
    }
    for e in stationarity::registry() {
        add("stationary", e.key, e.statement.into(), e.expect_pass);
    }
    for e in burke::registry() {
        add("burke", e.key, e.statement.clone(), e.expect_pass);
    }
    for e in experiment::registry() {
        add("zlimit", e.key, e.statement.into(), true);
    }
    for e in dist_limit::registry() {
        add("dist-limit", e.key, e.statement.into(), true);
    }
    for m in MODEL_NAMES {
        add("simulate", m, "--model name".into(), true);
    }
    out
}

#[derive(Serialize)]
struct KeyList {
    schema_version: u32,
    keys: Vec<Listing>,
}

pub fn list_json() -> String {
    to_json(&KeyList { schema_version: SCHEMA_VERSION, keys: listing() })
}

pub fn list_text() -> String {
    let mut s = String::new();
    for l in listing() {
        let tag = if l.expect_pass { "" } else { "  [negative control]" };
        s.push_str(&format!("{:<11} {:<18} {}{tag}\n", l.subcommand, l.key, l.statement));
    }
    s
}
