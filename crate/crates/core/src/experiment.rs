//! Config-driven experiment runs.
//!
//! A run reads a JSON config, evaluates one task over a list of instances and
//! inputs, and writes one CSV row per trial plus a JSON summary. Rows are
//! ordered by instance, input, parameter and trial, so identical configs give
//! byte-identical output regardless of thread scheduling.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `task` | `witness`, `negate`, `evaluate`, `convert`, `lemma` or `early_phase` |
//! | `instance` | instance id |
//! | `x` | input string |
//! | `param` | task parameter, e.g. `delta=0.05` |
//! | `trial` | trial index |
//! | `seed` | per-trial RNG seed |
//! | `kind` | witness kind, or lemma item name |
//! | `w` | witness size of `x` |
//! | `w_plus`, `w_minus` | converting vector set witness sizes of `x` |
//! | `big_w` | witness size bound `W` of the instance |
//! | `output` | output bit, or lemma status |
//! | `value` | distance, probability or measured quantity |
//! | `bound` | bound `value` is compared against |
//! | `correct` | 1 if the output is correct / the check passes |
//! | `rounds` | rounds used |
//! | `alpha_stop` | final `alpha` |
//! | `queries` | total oracle queries |
//! | `breakdown` | per-stage queries as `label=count;...` |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{build_and, build_or, build_stconn, GraphSpec};
use crate::error::{Error, Result};
use crate::func_eval::{self, RoundSchedule, DEFAULT_EPS};
use crate::span_program::{Input, SpanProgram};
use crate::state_conversion::{
    cvs_from_json_file, cvs_from_span_program, lemma_suite, ConversionPlan, ConvertingVectorSet,
    GramPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Witness,
    Negate,
    Evaluate,
    Convert,
    Sweep,
    LemmaCheck,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "witness" => Task::Witness,
            "negate" => Task::Negate,
            "evaluate" => Task::Evaluate,
            "convert" => Task::Convert,
            "sweep" => Task::Sweep,
            "lemma-check" => Task::LemmaCheck,
            _ => return Err(Error::InvalidInput(format!("unknown task {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Or { n: usize },
    And { n: usize },
    Stconn {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        s: usize,
        t: usize,
    },
    SpFile { path: PathBuf },
    CvsFile { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InputSelector {
    One(String),
    Many(Vec<String>),
}

impl Default for InputSelector {
    fn default() -> Self {
        InputSelector::One("all".into())
    }
}

fn default_deltas() -> Vec<f64> {
    vec![0.1]
}
fn default_eps() -> f64 {
    0.3
}
fn default_p() -> f64 {
    0.1
}
fn default_trials() -> usize {
    1
}
fn default_alphas() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0, 16.0]
}
fn default_eps_hats() -> Vec<f64> {
    vec![0.04, 0.01]
}
fn default_out() -> PathBuf {
    PathBuf::from("results.csv")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSpec>,
    #[serde(default)]
    pub x: InputSelector,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_eps_hats")]
    pub eps_hats: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Summary path; defaults to `out` with extension `summary.json`.
    #[serde(default)]
    pub summary: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json_str(&text)?;
        // relative instance files are resolved against the config location
        if let Some(dir) = path.parent() {
            for inst in &mut cfg.instances {
                if let InstanceSpec::SpFile { path } | InstanceSpec::CvsFile { path } = inst {
                    if path.is_relative() {
                        *path = dir.join(&*path);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.instances.is_empty() {
            return bad("config lists no instances".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return bad(format!("deltas must be nonempty and lie in (0, 1): {:?}", self.deltas));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("p must lie in (0, 1), got {}", self.p));
        }
        if self.alphas.iter().any(|a| a.is_nan() || *a <= 0.0) {
            return bad(format!("alphas must be positive: {:?}", self.alphas));
        }
        if self.eps_hats.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad(format!("eps_hats must lie in (0, 1): {:?}", self.eps_hats));
        }
        if let InputSelector::One(s) = &self.x {
            if s != "all" {
                s.parse::<Input>()?;
            }
        }
        Ok(())
    }

    pub fn summary_path(&self) -> PathBuf {
        self.summary
            .clone()
            .unwrap_or_else(|| self.out.with_extension("summary.json"))
    }
}

/// One CSV row. Empty optional fields are written as empty cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub task: String,
    pub instance: String,
    pub x: String,
    pub param: String,
    pub trial: usize,
    pub seed: u64,
    pub kind: String,
    pub w: Option<f64>,
    pub w_plus: Option<f64>,
    pub w_minus: Option<f64>,
    pub big_w: Option<f64>,
    pub output: String,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub correct: Option<bool>,
    pub rounds: Option<usize>,
    pub alpha_stop: Option<f64>,
    pub queries: Option<u64>,
    pub breakdown: String,
}

pub const CSV_HEADER: [&str; 19] = [
    "task", "instance", "x", "param", "trial", "seed", "kind", "w", "w_plus", "w_minus", "big_w",
    "output", "value", "bound", "correct", "rounds", "alpha_stop", "queries", "breakdown",
];

/// Format with 12 significant digits, shortest form.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = trim(format!("{v:.decimals$}"));
        // rounding can carry into a new digit (9.99... -> 10.0); recheck
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 12 {
            trim(format!("{v:.prec$}", prec = decimals.saturating_sub(1)))
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim(mant.to_string()), e)
    }
}

impl Row {
    fn cells(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        vec![
            self.task.clone(),
            self.instance.clone(),
            self.x.clone(),
            self.param.clone(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.kind.clone(),
            f(self.w),
            f(self.w_plus),
            f(self.w_minus),
            f(self.big_w),
            self.output.clone(),
            f(self.value),
            f(self.bound),
            self.correct.map(|b| if b { "1" } else { "0" }.to_string()).unwrap_or_default(),
            self.rounds.map(|r| r.to_string()).unwrap_or_default(),
            f(self.alpha_stop),
            self.queries.map(|q| q.to_string()).unwrap_or_default(),
            self.breakdown.clone(),
        ]
    }
}

/// Render rows as CSV text with a header.
pub fn render_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// A span-program instance with its domain.
struct SpInstance {
    id: String,
    program: SpanProgram,
    domain: Vec<Input>,
}

enum Loaded {
    Program(SpInstance),
    Cvs {
        id: String,
        cvs: ConvertingVectorSet,
        gp: GramPair,
    },
}

fn load(spec: &InstanceSpec) -> Result<Loaded> {
    let program = |id: String, program: SpanProgram| {
        let domain = program.all_inputs();
        Loaded::Program(SpInstance {
            id,
            program,
            domain,
        })
    };
    Ok(match spec {
        InstanceSpec::Or { n } => {
            if *n == 0 || *n > 12 {
                return Err(Error::InvalidInput(format!("or: n must lie in 1..=12, got {n}")));
            }
            program(format!("or_{n}"), build_or(*n))
        }
        InstanceSpec::And { n } => {
            if *n == 0 || *n > 12 {
                return Err(Error::InvalidInput(format!("and: n must lie in 1..=12, got {n}")));
            }
            program(format!("and_{n}"), build_and(*n))
        }
        InstanceSpec::Stconn {
            vertices,
            edges,
            s,
            t,
        } => {
            let g = GraphSpec::new(*vertices, edges.clone(), *s, *t)?;
            if g.edges.len() > 12 {
                return Err(Error::InvalidInput("stconn: at most 12 potential edges".into()));
            }
            program(format!("stconn_v{}_e{}", g.vertices, g.edges.len()), build_stconn(&g))
        }
        InstanceSpec::SpFile { path } => {
            let p = SpanProgram::from_json_file(path)?;
            program(file_id("sp", path), p)
        }
        InstanceSpec::CvsFile { path } => {
            let (cvs, gp) = cvs_from_json_file(path)?;
            Loaded::Cvs {
                id: file_id("cvs", path),
                cvs,
                gp,
            }
        }
    })
}

fn file_id(prefix: &str, path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
    format!("{prefix}_{stem}")
}

fn select(domain: &[Input], sel: &InputSelector) -> Result<Vec<Input>> {
    let strings: Vec<&String> = match sel {
        InputSelector::One(s) if s == "all" => return Ok(domain.to_vec()),
        InputSelector::One(s) => vec![s],
        InputSelector::Many(v) => v.iter().collect(),
    };
    strings
        .into_iter()
        .map(|s| {
            let x: Input = s.parse()?;
            if domain.contains(&x) {
                Ok(x)
            } else {
                Err(Error::InvalidInput(format!("input {x} is not in the instance domain")))
            }
        })
        .collect()
}

/// Deterministic per-trial seed.
pub fn trial_seed(base: u64, parts: &[u64]) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h = splitmix(h ^ splitmix(p.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn require_program<'a>(inst: &'a Loaded, task: &str) -> Result<&'a SpInstance> {
    match inst {
        Loaded::Program(sp) => Ok(sp),
        Loaded::Cvs { id, .. } => Err(Error::InvalidInput(format!(
            "task {task} needs a span program, but instance {id} is a converting vector set"
        ))),
    }
}

fn witness_rows(inst: &Loaded, cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let sp = require_program(inst, "witness")?;
    let table = crate::span_program::WitnessTable::build(&sp.program, &sp.domain)?;
    let big_w = table.max_size();
    select(&sp.domain, &cfg.x)?
        .iter()
        .map(|x| {
            let w = table
                .get(x)
                .ok_or_else(|| Error::Internal(format!("no witness for {x}")))?;
            Ok(Row {
                task: "witness".into(),
                instance: sp.id.clone(),
                x: x.to_string(),
                seed: cfg.seed,
                kind: w.kind.as_str().into(),
                w: Some(w.size),
                big_w: Some(big_w),
                output: w.kind.value().to_string(),
                ..Row::default()
            })
        })
        .collect()
}

fn negate_rows(inst: &Loaded, cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let sp = require_program(inst, "negate")?;
    let dual = sp.program.negate()?;
    select(&sp.domain, &cfg.x)?
        .iter()
        .map(|x| {
            let w = sp.program.witness(x)?;
            let wd = dual.witness(x)?;
            Ok(Row {
                task: "negate".into(),
                instance: sp.id.clone(),
                x: x.to_string(),
                seed: cfg.seed,
                kind: wd.kind.as_str().into(),
                w: Some(w.size),
                output: wd.kind.value().to_string(),
                value: Some(wd.size),
                bound: Some(w.size),
                correct: Some(wd.kind != w.kind && wd.size <= w.size + 1e-8),
                ..Row::default()
            })
        })
        .collect()
}

fn evaluate_rows(inst_idx: usize, inst: &Loaded, cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let sp = require_program(inst, "evaluate")?;
    let (scaled, norm) = sp.program.scale_normalize(&sp.domain)?;
    let dual = scaled.negate()?;
    let big_w = norm.w();
    let inputs = select(&sp.domain, &cfg.x)?;
    let mut rows = Vec::new();
    for (xi, x) in inputs.iter().enumerate() {
        let w = scaled.witness(x)?;
        let truth = w.kind.value();
        for (di, &delta) in cfg.deltas.iter().enumerate() {
            let schedule = RoundSchedule::build(&scaled, &dual, big_w, x, DEFAULT_EPS, delta)?;
            let trials: Vec<Row> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(cfg.seed, &[1, inst_idx as u64, xi as u64, di as u64, t as u64]);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let res = schedule.run(&mut rng);
                    Row {
                        task: "evaluate".into(),
                        instance: sp.id.clone(),
                        x: x.to_string(),
                        param: format!("delta={}", fmt_float(delta)),
                        trial: t,
                        seed,
                        kind: w.kind.as_str().into(),
                        w: Some(w.size),
                        big_w: Some(big_w),
                        output: res.output_bit.to_string(),
                        correct: Some(res.output_bit == truth),
                        rounds: Some(res.rounds_used),
                        alpha_stop: Some(res.alpha_final),
                        queries: Some(res.ledger.total()),
                        breakdown: res.ledger.breakdown_string(),
                        ..Row::default()
                    }
                })
                .collect();
            rows.extend(trials);
        }
    }
    Ok(rows)
}

fn conversion_instance(inst: &Loaded) -> Result<(String, ConvertingVectorSet, GramPair)> {
    let (id, cvs, gp) = match inst {
        Loaded::Program(sp) => {
            let (cvs, gp) = cvs_from_span_program(&sp.program, &sp.domain)?;
            (sp.id.clone(), cvs, gp)
        }
        Loaded::Cvs { id, cvs, gp } => (id.clone(), cvs.clone(), gp.clone()),
    };
    Ok((id, cvs.normalize()?, gp))
}

fn convert_rows(inst_idx: usize, inst: &Loaded, cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let (id, cvs, gp) = conversion_instance(inst)?;
    let big_w = cvs.witness_size();
    let inputs = select(&cvs.inputs, &cfg.x)?;
    let mut rows = Vec::new();
    for (xi, x) in inputs.iter().enumerate() {
        let idx = cvs.index_of(x)?;
        let plan = ConversionPlan::build(&cvs, &gp, x, cfg.eps)?;
        let trials: Vec<Result<Row>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, &[2, inst_idx as u64, xi as u64, 0, t as u64]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let res = plan.run(cfg.p, &mut rng)?;
                Ok(Row {
                    task: "convert".into(),
                    instance: id.clone(),
                    x: x.to_string(),
                    param: format!("eps={};p={}", fmt_float(cfg.eps), fmt_float(cfg.p)),
                    trial: t,
                    seed,
                    kind: if res.used_complement { "complement" } else { "direct" }.into(),
                    w_plus: Some(cvs.w_plus(idx)),
                    w_minus: Some(cvs.w_minus(idx)),
                    big_w: Some(big_w),
                    output: if res.triggered { "stopped" } else { "exhausted" }.into(),
                    value: Some(res.distance),
                    bound: Some(cfg.eps),
                    correct: Some(res.distance <= cfg.eps),
                    rounds: Some(res.probe_trace.len()),
                    alpha_stop: Some(res.alpha_stop),
                    queries: Some(res.ledger.total()),
                    breakdown: res.ledger.breakdown_string(),
                    ..Row::default()
                })
            })
            .collect();
        for r in trials {
            rows.push(r?);
        }
    }
    Ok(rows)
}

fn lemma_rows(inst: &Loaded, cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    if let Loaded::Program(sp) = inst {
        let (scaled, norm) = sp.program.scale_normalize(&sp.domain)?;
        for x in select(&sp.domain, &cfg.x)? {
            for &alpha in &cfg.alphas {
                let r = func_eval::early_phase_check(&scaled, &x, alpha, norm.w(), DEFAULT_EPS)?;
                rows.push(Row {
                    task: "early_phase".into(),
                    instance: sp.id.clone(),
                    x: x.to_string(),
                    param: format!("alpha={}", fmt_float(alpha)),
                    seed: cfg.seed,
                    kind: r.kind.as_str().into(),
                    w: Some(r.witness_size),
                    big_w: Some(norm.w()),
                    output: status(r.hypothesis_met, r.bound_satisfied).into(),
                    value: Some(r.probability),
                    bound: Some(r.bound),
                    correct: Some(r.bound_satisfied),
                    ..Row::default()
                });
            }
        }
    }
    let (id, cvs, gp) = conversion_instance(inst)?;
    let big_w = cvs.witness_size();
    for x in select(&cvs.inputs, &cfg.x)? {
        let idx = cvs.index_of(&x)?;
        for &eh in &cfg.eps_hats {
            for &alpha in &cfg.alphas {
                let report = lemma_suite(&cvs, &gp, &x, alpha, eh)?;
                for (name, item) in report.items() {
                    rows.push(Row {
                        task: "lemma".into(),
                        instance: id.clone(),
                        x: x.to_string(),
                        param: format!("alpha={};eps_hat={}", fmt_float(alpha), fmt_float(eh)),
                        seed: cfg.seed,
                        kind: name.into(),
                        w_plus: Some(cvs.w_plus(idx)),
                        w_minus: Some(cvs.w_minus(idx)),
                        big_w: Some(big_w),
                        output: item.status().into(),
                        value: Some(item.value),
                        bound: Some(item.bound),
                        correct: Some(item.holds),
                        ..Row::default()
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn status(hypothesis: bool, ok: bool) -> &'static str {
    match (hypothesis, ok) {
        (false, _) => "skipped",
        (true, true) => "pass",
        (true, false) => "fail",
    }
}

/// Compute all rows of a task, in deterministic order.
pub fn run_rows(task: Task, cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let loaded = cfg.instances.iter().map(load).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, inst) in loaded.iter().enumerate() {
        match task {
            Task::Witness => rows.extend(witness_rows(inst, cfg)?),
            Task::Negate => rows.extend(negate_rows(inst, cfg)?),
            Task::Evaluate => rows.extend(evaluate_rows(i, inst, cfg)?),
            Task::Convert => rows.extend(convert_rows(i, inst, cfg)?),
            Task::LemmaCheck => rows.extend(lemma_rows(inst, cfg)?),
            Task::Sweep => {
                if matches!(inst, Loaded::Program(_)) {
                    rows.extend(evaluate_rows(i, inst, cfg)?);
                }
                rows.extend(convert_rows(i, inst, cfg)?);
            }
        }
    }
    Ok(rows)
}

/// Aggregate statistics of one `(task, instance, param)` group.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GroupSummary {
    pub task: String,
    pub instance: String,
    pub param: String,
    pub rows: usize,
    pub checked: usize,
    pub error_rate: Option<f64>,
    pub median_queries: Option<f64>,
    pub median_rounds: Option<f64>,
    pub median_value: Option<f64>,
    /// Fraction of rows with `value <= 2 * bound` (conversion runs).
    pub within_twice_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub total_rows: usize,
    pub groups: Vec<GroupSummary>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

pub fn summarize(rows: &[Row]) -> Summary {
    let mut groups: BTreeMap<(String, String, String), Vec<&Row>> = BTreeMap::new();
    let mut order = Vec::new();
    for r in rows {
        let key = (r.task.clone(), r.instance.clone(), r.param.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    let groups = order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let checked: Vec<bool> = members.iter().filter_map(|r| r.correct).collect();
            let error_rate = (!checked.is_empty())
                .then(|| checked.iter().filter(|&&c| !c).count() as f64 / checked.len() as f64);
            let mut q: Vec<f64> = members.iter().filter_map(|r| r.queries.map(|v| v as f64)).collect();
            let mut rd: Vec<f64> = members.iter().filter_map(|r| r.rounds.map(|v| v as f64)).collect();
            let mut val: Vec<f64> = members.iter().filter_map(|r| r.value).collect();
            let within = (key.0 == "convert").then(|| {
                let ok = members
                    .iter()
                    .filter(|r| matches!((r.value, r.bound), (Some(v), Some(b)) if v <= 2.0 * b))
                    .count();
                ok as f64 / members.len() as f64
            });
            GroupSummary {
                task: key.0.clone(),
                instance: key.1.clone(),
                param: key.2.clone(),
                rows: members.len(),
                checked: checked.len(),
                error_rate,
                median_queries: median(&mut q),
                median_rounds: median(&mut rd),
                median_value: median(&mut val),
                within_twice_bound: within,
            }
        })
        .collect();
    Summary {
        total_rows: rows.len(),
        groups,
    }
}

/// Files written by [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

/// Run a task and write the CSV and JSON summary.
pub fn run(task: Task, cfg: &ExperimentConfig) -> Result<RunOutput> {
    let rows = run_rows(task, cfg)?;
    let csv_text = render_csv(&rows)?;
    let summary = summarize(&rows);
    let csv_path = cfg.out.clone();
    let summary_path = cfg.summary_path();
    for path in [&csv_path, &summary_path] {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
    }
    std::fs::write(&csv_path, csv_text)?;
    let mut json = serde_json::to_string_pretty(&summary)?;
    let _ = writeln!(json);
    std::fs::write(&summary_path, json)?;
    Ok(RunOutput {
        csv_path,
        summary_path,
        rows,
        summary,
    })
}
