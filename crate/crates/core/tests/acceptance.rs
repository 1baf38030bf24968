//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spanq::catalog::{build_and, build_or, build_stconn, effective_resistance, small_graphs, GraphSpec};
use spanq::experiment::{self, median, ExperimentConfig, InstanceSpec, Task};
use spanq::func_eval::{early_phase_check, EarlyPhaseReport, DEFAULT_EPS};
use spanq::linalg::{self, ComplexMatrix, ComplexVector, Tolerance, C64};
use spanq::span_program::{AlgorithmUnitary, Input, SpanProgram, WitnessKind};
use spanq::state_conversion::{cvs_from_span_program, lemma_suite, mu_nu, ConversionPlan};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn catalog() -> Vec<(String, SpanProgram)> {
    let mut out: Vec<(String, SpanProgram)> =
        (1..=8).map(|n| (format!("or_{n}"), build_or(n))).collect();
    out.extend((2..=4).map(|n| (format!("and_{n}"), build_and(n))));
    out.extend(small_graphs().into_iter().map(|(name, g)| (format!("st_{name}"), build_stconn(&g))));
    out
}

fn graphs() -> Vec<(String, GraphSpec)> {
    common::test_graphs()
}

fn witness_oracles() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for n in 1..=8 {
        let p = build_or(n);
        for x in Input::enumerate(n, 2) {
            let w = p.witness(&x).unwrap();
            let (kind, size) = common::or_oracle(&x);
            let err = (w.size - size).abs();
            worst = worst.max(err);
            checked += 1;
            if w.kind != kind || err > 1e-6 {
                bad.push(format!("or_{n}:{x}"));
            }
        }
    }
    for (name, g) in graphs() {
        let p = build_stconn(&g);
        for x in p.all_inputs() {
            let w = p.witness(&x).unwrap();
            let (kind, size) = common::stconn_oracle(&g, &x);
            let mut err = (w.size - size).abs();
            if kind == WitnessKind::Positive {
                err = err.max((w.size - effective_resistance(&g, &x)).abs());
            }
            worst = worst.max(err);
            checked += 1;
            if w.kind != kind || err > 1e-6 {
                bad.push(format!("{name}:{x}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && secs < 60.0,
        format!("{checked} inputs, max error {worst:.2e}, {secs:.1}s, mismatches {bad:?}"),
    )
}

fn negation() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut instances = catalog();
    instances.extend(graphs().into_iter().map(|(n, g)| (format!("st_{n}"), build_stconn(&g))));
    for (name, p) in &instances {
        let dual = p.negate().unwrap();
        for x in p.all_inputs() {
            let w = p.witness(&x).unwrap();
            let wd = dual.witness(&x).unwrap();
            checked += 1;
            if wd.kind == w.kind || wd.size > w.size + 1e-8 {
                bad.push(format!("{name}:{x} ({} vs {})", wd.size, w.size));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} inputs, violations {bad:?}"))
}

fn early_phase() -> Outcome {
    let mut neg = 0;
    let mut pos = 0;
    let mut bad = Vec::new();
    let mut max_neg: f64 = 0.0;
    let mut min_pos: f64 = 1.0;
    for (name, p) in catalog() {
        let domain = p.all_inputs();
        let (scaled, norm) = p.scale_normalize(&domain).unwrap();
        let w_big = norm.w();
        let results: Vec<(Input, Vec<(f64, EarlyPhaseReport)>)> = domain
            .par_iter()
            .map(|x| {
                let w = scaled.witness(x).unwrap();
                let mut alphas: Vec<f64> = (0..=4).map(|i| (1u64 << i) as f64).collect();
                if w.kind == WitnessKind::Positive {
                    // smallest power of two meeting the hypothesis
                    let mut a = 1.0;
                    while a * a < 3.0 * w.size {
                        a *= 2.0;
                    }
                    alphas.push(a);
                }
                let reports = alphas
                    .into_iter()
                    .map(|a| (a, early_phase_check(&scaled, x, a, w_big, DEFAULT_EPS).unwrap()))
                    .collect();
                (x.clone(), reports)
            })
            .collect();
        for (x, reports) in results {
            for (a, r) in reports {
                match r.kind {
                    WitnessKind::Negative => {
                        neg += 1;
                        max_neg = max_neg.max(r.probability);
                    }
                    WitnessKind::Positive if r.hypothesis_met => {
                        pos += 1;
                        min_pos = min_pos.min(r.probability);
                    }
                    WitnessKind::Positive => continue,
                }
                if !r.bound_satisfied {
                    bad.push(format!("{name}:{x}@{a} p={:.4}", r.probability));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{neg} negative checks (max prob {max_neg:.4} <= 1/3), {pos} positive checks (min prob {min_pos:.4} >= 2/3), violations {bad:?}"
        ),
    )
}

fn or_spec(n: usize) -> InstanceSpec {
    InstanceSpec::Or { n }
}

fn st_spec(g: &GraphSpec) -> InstanceSpec {
    InstanceSpec::Stconn {
        vertices: g.vertices,
        edges: g.edges.clone(),
        s: g.s,
        t: g.t,
    }
}

fn base_config(instances: Vec<InstanceSpec>, trials: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_json_str(r#"{"instances":[{"kind":"or","n":1}]}"#).unwrap();
    cfg.instances = instances;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg
}

fn evaluation_correctness() -> Outcome {
    let mut instances: Vec<InstanceSpec> = (1..=8).map(or_spec).collect();
    instances.extend(small_graphs().iter().map(|(_, g)| st_spec(g)));
    let mut cfg = base_config(instances, 200, 2024);
    cfg.deltas = vec![0.05, 0.1];
    let rows = experiment::run_rows(Task::Evaluate, &cfg).unwrap();
    let mut groups: BTreeMap<(String, String, String), (usize, usize)> = BTreeMap::new();
    for r in &rows {
        let e = groups.entry((r.instance.clone(), r.x.clone(), r.param.clone())).or_default();
        e.0 += 1;
        if r.correct == Some(false) {
            e.1 += 1;
        }
    }
    let mut worst = (0.0, "none".to_string());
    let mut bad = Vec::new();
    for ((inst, x, param), (n, errors)) in &groups {
        let delta: f64 = param.trim_start_matches("delta=").parse().unwrap();
        let rate = *errors as f64 / *n as f64;
        if rate / delta > worst.0 {
            worst = (rate / delta, format!("{inst}:{x} {param} rate {rate:.3}"));
        }
        if *n < 200 || rate > 3.0 * delta {
            bad.push(format!("{inst}:{x} {param} rate {rate:.3}"));
        }
    }
    let total_err: usize = groups.values().map(|g| g.1).sum();
    outcome(
        bad.is_empty(),
        format!(
            "{} (instance, x, delta) groups x 200 trials, {total_err} errors overall, worst {}, violations {bad:?}",
            groups.len(),
            worst.1
        ),
    )
}

fn query_scaling() -> Outcome {
    let p = build_or(8);
    let domain = p.all_inputs();
    let (scaled, norm) = p.scale_normalize(&domain).unwrap();
    let w_big = norm.w();
    let xs: Vec<String> = [1usize, 2, 4, 8]
        .iter()
        .map(|&m| (0..8).map(|i| if i < m { '1' } else { '0' }).collect())
        .collect();
    let mut cfg = base_config(vec![or_spec(8)], 200, 77);
    cfg.deltas = vec![0.1];
    cfg.x = experiment::InputSelector::Many(xs.clone());
    let rows = experiment::run_rows(Task::Evaluate, &cfg).unwrap();
    let mut normalized = Vec::new();
    let mut med_q = Vec::new();
    let mut med_r = Vec::new();
    for x in &xs {
        let mut q: Vec<f64> = rows.iter().filter(|r| &r.x == x).map(|r| r.queries.unwrap() as f64).collect();
        let mut rd: Vec<f64> = rows.iter().filter(|r| &r.x == x).map(|r| r.rounds.unwrap() as f64).collect();
        let input: Input = x.parse().unwrap();
        let w = scaled.witness(&input).unwrap().size;
        let mq = median(&mut q).unwrap();
        med_q.push(mq);
        med_r.push(median(&mut rd).unwrap());
        normalized.push(mq / (w * w_big).sqrt());
    }
    let hi = normalized.iter().cloned().fold(f64::MIN, f64::max);
    let lo = normalized.iter().cloned().fold(f64::MAX, f64::min);
    let ratio = hi / lo;
    let pass = med_q[3] < med_q[0] && med_r[3] < med_r[0] && ratio <= 8.0;
    outcome(
        pass,
        format!(
            "median queries M=1,2,4,8: {med_q:?}, median rounds {med_r:?}, normalized spread {ratio:.3} <= 8"
        ),
    )
}

fn spectral_gap() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let tol = Tolerance::default();
    let rv = |rng: &mut ChaCha8Rng, d: usize| {
        ComplexVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    };
    let mut violations = 0;
    let mut worst: f64 = f64::MIN;
    for _ in 0..100 {
        let dim = rng.random_range(2..=12);
        let r_pi = rng.random_range(1..dim);
        let r_lambda = rng.random_range(1..dim);
        let pi_vs: Vec<_> = (0..r_pi).map(|_| rv(&mut rng, dim)).collect();
        let l_vs: Vec<_> = (0..r_lambda).map(|_| rv(&mut rng, dim)).collect();
        let pi = linalg::projector_onto(dim, &pi_vs, tol).unwrap();
        let lambda = linalg::projector_onto(dim, &l_vs, tol).unwrap();
        let w = (ComplexMatrix::identity(dim, dim) - &lambda) * rv(&mut rng, dim);
        let u = AlgorithmUnitary::from_projectors(1.0, pi.clone(), lambda, 0, tol).unwrap();
        for theta in [0.1, 0.3, 1.0] {
            let low = u.eigensystem.project_low_phase(&(&pi * &w), theta).unwrap().norm();
            let bound = theta / 2.0 * w.norm();
            worst = worst.max(low - bound);
            if low > bound + 1e-8 {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("300 checks, {violations} violations, max (lhs - bound) {worst:.3e}"),
    )
}

fn mu_nu_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in [2usize, 3, 5] {
        let (mu, nu) = mu_nu(q).unwrap();
        let off = q as f64 / (2.0 * (q as f64 - 1.0));
        for (i, m) in mu.iter().enumerate() {
            worst = worst.max((m.norm_squared() - 1.0).abs());
            for (j, v) in nu.iter().enumerate() {
                let expect = if i == j { 0.0 } else { off };
                worst = worst.max((linalg::inner(m, v) - C64::new(expect, 0.0)).norm());
            }
        }
    }
    outcome(worst <= 1e-12, format!("q in {{2,3,5}}, max deviation {worst:.2e}"))
}

fn conversion_instances() -> Vec<(String, SpanProgram)> {
    vec![
        ("or_2".into(), build_or(2)),
        ("st_edge".into(), build_stconn(&GraphSpec::new(2, vec![(0, 1)], 0, 1).unwrap())),
    ]
}

fn lemma_items() -> Outcome {
    let mut checked = 0;
    let mut applied = 0;
    let mut bad = Vec::new();
    for (name, p) in conversion_instances() {
        let (cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        let cvs = cvs.normalize().unwrap();
        let w = cvs.witness_size();
        let mut alphas: Vec<f64> = (0..=4).map(|i| (1u64 << i) as f64).collect();
        alphas.push(w);
        for x in cvs.inputs.clone() {
            for eh in [0.04, 0.01] {
                for &a in &alphas {
                    let r = lemma_suite(&cvs, &gp, &x, a, eh).unwrap();
                    for (item, it) in r.items() {
                        checked += 1;
                        if it.hypothesis_met {
                            applied += 1;
                        }
                        if !it.holds {
                            bad.push(format!("{name}:{x} eps_hat={eh} alpha={a} {item}: {:.3e} vs {:.3e}", it.value, it.bound));
                        }
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} items ({applied} with hypotheses met), violations {bad:?}"),
    )
}

fn conversion_end_to_end() -> Outcome {
    let p = build_or(2);
    let (cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
    let cvs = cvs.normalize().unwrap();
    let (eps, prob) = (0.3, 0.1);
    let mut pass = true;
    let mut parts = Vec::new();
    for (xi, x) in cvs.inputs.clone().iter().enumerate() {
        let plan = ConversionPlan::build(&cvs, &gp, x, eps).unwrap();
        let stop_bound = 2.0 * cvs.w_plus(xi).min(cvs.w_minus(xi));
        let results: Vec<_> = (0..100u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(9000 + 100 * xi as u64 + t);
                plan.run(prob, &mut rng).unwrap()
            })
            .collect();
        let within2 = results.iter().filter(|r| r.distance <= 2.0 * eps).count();
        let within1 = results.iter().filter(|r| r.distance <= eps).count();
        let stopped = results.iter().filter(|r| r.alpha_stop <= stop_bound + 1e-12).count();
        pass &= within2 >= 85 && stopped >= 85;
        parts.push(format!("x={x}: <=2eps {within2}%, <=eps {within1}%, alpha_stop<=2min(w+,w-) {stopped}%"));
    }
    outcome(pass, parts.join("; "))
}

fn determinism() -> Outcome {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let mut cfg = base_config(vec![or_spec(3), st_spec(&small_graphs()[1].1)], 25, 123);
    cfg.deltas = vec![0.05, 0.1];
    let mut outputs = Vec::new();
    for (i, threads) in [1usize, 4, 4].iter().enumerate() {
        let mut c = cfg.clone();
        c.out = dir.join(format!("run{i}.csv"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(*threads).build().unwrap();
        pool.install(|| {
            experiment::run(Task::Sweep, &c).unwrap();
        });
        outputs.push(std::fs::read(&c.out).unwrap());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    let mut other = cfg.clone();
    other.seed = 124;
    other.out = dir.join("other.csv");
    experiment::run(Task::Sweep, &other).unwrap();
    let differs = std::fs::read(&other.out).unwrap() != outputs[0];
    outcome(
        same && differs,
        format!(
            "3 sweep runs (1 and 4 threads) byte-identical: {same}, {} bytes; different seed changes output: {differs}",
            outputs[0].len()
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("witness sizes match oracles", witness_oracles),
        ("negation flips and shrinks witnesses", negation),
        ("early-phase checking bounds", early_phase),
        ("evaluation error <= 3 delta", evaluation_correctness),
        ("OR_8 query scaling", query_scaling),
        ("effective spectral gap", spectral_gap),
        ("mu/nu inner products", mu_nu_identity),
        ("conversion lemma suite", lemma_items),
        ("conversion end to end", conversion_end_to_end),
        ("byte-identical CSV", determinism),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        writeln!(
            out,
            "[{}] criterion {:>2} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        )
        .unwrap();
    }
    writeln!(out, "acceptance: {}/10 passed", 10 - failed).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
