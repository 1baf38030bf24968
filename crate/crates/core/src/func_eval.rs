//! Function evaluation by doubling `alpha` with Phase Checking on `|0^>`.
//!
//! Each round `i = 0..=L` with `alpha = 2^i` draws `N` independent Phase
//! Checking outcomes for `U(P, x, alpha)`, then for `U(P^dagger, x, alpha)`,
//! and stops at the first majority of all-zero outcomes. The outcome
//! probabilities are exact; sampling only decides the majorities.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ledger::QueryLedger;
use crate::qpe::{self, QpeConfig};
use crate::span_program::{Input, SpanProgram, WitnessKind};

/// Phase Checking accuracy used by default.
pub const DEFAULT_EPS: f64 = 1.0 / 9.0;
/// Constant relating `alpha^2` to the witness size in the positive bound.
pub const POSITIVE_MARGIN: f64 = 3.0;

#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    pub delta: f64,
    pub eps: f64,
    pub seed: u64,
}

impl EvalConfig {
    pub fn new(delta: f64, seed: u64) -> Self {
        Self {
            delta,
            eps: DEFAULT_EPS,
            seed,
        }
    }
}

/// Zero counts of one round; `zeros_dual` is `None` when the round stopped
/// on the program itself.
#[derive(Debug, Clone, Serialize)]
pub struct RoundCount {
    pub alpha: f64,
    pub zeros: u64,
    pub zeros_dual: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResult {
    pub output_bit: u8,
    pub rounds_used: usize,
    pub alpha_final: f64,
    /// True when no round reached a majority and the default answer was used.
    pub fell_through: bool,
    pub ledger: QueryLedger,
    pub per_round: Vec<RoundCount>,
}

/// Last round index `L = ceil(log2 sqrt(3 W))`, at least 1.
pub fn last_round(w: f64) -> usize {
    ((3.0 * w).sqrt().log2().ceil()).max(1.0) as usize
}

/// Samples per round `N = ceil(4.5 log2(L / delta))`, at least 1.
pub fn samples_per_round(w: f64, delta: f64) -> u64 {
    let l = last_round(w) as f64;
    (4.5 * (l / delta).log2()).ceil().max(1.0) as u64
}

/// Phase Checking precision at a given `alpha`: `sqrt(eps / (alpha^2 W))`,
/// kept below `pi`.
pub fn round_precision(alpha: f64, w: f64, eps: f64) -> f64 {
    (eps / (alpha * alpha * w)).sqrt().min(0.999 * PI)
}

/// Precomputed probabilities and costs of one round.
#[derive(Debug, Clone)]
pub struct RoundPlan {
    pub alpha: f64,
    pub qpe: QpeConfig,
    pub prob: f64,
    pub prob_dual: f64,
    pub cost: u64,
}

/// Everything needed to run the sampling stage repeatedly for a fixed input.
#[derive(Debug, Clone)]
pub struct RoundSchedule {
    pub samples: u64,
    pub rounds: Vec<RoundPlan>,
}

impl RoundSchedule {
    pub fn build(
        p: &SpanProgram,
        pdag: &SpanProgram,
        w: f64,
        x: &Input,
        eps: f64,
        delta: f64,
    ) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidInput(format!("W must be positive, got {w}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
        }
        let samples = samples_per_round(w, delta);
        let mut rounds = Vec::new();
        for i in 0..=last_round(w) {
            let alpha = (1u64 << i) as f64;
            let cfg = qpe::plan_qpe(round_precision(alpha, w, eps), eps)?;
            let prob_of = |prog: &SpanProgram| -> Result<f64> {
                let u = prog.algorithm_unitary(x, alpha)?;
                let mut scratch = QueryLedger::new();
                qpe::checking_probability(&u.eigensystem, &u.hat0(), &cfg, &mut scratch)
            };
            rounds.push(RoundPlan {
                alpha,
                qpe: cfg,
                prob: prob_of(p)?,
                prob_dual: prob_of(pdag)?,
                cost: cfg.checking_cost(crate::span_program::QUERIES_PER_APPLICATION),
            });
        }
        Ok(Self { samples, rounds })
    }

    /// One run of the sampling stage.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> EvalResult {
        let n = self.samples;
        let needed = n.div_ceil(2);
        let mut ledger = QueryLedger::new();
        let mut per_round = Vec::new();
        let draw = |prob: f64, rng: &mut R| (0..n).filter(|_| rng.random::<f64>() < prob).count() as u64;
        for (i, r) in self.rounds.iter().enumerate() {
            let zeros = draw(r.prob, rng);
            ledger.charge(&format!("round{i}:program"), n * r.cost);
            if zeros >= needed {
                per_round.push(RoundCount {
                    alpha: r.alpha,
                    zeros,
                    zeros_dual: None,
                });
                return EvalResult {
                    output_bit: 1,
                    rounds_used: i + 1,
                    alpha_final: r.alpha,
                    fell_through: false,
                    ledger,
                    per_round,
                };
            }
            let zeros_dual = draw(r.prob_dual, rng);
            ledger.charge(&format!("round{i}:dual"), n * r.cost);
            per_round.push(RoundCount {
                alpha: r.alpha,
                zeros,
                zeros_dual: Some(zeros_dual),
            });
            if zeros_dual >= needed {
                return EvalResult {
                    output_bit: 0,
                    rounds_used: i + 1,
                    alpha_final: r.alpha,
                    fell_through: false,
                    ledger,
                    per_round,
                };
            }
        }
        EvalResult {
            output_bit: 1,
            rounds_used: self.rounds.len(),
            alpha_final: self.rounds.last().map_or(1.0, |r| r.alpha),
            fell_through: true,
            ledger,
            per_round,
        }
    }
}

/// Evaluate `f(x)` given `P`, its negation and the witness bound `W`.
pub fn evaluate(
    p: &SpanProgram,
    pdag: &SpanProgram,
    w: f64,
    x: &Input,
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    let schedule = RoundSchedule::build(p, pdag, w, x, cfg.eps, cfg.delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(schedule.run(&mut rng))
}

#[derive(Debug, Clone, Serialize)]
pub struct EarlyPhaseReport {
    pub kind: WitnessKind,
    pub witness_size: f64,
    pub alpha: f64,
    pub probability: f64,
    /// `1 - 1/C` for positive inputs, `3 eps` for negative ones.
    pub bound: f64,
    /// False for positive inputs with `alpha^2 < C w(P, x)`.
    pub hypothesis_met: bool,
    pub bound_satisfied: bool,
}

/// Phase Checking probability on `|0^>` at the round precision for `alpha`,
/// compared against the bound for the witness kind of `x`.
pub fn early_phase_check(
    p: &SpanProgram,
    x: &Input,
    alpha: f64,
    w: f64,
    eps: f64,
) -> Result<EarlyPhaseReport> {
    let witness = p.witness(x)?;
    let cfg = qpe::plan_qpe(round_precision(alpha, w, eps), eps)?;
    let u = p.algorithm_unitary(x, alpha)?;
    let mut scratch = QueryLedger::new();
    let probability = qpe::checking_probability(&u.eigensystem, &u.hat0(), &cfg, &mut scratch)?;
    let (bound, hypothesis_met, ok) = match witness.kind {
        WitnessKind::Positive => {
            let bound = 1.0 - 1.0 / POSITIVE_MARGIN;
            let hyp = alpha * alpha >= POSITIVE_MARGIN * witness.size - 1e-12;
            (bound, hyp, !hyp || probability >= bound)
        }
        WitnessKind::Negative => {
            let bound = 3.0 * eps;
            (bound, true, probability <= bound)
        }
    };
    Ok(EarlyPhaseReport {
        kind: witness.kind,
        witness_size: witness.size,
        alpha,
        probability,
        bound,
        hypothesis_met,
        bound_satisfied: ok,
    })
}
