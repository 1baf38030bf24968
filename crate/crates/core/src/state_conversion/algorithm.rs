use rand::Rng;
use serde::Serialize;

use super::cvs::{ConvertingVectorSet, GramPair};
use super::space::{conversion_unitary, ConversionSpace};
use crate::error::{Error, Result};
use crate::ledger::QueryLedger;
use crate::qpe::{self, QpeConfig};
use crate::span_program::Input;

/// `eps_hat = eps^2 / 9`.
pub fn eps_hat(eps: f64) -> f64 {
    eps * eps / 9.0
}

/// Phase precision `eps_hat^{3/2} / sqrt(alpha W)`, kept below `pi`.
pub fn conversion_precision(eps_hat: f64, alpha: f64, w: f64) -> f64 {
    (eps_hat.powf(1.5) / (alpha * w).sqrt()).min(0.999 * std::f64::consts::PI)
}

/// Last probing round `ceil(log2 W)`, at least 0.
pub fn last_probe_round(w: f64) -> usize {
    w.log2().ceil().max(0.0) as usize
}

/// Exact quantities of one `(alpha, family)` probe.
#[derive(Debug, Clone)]
pub struct ProbePlan {
    pub round: usize,
    pub alpha: f64,
    pub complement: bool,
    pub qpe: QpeConfig,
    /// Probability of the all-zero outcome on `|0>|rho_x>`.
    pub prob: f64,
    pub checking_cost: u64,
    pub reflection_cost: u64,
    /// Final distance if conversion is run after this probe.
    pub distance: f64,
}

/// All probes for one input, in the order they are tried.
#[derive(Debug, Clone)]
pub struct ConversionPlan {
    pub eps: f64,
    pub eps_hat: f64,
    pub w: f64,
    pub probes: Vec<ProbePlan>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeStep {
    pub round: usize,
    pub complement: bool,
    pub estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvertResult {
    pub distance: f64,
    pub alpha_stop: f64,
    pub used_complement: bool,
    /// False when every probe failed and the last one was used.
    pub triggered: bool,
    pub ledger: QueryLedger,
    pub probe_trace: Vec<ProbeStep>,
}

impl ConversionPlan {
    pub fn build(cvs: &ConvertingVectorSet, gp: &GramPair, x: &Input, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidInput(format!("eps must lie in (0, 1), got {eps}")));
        }
        let eh = eps_hat(eps);
        let w = cvs.witness_size();
        if w.is_nan() || w <= 0.0 {
            return Err(Error::InvalidCvs("witness size must be positive".into()));
        }
        let xi = cvs.index_of(x)?;
        let space = ConversionSpace::new(cvs, gp);
        let start = space.embed_state(0, &gp.rho_states[xi]);
        let target = space.embed_state(1, &gp.sigma_states[xi]);
        let comp = cvs.complement();
        let mut probes = Vec::new();
        for round in 0..=last_probe_round(w) {
            let alpha = (1u64 << round) as f64;
            let cfg = qpe::plan_qpe(conversion_precision(eh, alpha, w), eh * eh)?;
            for (family, complement) in [(cvs, false), (&comp, true)] {
                let u = conversion_unitary(family, gp, x, alpha, eh)?;
                let es = &u.eigensystem;
                let mut scratch = QueryLedger::new();
                let prob = qpe::checking_probability(es, &start, &cfg, &mut scratch)?;
                let distance = qpe::reflection_distance(es, &start, &target, &cfg, &mut scratch)?;
                probes.push(ProbePlan {
                    round,
                    alpha,
                    complement,
                    qpe: cfg,
                    prob,
                    checking_cost: cfg.checking_cost(es.queries_per_application),
                    reflection_cost: cfg.reflection_cost(es.queries_per_application),
                    distance,
                });
            }
        }
        Ok(Self {
            eps,
            eps_hat: eh,
            w,
            probes,
        })
    }

    /// Amplitude estimation failure probability per probe: `p / ceil(log2 W)`.
    pub fn probe_failure(&self, p: f64) -> f64 {
        p / (last_probe_round(self.w).max(1) as f64)
    }

    /// One run of the probing and conversion stages.
    pub fn run<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Result<ConvertResult> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidInput(format!("p must lie in (0, 1), got {p}")));
        }
        let mut ledger = QueryLedger::new();
        let mut trace = Vec::new();
        let delta = self.eps_hat / 4.0;
        let fail = self.probe_failure(p);
        let threshold = -(11.0 / 4.0) * self.eps_hat;
        let mut chosen = None;
        for probe in &self.probes {
            let est =
                qpe::amplitude_estimation_sim(probe.prob, delta, fail, probe.checking_cost, rng, &mut ledger)?;
            trace.push(ProbeStep {
                round: probe.round,
                complement: probe.complement,
                estimate: est.value,
            });
            if est.value - 0.5 > threshold {
                chosen = Some(probe);
                break;
            }
        }
        let triggered = chosen.is_some();
        let last = self
            .probes
            .last()
            .ok_or_else(|| Error::Internal("empty probe plan".into()))?;
        let probe = chosen.unwrap_or(last);
        ledger.charge(qpe::REFLECTION_LABEL, probe.reflection_cost);
        Ok(ConvertResult {
            distance: probe.distance,
            alpha_stop: probe.alpha,
            used_complement: probe.complement,
            triggered,
            ledger,
            probe_trace: trace,
        })
    }
}

/// Convert `|rho_x>` towards `|1>|sigma_x>` with error parameter `eps` and
/// failure probability `p`.
pub fn convert<R: Rng + ?Sized>(
    cvs: &ConvertingVectorSet,
    gp: &GramPair,
    x: &Input,
    eps: f64,
    p: f64,
    rng: &mut R,
) -> Result<ConvertResult> {
    ConversionPlan::build(cvs, gp, x, eps)?.run(p, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_or;
    use crate::state_conversion::cvs_from_span_program;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn or2_conversion_statistics() {
        let p = build_or(2);
        let (cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        let cvs = cvs.normalize().unwrap();
        for x in cvs.inputs.clone() {
            let plan = ConversionPlan::build(&cvs, &gp, &x, 0.3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let good = (0..100)
                .filter(|_| plan.run(0.1, &mut rng).unwrap().distance <= 0.6)
                .count();
            assert!(good >= 85, "{x}: {good}/100");
        }
    }

    #[test]
    fn ledger_contains_final_reflection() {
        let p = build_or(2);
        let (cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        let x: Input = "01".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let res = convert(&cvs, &gp, &x, 0.3, 0.1, &mut rng).unwrap();
        let plan = ConversionPlan::build(&cvs, &gp, &x, 0.3).unwrap();
        let stop = plan
            .probes
            .iter()
            .find(|pr| pr.alpha == res.alpha_stop && pr.complement == res.used_complement)
            .unwrap();
        let cfg = stop.qpe;
        assert_eq!(
            res.ledger.get(qpe::REFLECTION_LABEL),
            2 * cfg.copies as u64 * (cfg.big_t as u64 - 1) * 2
        );
        assert!(res.ledger.get(qpe::AMPLITUDE_LABEL) > res.ledger.get(qpe::REFLECTION_LABEL));
    }
}
