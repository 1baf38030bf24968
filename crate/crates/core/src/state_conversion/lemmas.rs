use serde::Serialize;

use super::algorithm::conversion_precision;
use super::cvs::{ConvertingVectorSet, GramPair};
use super::space::{conversion_unitary, ConversionSpace};
use crate::error::Result;
use crate::ledger::QueryLedger;
use crate::qpe;
use crate::span_program::Input;

/// One inequality: measured value, bound, and whether it applies.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaItem {
    pub hypothesis_met: bool,
    pub value: f64,
    pub bound: f64,
    /// `true` when the hypothesis fails (nothing to check).
    pub holds: bool,
}

impl LemmaItem {
    fn upper(hypothesis_met: bool, value: f64, bound: f64) -> Self {
        LemmaItem {
            hypothesis_met,
            value,
            bound,
            holds: !hypothesis_met || value <= bound + 1e-12,
        }
    }

    fn lower(hypothesis_met: bool, value: f64, bound: f64) -> Self {
        LemmaItem {
            hypothesis_met,
            value,
            bound,
            holds: !hypothesis_met || value >= bound - 1e-12,
        }
    }

    pub fn status(&self) -> &'static str {
        match (self.hypothesis_met, self.holds) {
            (false, _) => "skipped",
            (true, true) => "pass",
            (true, false) => "fail",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub alpha: f64,
    pub eps_hat: f64,
    pub theta: f64,
    pub w_plus: f64,
    pub start_probability: f64,
    /// `|P_Theta t_{x-}|^2 <= eps_hat^2 / 2`.
    pub low_phase_t_minus: LemmaItem,
    /// If `alpha >= w_+`: start probability `>= (1 - 5 eps_hat) / 2`.
    pub stopping: LemmaItem,
    /// If start probability `>= 1/2 - 3 eps_hat`: `|Pi0bar t_{x+}|^2 <= 10 eps_hat`.
    pub wrong_phase: LemmaItem,
    /// Same hypothesis: reflection distance `<= 6 sqrt(eps_hat)`.
    pub final_distance: LemmaItem,
}

impl LemmaReport {
    pub fn items(&self) -> [(&'static str, LemmaItem); 4] {
        [
            ("low_phase_t_minus", self.low_phase_t_minus),
            ("stopping", self.stopping),
            ("wrong_phase", self.wrong_phase),
            ("final_distance", self.final_distance),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.items().iter().all(|(_, it)| it.holds)
    }
}

/// Evaluate the four conversion inequalities exactly at `(alpha, eps_hat)`.
pub fn lemma_suite(
    cvs: &ConvertingVectorSet,
    gp: &GramPair,
    x: &Input,
    alpha: f64,
    eps_hat: f64,
) -> Result<LemmaReport> {
    let xi = cvs.index_of(x)?;
    let w = cvs.witness_size();
    let theta = conversion_precision(eps_hat, alpha, w);
    let cfg = qpe::plan_qpe(theta, eps_hat * eps_hat)?;
    let u = conversion_unitary(cvs, gp, x, alpha, eps_hat)?;
    let es = &u.eigensystem;
    let space = ConversionSpace::new(cvs, gp);
    let start = space.embed_state(0, &gp.rho_states[xi]);
    let target = space.embed_state(1, &gp.sigma_states[xi]);
    let t_plus = space.t_state(gp, xi, 1.0);
    let t_minus = space.t_state(gp, xi, -1.0);
    let mut scratch = QueryLedger::new();

    let low = es.low_phase_weight(&t_minus, theta)?;
    let w_plus = cvs.w_plus(xi);
    let start_probability = qpe::checking_probability(es, &start, &cfg, &mut scratch)?;
    let accepted = start_probability >= 0.5 - 3.0 * eps_hat;
    let wrong = 1.0 - qpe::checking_probability(es, &t_plus, &cfg, &mut scratch)?;
    let distance = qpe::reflection_distance(es, &start, &target, &cfg, &mut scratch)?;

    Ok(LemmaReport {
        alpha,
        eps_hat,
        theta,
        w_plus,
        start_probability,
        low_phase_t_minus: LemmaItem::upper(true, low, eps_hat * eps_hat / 2.0),
        stopping: LemmaItem::lower(alpha >= w_plus, start_probability, 0.5 * (1.0 - 5.0 * eps_hat)),
        wrong_phase: LemmaItem::upper(accepted, wrong, 10.0 * eps_hat),
        final_distance: LemmaItem::upper(accepted, distance, 6.0 * eps_hat.sqrt()),
    })
}
