use serde::Serialize;

use super::{Input, SpanProgram, Witness, WitnessKind};
use crate::error::{Error, Result};

/// Optimal witnesses for every input of a domain.
#[derive(Debug, Clone)]
pub struct WitnessTable {
    pub entries: Vec<(Input, Witness)>,
}

impl WitnessTable {
    pub fn build(p: &SpanProgram, domain: &[Input]) -> Result<Self> {
        let entries = domain
            .iter()
            .map(|x| Ok((x.clone(), p.witness(x)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    fn max_of(&self, kind: WitnessKind) -> f64 {
        self.entries
            .iter()
            .filter(|(_, w)| w.kind == kind)
            .map(|(_, w)| w.size)
            .fold(0.0, f64::max)
    }

    /// `W_+`: largest positive witness size (0 if there is none).
    pub fn max_positive(&self) -> f64 {
        self.max_of(WitnessKind::Positive)
    }

    /// `W_-`: largest negative witness size (0 if there is none).
    pub fn max_negative(&self) -> f64 {
        self.max_of(WitnessKind::Negative)
    }

    /// `W = max(W_+, W_-)`.
    pub fn max_size(&self) -> f64 {
        self.max_positive().max(self.max_negative())
    }

    pub fn get(&self, x: &Input) -> Option<&Witness> {
        self.entries.iter().find(|(y, _)| y == x).map(|(_, w)| w)
    }
}

/// Result of balancing a program over a domain.
#[derive(Debug, Clone, Serialize)]
pub struct Normalization {
    /// Multiplier applied to the target.
    pub factor: f64,
    pub w_plus_before: f64,
    pub w_minus_before: f64,
    pub w_plus: f64,
    pub w_minus: f64,
}

impl Normalization {
    pub fn w(&self) -> f64 {
        self.w_plus.max(self.w_minus)
    }
}

impl SpanProgram {
    /// Rescale the target so the largest positive and negative witness sizes
    /// over `domain` coincide. When only one kind occurs the program is kept.
    pub fn scale_normalize(&self, domain: &[Input]) -> Result<(SpanProgram, Normalization)> {
        if domain.is_empty() {
            return Err(Error::InvalidInput("empty input domain".into()));
        }
        let table = WitnessTable::build(self, domain)?;
        let (wp, wm) = (table.max_positive(), table.max_negative());
        let factor = if wp > 0.0 && wm > 0.0 {
            (wm / wp).sqrt().sqrt()
        } else {
            1.0
        };
        let scaled = self.with_scaled_target(factor);
        let c2 = factor * factor;
        // With one kind only, both sides report the single available maximum.
        let (w_plus, w_minus) = if wp > 0.0 && wm > 0.0 {
            (wp * c2, wm / c2)
        } else {
            (wp.max(wm), wp.max(wm))
        };
        let norm = Normalization {
            factor,
            w_plus_before: wp,
            w_minus_before: wm,
            w_plus,
            w_minus,
        };
        Ok((scaled, norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_or;

    #[test]
    fn or4_balances_to_two() {
        let p = build_or(4);
        let domain = p.all_inputs();
        let (q, norm) = p.scale_normalize(&domain).unwrap();
        assert!((norm.w_plus_before - 1.0).abs() < 1e-10);
        assert!((norm.w_minus_before - 4.0).abs() < 1e-10);
        let table = WitnessTable::build(&q, &domain).unwrap();
        assert!((table.max_positive() - 2.0).abs() < 1e-9);
        assert!((table.max_negative() - 2.0).abs() < 1e-9);
        assert!((norm.w() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn balanced_program_unchanged() {
        let p = build_or(1);
        let (q, norm) = p.scale_normalize(&p.all_inputs()).unwrap();
        assert!((norm.factor - 1.0).abs() < 1e-12);
        assert_eq!(q.target(), p.target());
    }

    #[test]
    fn single_input_domain() {
        let p = build_or(3);
        let domain = vec!["011".parse().unwrap()];
        let (_, norm) = p.scale_normalize(&domain).unwrap();
        assert!((norm.w_plus - 0.5).abs() < 1e-10);
        assert!((norm.w_minus - 0.5).abs() < 1e-10);
        assert!((norm.w() - 0.5).abs() < 1e-10);
    }
}
