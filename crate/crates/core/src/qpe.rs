//! Exact statistics of parallel phase estimation.
//!
//! Phase Checking and Phase Reflection are evaluated in the eigenbasis of the
//! unitary. Each of the `c` phase-estimation copies acts on its own
//! `T`-dimensional register and only ever sees one eigenphase at a time, so
//! every quantity reduces to `T`-dimensional vectors and `c`-th powers of
//! their inner products. The `2^(c t)`-dimensional ancilla is never built.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ledger::QueryLedger;
use crate::linalg::{canonical_phase, ComplexVector, UnitaryEigensystem, C64, ONE, ZERO};

pub const CHECKING_LABEL: &str = "phase_checking";
pub const REFLECTION_LABEL: &str = "phase_reflection";
pub const AMPLITUDE_LABEL: &str = "amplitude_estimation";

const UNIT_NORM_TOL: f64 = 1e-8;

/// Parameters of one parallel phase-estimation circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpeConfig {
    /// Precision: phases with `|theta| >= theta` are rejected.
    pub theta: f64,
    /// Accuracy: leak probability allowed for rejected phases.
    pub eps: f64,
    /// Qubits per copy.
    pub bits: u32,
    /// `2^bits`, the dimension of one copy's register.
    pub big_t: usize,
    /// Number of parallel copies.
    pub copies: u32,
    /// Worst single-copy leak `max_{|phi| in [theta, pi]} |h_0(phi)|^2`.
    pub beta: f64,
}

impl QpeConfig {
    /// Oracle calls for one run of the checking circuit.
    pub fn checking_cost(&self, queries_per_application: u64) -> u64 {
        u64::from(self.copies) * (self.big_t as u64 - 1) * queries_per_application
    }

    /// Oracle calls for one Phase Reflection (the circuit and its inverse).
    pub fn reflection_cost(&self, queries_per_application: u64) -> u64 {
        2 * self.checking_cost(queries_per_application)
    }

    /// Total ancilla qubits `c * t`.
    pub fn ancilla_qubits(&self) -> u32 {
        self.bits * self.copies
    }
}

/// `h_0(phi) = (1/T) sum_{k<T} e^{i k phi}`, the amplitude of the all-zero
/// outcome of one copy.
pub fn zero_amplitude(phi: f64, big_t: usize) -> C64 {
    let t = big_t as f64;
    let half = 0.5 * canonical_phase(phi);
    let s = half.sin();
    if s.abs() < 1e-15 {
        return ONE;
    }
    let mag = (t * half).sin() / (t * s);
    C64::from_polar(mag, (t - 1.0) * half)
}

/// Single-copy probability of the all-zero outcome, `|h_0(phi)|^2`.
pub fn zero_probability(phi: f64, big_t: usize) -> f64 {
    zero_amplitude(phi, big_t).norm_sqr()
}

/// `max |h_0(phi)|^2` over `|phi| in [theta, pi]`: dense grid of at least
/// `10 T` points followed by golden-section refinement around the best
/// grid point.
pub fn worst_leak(big_t: usize, theta: f64) -> f64 {
    let points = (10 * big_t).max(1000);
    let step = (PI - theta) / points as f64;
    let f = |phi: f64| zero_probability(phi, big_t);
    let mut best_i = 0;
    let mut best = f(theta);
    for i in 1..=points {
        let v = f(theta + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = theta + step * best_i.saturating_sub(1) as f64;
    let hi = (theta + step * (best_i + 1) as f64).min(PI);
    let (mut a, mut b) = (lo, hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(f(0.5 * (a + b)))
}

/// Choose bits, register size and copy count for precision `theta` and
/// accuracy `eps`.
pub fn plan_qpe(theta: f64, eps: f64) -> Result<QpeConfig> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidInput(format!(
            "precision must lie in (0, pi), got {theta}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!(
            "accuracy must lie in (0, 1), got {eps}"
        )));
    }
    // t = ceil(log2(2/theta)), at least one qubit
    let target = 2.0 / theta;
    let mut bits = 1u32;
    while ((1u64 << bits) as f64) < target {
        bits += 1;
        if bits > 40 {
            return Err(Error::InvalidInput(format!(
                "precision {theta} needs an unreasonably large register"
            )));
        }
    }
    let big_t = 1usize << bits;
    let beta = worst_leak(big_t, theta);
    if beta >= 1.0 {
        return Err(Error::Internal(format!(
            "single-copy leak {beta} does not decay"
        )));
    }
    let mut copies = if beta <= 0.0 {
        1
    } else {
        (eps.ln() / beta.ln()).ceil().max(1.0) as u32
    };
    while beta.powi(copies as i32) > eps {
        copies += 1;
    }
    while copies > 1 && beta.powi(copies as i32 - 1) <= eps {
        copies -= 1;
    }
    Ok(QpeConfig {
        theta,
        eps,
        bits,
        big_t,
        copies,
        beta,
    })
}

/// Output state `h(phi)` of one copy: component `y` is
/// `(1/T) sum_k e^{i k (phi - 2 pi y / T)}`.
pub fn one_copy_amplitudes(phi: f64, big_t: usize) -> ComplexVector {
    ComplexVector::from_iterator(
        big_t,
        (0..big_t).map(|y| zero_amplitude(phi - 2.0 * PI * y as f64 / big_t as f64, big_t)),
    )
}

/// In-place Walsh-Hadamard transform (unnormalized). Length must be a power of two.
fn walsh_hadamard(v: &mut [C64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// `h~(phi)`: the one-copy state `D_copy(phi)^dagger |0>`, with component `k`
/// equal to `conj(<0|D_copy(phi)|k>)`.
///
/// `D_copy(phi)` is the inverse Fourier transform after `diag(e^{i k phi})`
/// after the Hadamard layer that prepares the uniform superposition.
pub fn reflected_zero_state(phi: f64, big_t: usize) -> ComplexVector {
    debug_assert!(big_t.is_power_of_two());
    let scale = 1.0 / big_t as f64;
    let mut row: Vec<C64> = (0..big_t)
        .map(|m| C64::from_polar(scale, m as f64 * phi))
        .collect();
    walsh_hadamard(&mut row);
    ComplexVector::from_iterator(big_t, row.into_iter().map(|z| z.conj()))
}

fn check_input(es: &UnitaryEigensystem, input: &ComplexVector) -> Result<()> {
    if input.len() != es.dim() {
        return Err(Error::DimensionMismatch {
            expected: es.dim(),
            got: input.len(),
        });
    }
    let n = input.norm();
    if (n - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidInput(format!(
            "input state must have unit norm, got {n}"
        )));
    }
    Ok(())
}

/// Exact probability that Phase Checking reports the all-zero outcome on
/// `input`, i.e. `|Pi_0(U) (input_A |0>_B)|^2`.
pub fn checking_probability(
    es: &UnitaryEigensystem,
    input: &ComplexVector,
    cfg: &QpeConfig,
    ledger: &mut QueryLedger,
) -> Result<f64> {
    check_input(es, input)?;
    let coeffs = es.coefficients(input)?;
    let p: f64 = es
        .phases
        .iter()
        .zip(&coeffs)
        .map(|(phi, a)| a.norm_sqr() * zero_probability(*phi, cfg.big_t).powi(cfg.copies as i32))
        .sum();
    ledger.charge(CHECKING_LABEL, cfg.checking_cost(es.queries_per_application));
    Ok(p.clamp(0.0, 1.0))
}

/// Per-eigenvector description of `R(U) (input_A |0>_B)`.
///
/// Eigenvector `k` contributes `a_k |u_k> (x) (2 g_k h~_k^{(x)c} - |0>^{(x)c})`
/// with `g_k = h_0(theta_k)^c`.
#[derive(Debug, Clone)]
pub struct ReflectionOutput {
    pub coefficients: Vec<C64>,
    pub phases: Vec<f64>,
    pub copies: u32,
    /// `h(theta_k)` per eigenvector.
    pub h: Vec<ComplexVector>,
    /// `h~(theta_k)` per eigenvector.
    pub h_tilde: Vec<ComplexVector>,
}

impl ReflectionOutput {
    fn zero_overlap(&self, k: usize) -> C64 {
        // <h~|0> = conj(h~_0) = h_0
        self.h_tilde[k][0].conj()
    }

    fn gain(&self, k: usize) -> C64 {
        self.h[k][0].powi(self.copies as i32)
    }

    /// `|| R(U) (input_A |0>_B) ||^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.distance_sqr_to(&vec![ZERO; self.coefficients.len()])
    }

    /// `|| R(U)(input_A|0>_B) - target_A|0>_B ||^2`, with the target given by
    /// its eigenbasis coefficients.
    pub fn distance_sqr_to(&self, target_coefficients: &[C64]) -> f64 {
        let c = self.copies as i32;
        let mut total = 0.0;
        for (k, (&a, &b)) in self
            .coefficients
            .iter()
            .zip(target_coefficients)
            .enumerate()
        {
            let x_coeff = C64::new(2.0, 0.0) * a * self.gain(k);
            let y_coeff = a + b;
            let xx = self.h_tilde[k].dotc(&self.h_tilde[k]).powi(c);
            let xy = self.zero_overlap(k).powi(c);
            let term = x_coeff.norm_sqr() * xx.re - 2.0 * (x_coeff.conj() * y_coeff * xy).re
                + y_coeff.norm_sqr();
            total += term;
        }
        total.max(0.0)
    }
}

/// Apply Phase Reflection to `input_A |0>_B`.
pub fn phase_reflection(
    es: &UnitaryEigensystem,
    input: &ComplexVector,
    cfg: &QpeConfig,
    ledger: &mut QueryLedger,
) -> Result<ReflectionOutput> {
    check_input(es, input)?;
    let coefficients = es.coefficients(input)?;
    let h = es
        .phases
        .iter()
        .map(|&phi| one_copy_amplitudes(phi, cfg.big_t))
        .collect();
    let h_tilde = es
        .phases
        .iter()
        .map(|&phi| reflected_zero_state(phi, cfg.big_t))
        .collect();
    ledger.charge(
        REFLECTION_LABEL,
        cfg.reflection_cost(es.queries_per_application),
    );
    Ok(ReflectionOutput {
        coefficients,
        phases: es.phases.clone(),
        copies: cfg.copies,
        h,
        h_tilde,
    })
}

/// `|| R(U)(input_A|0>_B) - target_A|0>_B ||`.
pub fn reflection_distance(
    es: &UnitaryEigensystem,
    input: &ComplexVector,
    target: &ComplexVector,
    cfg: &QpeConfig,
    ledger: &mut QueryLedger,
) -> Result<f64> {
    check_input(es, target)?;
    let out = phase_reflection(es, input, cfg, ledger)?;
    let b = es.coefficients(target)?;
    Ok(out.distance_sqr_to(&b).sqrt())
}

/// Result of one simulated amplitude estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeEstimate {
    pub value: f64,
    /// The failure branch was taken and `value` is uninformative.
    pub failed: bool,
}

/// Number of checking-circuit calls charged for one amplitude estimation:
/// `ceil(1 / (delta p))`.
pub fn amplitude_estimation_calls(delta: f64, fail_prob: f64) -> u64 {
    // the small offset absorbs rounding in delta * fail_prob
    (1.0 / (delta * fail_prob) - 1e-9).ceil().max(1.0) as u64
}

/// Statistical model of amplitude estimation: with probability `1 - fail_prob`
/// the estimate is the true value plus uniform noise in `[-delta, delta]`,
/// otherwise it is uniform on `[0, 1]`. Both are clamped to `[0, 1]`.
pub fn amplitude_estimation_sim<R: Rng + ?Sized>(
    true_prob: f64,
    delta: f64,
    fail_prob: f64,
    inner_cost: u64,
    rng: &mut R,
    ledger: &mut QueryLedger,
) -> Result<AmplitudeEstimate> {
    if !(0.0..=1.0).contains(&true_prob) || delta <= 0.0 || !(fail_prob > 0.0 && fail_prob < 1.0)
    {
        return Err(Error::InvalidInput(format!(
            "amplitude estimation parameters out of range: p={true_prob}, delta={delta}, fail={fail_prob}"
        )));
    }
    ledger.charge(
        AMPLITUDE_LABEL,
        amplitude_estimation_calls(delta, fail_prob) * inner_cost,
    );
    let failed = rng.random::<f64>() < fail_prob;
    let value = if failed {
        rng.random::<f64>()
    } else {
        true_prob + rng.random_range(-delta..=delta)
    };
    Ok(AmplitudeEstimate {
        value: value.clamp(0.0, 1.0),
        failed,
    })
}
