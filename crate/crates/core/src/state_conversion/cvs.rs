use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, C64, ZERO};
use crate::span_program::{Input, SpanProgram, WitnessKind};

/// Vectors `mu_i`, `nu_i` in `C^q` with `<mu_i|nu_j> = q/(2(q-1))` for
/// `i != j` and `0` for `i = j`.
pub fn mu_nu(q: usize) -> Result<(Vec<ComplexVector>, Vec<ComplexVector>)> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("alphabet size must be >= 2, got {q}")));
    }
    let qf = q as f64;
    let alpha = (0.5 - (qf - 1.0).sqrt() / qf).max(0.0).sqrt();
    let off_mu = ((1.0 - alpha * alpha) / (qf - 1.0)).sqrt();
    let diag_nu = (1.0 - alpha * alpha).sqrt();
    let off_nu = alpha / (qf - 1.0).sqrt();
    let build = |diag: f64, off: f64| -> Vec<ComplexVector> {
        (0..q)
            .map(|i| {
                ComplexVector::from_iterator(
                    q,
                    (0..q).map(|k| C64::new(if k == i { diag } else { off }, 0.0)),
                )
            })
            .collect()
    };
    Ok((build(-alpha, off_mu), build(diag_nu, off_nu)))
}

/// Start and target states `|rho_x>`, `|sigma_x>` for each input.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    pub rho_states: Vec<ComplexVector>,
    pub sigma_states: Vec<ComplexVector>,
}

impl GramPair {
    pub fn new(rho_states: Vec<ComplexVector>, sigma_states: Vec<ComplexVector>) -> Result<Self> {
        let gp = GramPair {
            rho_states,
            sigma_states,
        };
        gp.validate()?;
        Ok(gp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho_states.len() != self.sigma_states.len() || self.rho_states.is_empty() {
            return Err(Error::InvalidCvs(format!(
                "{} start states but {} target states",
                self.rho_states.len(),
                self.sigma_states.len()
            )));
        }
        let dim = self.state_dim();
        for (k, s) in self.rho_states.iter().chain(&self.sigma_states).enumerate() {
            if s.len() != dim {
                return Err(Error::InvalidCvs(format!("state {k} has dimension {}, expected {dim}", s.len())));
            }
            if (s.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidCvs(format!("state {k} has norm {}", s.norm())));
            }
        }
        Ok(())
    }

    /// Dimension of the state space `H`.
    pub fn state_dim(&self) -> usize {
        self.rho_states[0].len()
    }

    pub fn len(&self) -> usize {
        self.rho_states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_states.is_empty()
    }

    fn gram(states: &[ComplexVector]) -> ComplexMatrix {
        let k = states.len();
        ComplexMatrix::from_fn(k, k, |a, b| linalg::inner(&states[a], &states[b]))
    }

    pub fn rho(&self) -> ComplexMatrix {
        Self::gram(&self.rho_states)
    }

    pub fn sigma(&self) -> ComplexMatrix {
        Self::gram(&self.sigma_states)
    }
}

/// Vector families `u[x][j]`, `v[x][j]` in `C^m` over an explicit input set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvertingVectorSet {
    pub n: usize,
    pub q: usize,
    pub m: usize,
    pub inputs: Vec<Input>,
    pub u: Vec<Vec<ComplexVector>>,
    pub v: Vec<Vec<ComplexVector>>,
}

/// Outcome of checking the defining identity on every ordered pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CvsCheck {
    pub valid: bool,
    pub max_residual: f64,
}

/// Residual slack accepted by [`ConvertingVectorSet::validate`].
pub const CVS_TOL: f64 = 1e-8;

impl ConvertingVectorSet {
    pub fn check_shape(&self) -> Result<()> {
        let k = self.inputs.len();
        if k == 0 {
            return Err(Error::InvalidCvs("empty input set".into()));
        }
        if self.q < 2 {
            return Err(Error::InvalidCvs(format!("alphabet size must be >= 2, got {}", self.q)));
        }
        if self.u.len() != k || self.v.len() != k {
            return Err(Error::InvalidCvs(format!(
                "{k} inputs but {} u-families and {} v-families",
                self.u.len(),
                self.v.len()
            )));
        }
        for (i, x) in self.inputs.iter().enumerate() {
            if x.len() != self.n || x.letters().iter().any(|&a| a >= self.q) {
                return Err(Error::InvalidCvs(format!("input {x} is not in [{}]^{}", self.q, self.n)));
            }
            for fam in [&self.u[i], &self.v[i]] {
                if fam.len() != self.n {
                    return Err(Error::InvalidCvs(format!(
                        "input {x}: {} vectors, expected n = {}",
                        fam.len(),
                        self.n
                    )));
                }
                if let Some(bad) = fam.iter().find(|w| w.len() != self.m) {
                    return Err(Error::InvalidCvs(format!(
                        "input {x}: vector of length {}, expected m = {}",
                        bad.len(),
                        self.m
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest `|rho_xy - sigma_xy - sum_{j: x_j != y_j} <u_xj|v_yj>|`.
    pub fn validate(&self, gp: &GramPair) -> Result<CvsCheck> {
        self.check_shape()?;
        if gp.len() != self.inputs.len() {
            return Err(Error::InvalidCvs(format!(
                "{} inputs but {} state pairs",
                self.inputs.len(),
                gp.len()
            )));
        }
        let (rho, sigma) = (gp.rho(), gp.sigma());
        let mut worst: f64 = 0.0;
        for (a, x) in self.inputs.iter().enumerate() {
            for (b, y) in self.inputs.iter().enumerate() {
                let mut sum = ZERO;
                for j in 0..self.n {
                    if x.letters()[j] != y.letters()[j] {
                        sum += linalg::inner(&self.u[a][j], &self.v[b][j]);
                    }
                }
                worst = worst.max((rho[(a, b)] - sigma[(a, b)] - sum).norm());
            }
        }
        Ok(CvsCheck {
            valid: worst <= CVS_TOL,
            max_residual: worst,
        })
    }

    pub fn index_of(&self, x: &Input) -> Result<usize> {
        self.inputs
            .iter()
            .position(|y| y == x)
            .ok_or_else(|| Error::InvalidInput(format!("input {x} is not in the domain")))
    }

    /// `w_+(x) = sum_j |u_xj|^2`.
    pub fn w_plus(&self, idx: usize) -> f64 {
        self.u[idx].iter().map(|w| w.norm_squared()).sum()
    }

    /// `w_-(x) = sum_j |v_xj|^2`.
    pub fn w_minus(&self, idx: usize) -> f64 {
        self.v[idx].iter().map(|w| w.norm_squared()).sum()
    }

    pub fn max_w_plus(&self) -> f64 {
        (0..self.inputs.len()).map(|i| self.w_plus(i)).fold(0.0, f64::max)
    }

    pub fn max_w_minus(&self) -> f64 {
        (0..self.inputs.len()).map(|i| self.w_minus(i)).fold(0.0, f64::max)
    }

    /// `W = max_x max(w_+(x), w_-(x))`.
    pub fn witness_size(&self) -> f64 {
        self.max_w_plus().max(self.max_w_minus())
    }

    /// Swap the two families.
    pub fn complement(&self) -> ConvertingVectorSet {
        ConvertingVectorSet {
            u: self.v.clone(),
            v: self.u.clone(),
            ..self.clone()
        }
    }

    /// Rescale `u` by `(W_-/W_+)^{1/4}` and `v` by its inverse so the largest
    /// positive and negative witness sizes coincide.
    pub fn normalize(&self) -> Result<ConvertingVectorSet> {
        let (wp, wm) = (self.max_w_plus(), self.max_w_minus());
        if !(wp > 0.0 && wm > 0.0) {
            return Err(Error::InvalidCvs(format!(
                "cannot normalize with maximum witness sizes {wp} and {wm}"
            )));
        }
        let s = (wm / wp).sqrt().sqrt();
        let scale = |fam: &Vec<Vec<ComplexVector>>, c: f64| -> Vec<Vec<ComplexVector>> {
            fam.iter()
                .map(|row| row.iter().map(|w| w * C64::new(c, 0.0)).collect())
                .collect()
        };
        Ok(ConvertingVectorSet {
            u: scale(&self.u, s),
            v: scale(&self.v, 1.0 / s),
            ..self.clone()
        })
    }
}

/// Function-evaluation instance of a span program over `domain`:
/// `|rho_x> = |0>`, `|sigma_x> = |f(x)>`, with witness vectors split across
/// two blocks of length `max_j dim H_j`.
pub fn cvs_from_span_program(
    p: &SpanProgram,
    domain: &[Input],
) -> Result<(ConvertingVectorSet, GramPair)> {
    if !p.has_orthogonal_letters() {
        return Err(Error::Unsupported(
            "letter subspaces within a part must be mutually orthogonal".into(),
        ));
    }
    if domain.is_empty() {
        return Err(Error::InvalidInput("empty input domain".into()));
    }
    let block = p.parts().iter().map(|part| part.dim).max().unwrap_or(0).max(1);
    let m = 2 * block;
    let place = |values: &[C64], second: bool| -> ComplexVector {
        let mut out = ComplexVector::zeros(m);
        let off = if second { block } else { 0 };
        for (k, z) in values.iter().enumerate() {
            out[off + k] = *z;
        }
        out
    };
    let mut u = Vec::with_capacity(domain.len());
    let mut v = Vec::with_capacity(domain.len());
    let mut rho_states = Vec::with_capacity(domain.len());
    let mut sigma_states = Vec::with_capacity(domain.len());
    for x in domain {
        let w = p.witness(x)?;
        let mut ux = Vec::with_capacity(p.n());
        let mut vx = Vec::with_capacity(p.n());
        for j in 0..p.n() {
            let off = p.part_offset(j);
            let comp: Vec<C64> = w.payload.rows(off, p.parts()[j].dim).iter().cloned().collect();
            match w.kind {
                WitnessKind::Positive => {
                    ux.push(place(&comp, false));
                    vx.push(place(&comp, true));
                }
                WitnessKind::Negative => {
                    let conj: Vec<C64> = comp.iter().map(|z| z.conj()).collect();
                    ux.push(place(&conj, true));
                    vx.push(place(&conj, false));
                }
            }
        }
        u.push(ux);
        v.push(vx);
        rho_states.push(linalg::basis_vector(2, 0));
        sigma_states.push(linalg::basis_vector(2, w.kind.value() as usize));
    }
    let cvs = ConvertingVectorSet {
        n: p.n(),
        q: p.q(),
        m,
        inputs: domain.to_vec(),
        u,
        v,
    };
    let gp = GramPair::new(rho_states, sigma_states)?;
    let check = cvs.validate(&gp)?;
    if !check.valid {
        return Err(Error::Internal(format!(
            "bridge construction violates the identity by {:.3e}",
            check.max_residual
        )));
    }
    Ok((cvs, gp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_or, build_stconn, GraphSpec};

    #[test]
    fn mu_nu_q2_closed_form() {
        let (mu, nu) = mu_nu(2).unwrap();
        assert!((mu[0][1].re - 1.0).abs() < 1e-12 && mu[0][0].norm() < 1e-12);
        assert!((nu[0][0].re - 1.0).abs() < 1e-12 && nu[0][1].norm() < 1e-12);
        assert!((linalg::inner(&mu[0], &nu[1]).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mu_nu_identity() {
        for q in [2usize, 3, 5] {
            let (mu, nu) = mu_nu(q).unwrap();
            let off = q as f64 / (2.0 * (q as f64 - 1.0));
            for (i, m) in mu.iter().enumerate() {
                assert!((m.norm() - 1.0).abs() < 1e-12);
                assert!((nu[i].norm() - 1.0).abs() < 1e-12);
                for (j, v) in nu.iter().enumerate() {
                    let want = if i == j { 0.0 } else { off };
                    assert!((linalg::inner(m, v) - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
        let (mu, nu) = mu_nu(3).unwrap();
        assert!((linalg::inner(&mu[0], &nu[2]).re - 0.75).abs() < 1e-12);
        assert!(mu_nu(1).is_err());
    }

    #[test]
    fn bridge_or2_and_sizes() {
        let p = build_or(2);
        let domain = p.all_inputs();
        let (cvs, gp) = cvs_from_span_program(&p, &domain).unwrap();
        assert!(cvs.validate(&gp).unwrap().max_residual <= 1e-8);
        for (i, x) in domain.iter().enumerate() {
            let w = p.witness(x).unwrap();
            assert!((cvs.w_plus(i) - w.size).abs() < 1e-10);
            assert!((cvs.w_minus(i) - w.size).abs() < 1e-10);
        }
    }

    #[test]
    fn bridge_stconn_validates() {
        let g = GraphSpec::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)], 0, 3).unwrap();
        let p = build_stconn(&g);
        let (cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        assert!(cvs.validate(&gp).unwrap().valid);
    }

    #[test]
    fn perturbation_is_detected() {
        let p = build_or(2);
        let (mut cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        // "10" is positive; pairing with "00" (negative) sees u_{10,0} against v_{00,0}
        let i = cvs.index_of(&"10".parse().unwrap()).unwrap();
        let k = cvs.index_of(&"00".parse().unwrap()).unwrap();
        let bump = 1e-3;
        cvs.u[i][0][0] += C64::new(bump, 0.0);
        let check = cvs.validate(&gp).unwrap();
        let overlap = (v_entry(&cvs, k) * bump).abs();
        assert!(!check.valid);
        assert!((check.max_residual - overlap).abs() < 1e-12);
    }

    fn v_entry(cvs: &ConvertingVectorSet, k: usize) -> f64 {
        cvs.v[k][0][0].re
    }

    #[test]
    fn complement_and_normalize() {
        let p = build_or(4);
        let (cvs, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        let c = cvs.complement();
        assert_eq!(c.complement(), cvs);
        assert!(c.validate(&gp).unwrap().valid);
        for i in 0..cvs.inputs.len() {
            assert_eq!(c.w_plus(i), cvs.w_minus(i));
        }
        let nrm = cvs.normalize().unwrap();
        assert!(nrm.validate(&gp).unwrap().valid);
        assert_eq!(nrm, cvs);

        // OR_2 rescaled to max w_+ = 1, max w_- = 4
        let p = build_or(2);
        let r = std::f64::consts::SQRT_2;
        let (base, gp) = cvs_from_span_program(&p, &p.all_inputs()).unwrap();
        let skew = ConvertingVectorSet {
            v: base.v.iter().map(|row| row.iter().map(|w| w * C64::new(r, 0.0)).collect()).collect(),
            u: base.u.iter().map(|row| row.iter().map(|w| w / C64::new(r, 0.0)).collect()).collect(),
            ..base.clone()
        };
        assert!(skew.validate(&gp).unwrap().valid);
        assert!((skew.max_w_plus() - 1.0).abs() < 1e-12 && (skew.max_w_minus() - 4.0).abs() < 1e-12);
        let nrm = skew.normalize().unwrap();
        assert!(nrm.validate(&gp).unwrap().valid);
        assert!((nrm.max_w_plus() - 2.0).abs() < 1e-8);
        assert!((nrm.max_w_minus() - 2.0).abs() < 1e-8);
        assert!(nrm.witness_size() <= skew.witness_size() + 1e-12);
        let again = nrm.normalize().unwrap();
        assert!((again.max_w_plus() - nrm.max_w_plus()).abs() < 1e-12);
    }
}
