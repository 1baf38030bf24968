use super::cvs::{mu_nu, ConvertingVectorSet, GramPair};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance, C64};
use crate::span_program::{AlgorithmUnitary, Input};

/// Coordinates of `(C^2 (x) H) (+) (C^n (x) C^q (x) C^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConversionSpace {
    pub state_dim: usize,
    pub n: usize,
    pub q: usize,
    pub m: usize,
}

impl ConversionSpace {
    pub fn new(cvs: &ConvertingVectorSet, gp: &GramPair) -> Self {
        ConversionSpace {
            state_dim: gp.state_dim(),
            n: cvs.n,
            q: cvs.q,
            m: cvs.m,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.state_dim + self.n * self.q * self.m
    }

    /// Index of `|b>|i>` in the first summand.
    pub fn first(&self, b: usize, i: usize) -> usize {
        b * self.state_dim + i
    }

    /// Index of `|j>|a>|k>` in the second summand.
    pub fn second(&self, j: usize, a: usize, k: usize) -> usize {
        2 * self.state_dim + (j * self.q + a) * self.m + k
    }

    /// `|b>|s>` embedded in the first summand.
    pub fn embed_state(&self, b: usize, s: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.dim());
        out.rows_mut(self.first(b, 0), self.state_dim).copy_from(s);
        out
    }

    /// `(|0>|rho_x> + sign |1>|sigma_x>) / sqrt 2`.
    pub fn t_state(&self, gp: &GramPair, idx: usize, sign: f64) -> ComplexVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        self.embed_state(0, &gp.rho_states[idx]) * C64::new(h, 0.0)
            + self.embed_state(1, &gp.sigma_states[idx]) * C64::new(sign * h, 0.0)
    }
}

/// `U(P, x, alpha, eps_hat) = (2 Pi_x - I)(2 Lambda - I)` where `Lambda`
/// projects onto the complement of `span{psi_y}` and `Pi_x` removes the
/// `|j>|mu_{x_j}>` directions of the second summand. The start vector
/// index is that of `|0>|0>` in the first summand.
pub fn conversion_unitary(
    cvs: &ConvertingVectorSet,
    gp: &GramPair,
    x: &Input,
    alpha: f64,
    eps_hat: f64,
) -> Result<AlgorithmUnitary> {
    let parts = conversion_parts(cvs, gp, x, alpha, eps_hat)?;
    AlgorithmUnitary::from_projectors(alpha, parts.pi_x, parts.lambda, 0, Tolerance::default())
}

/// Ingredients of the conversion unitary, exposed for checks.
pub struct ConversionParts {
    pub space: ConversionSpace,
    pub psi: Vec<ComplexVector>,
    pub lambda: ComplexMatrix,
    pub pi_x: ComplexMatrix,
}

pub fn conversion_parts(
    cvs: &ConvertingVectorSet,
    gp: &GramPair,
    x: &Input,
    alpha: f64,
    eps_hat: f64,
) -> Result<ConversionParts> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(eps_hat > 0.0 && eps_hat < 1.0) {
        return Err(Error::InvalidInput(format!("eps_hat must lie in (0, 1), got {eps_hat}")));
    }
    cvs.check_shape()?;
    cvs.index_of(x)?;
    let space = ConversionSpace::new(cvs, gp);
    let dim = space.dim();
    let (mu, _) = mu_nu(cvs.q)?;
    let scale = C64::new((eps_hat / alpha).sqrt(), 0.0);
    let psi: Vec<ComplexVector> = cvs
        .inputs
        .iter()
        .enumerate()
        .map(|(yi, y)| {
            let mut v = space.t_state(gp, yi, -1.0) * scale;
            for j in 0..cvs.n {
                let a_letter = y.letters()[j];
                for (a, mu_a) in mu[a_letter].iter().enumerate() {
                    for (k, u) in cvs.u[yi][j].iter().enumerate() {
                        v[space.second(j, a, k)] -= mu_a * u;
                    }
                }
            }
            v
        })
        .collect();
    let tol = Tolerance::default();
    let span = linalg::projector_onto(dim, &psi, tol)?;
    let lambda = ComplexMatrix::identity(dim, dim) - span;

    let mut pi_x = ComplexMatrix::identity(dim, dim);
    for j in 0..cvs.n {
        let m_vec = &mu[x.letters()[j]];
        for k in 0..cvs.m {
            for a in 0..cvs.q {
                for b in 0..cvs.q {
                    pi_x[(space.second(j, a, k), space.second(j, b, k))] -= m_vec[a] * m_vec[b].conj();
                }
            }
        }
    }
    Ok(ConversionParts {
        space,
        psi,
        lambda,
        pi_x,
    })
}
