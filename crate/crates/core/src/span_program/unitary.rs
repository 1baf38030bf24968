use super::{Input, SpanProgram};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance, UnitaryEigensystem, C64};

/// Oracle calls per application of a reflection product `(2 Pi_x - I)(2 Lambda - I)`.
pub const QUERIES_PER_APPLICATION: u64 = 2;

/// `U = (2 Pi_x - I)(2 Lambda - I)` together with its eigensystem.
#[derive(Debug, Clone)]
pub struct AlgorithmUnitary {
    pub alpha: f64,
    pub eigensystem: UnitaryEigensystem,
    /// Position of the distinguished start vector (`|0^>` for span programs).
    pub hat0_index: usize,
    pub lambda: ComplexMatrix,
    pub pi_x: ComplexMatrix,
    pub matrix: ComplexMatrix,
}

impl AlgorithmUnitary {
    /// Build and diagonalize the product of the two reflections.
    pub fn from_projectors(
        alpha: f64,
        pi_x: ComplexMatrix,
        lambda: ComplexMatrix,
        hat0_index: usize,
        tol: Tolerance,
    ) -> Result<Self> {
        let dim = pi_x.nrows();
        let id = ComplexMatrix::identity(dim, dim);
        let two = C64::new(2.0, 0.0);
        let refl_pi = &pi_x * two - &id;
        let refl_lambda = &lambda * two - &id;
        let matrix = refl_pi * refl_lambda;
        let defect = linalg::unitarity_defect(&matrix);
        if defect > linalg::UNITARY_TOL {
            return Err(Error::Internal(format!(
                "reflection product is not unitary (defect {defect:.3e})"
            )));
        }
        let eigensystem = linalg::eig_unitary(&matrix, tol)?.with_queries(QUERIES_PER_APPLICATION);
        Ok(Self {
            alpha,
            eigensystem,
            hat0_index,
            lambda,
            pi_x,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// The start vector as a unit vector.
    pub fn hat0(&self) -> ComplexVector {
        linalg::basis_vector(self.dim(), self.hat0_index)
    }
}

impl SpanProgram {
    /// `A~(alpha) = (1/alpha)|tau><0^| + A` on `H (+) span{|0^>}`, with `|0^>`
    /// as the last coordinate.
    pub fn a_tilde(&self, alpha: f64) -> ComplexMatrix {
        let dim_h = self.dim_h();
        let mut m = ComplexMatrix::zeros(self.dim_v(), dim_h + 1);
        m.view_mut((0, 0), (self.dim_v(), dim_h)).copy_from(&self.a);
        m.column_mut(dim_h)
            .copy_from(&(&self.target * C64::new(1.0 / alpha, 0.0)));
        m
    }

    /// `U(P, x, alpha) = (2 Pi_x - I)(2 Lambda(alpha) - I)`.
    pub fn algorithm_unitary(&self, x: &Input, alpha: f64) -> Result<AlgorithmUnitary> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        let dim_h = self.dim_h();
        let lambda = linalg::kernel_projector(&self.a_tilde(alpha), self.tol)?;
        let mut basis: Vec<ComplexVector> = self
            .hx_basis(x)?
            .into_iter()
            .map(|v| v.push(linalg::ZERO))
            .collect();
        basis.push(linalg::basis_vector(dim_h + 1, dim_h));
        let pi_x = linalg::projector_onto(dim_h + 1, &basis, self.tol)?;
        AlgorithmUnitary::from_projectors(alpha, pi_x, lambda, dim_h, self.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_or, build_stconn, GraphSpec};
    use crate::span_program::WitnessKind;

    #[test]
    fn unitary_and_kernel_orthogonality() {
        let g = GraphSpec::new(3, vec![(0, 1), (1, 2), (0, 2)], 0, 2).unwrap();
        let p = build_stconn(&g);
        for x in p.all_inputs() {
            for alpha in [0.5, 1.0, 4.0] {
                let u = p.algorithm_unitary(&x, alpha).unwrap();
                assert!(linalg::unitarity_defect(&u.matrix) <= 1e-8);
                let prod = &u.lambda * p.a_tilde(alpha).adjoint();
                assert!(prod.norm() <= 1e-8);
                assert_eq!(u.eigensystem.queries_per_application, 2);
            }
        }
    }

    #[test]
    fn or1_positive_fixed_point() {
        let p = build_or(1);
        let x: Input = "1".parse().unwrap();
        let w = p.positive_witness(&x).unwrap().unwrap();
        let alpha = 1.0;
        let u = p.algorithm_unitary(&x, alpha).unwrap();
        let mut v = -w.payload.clone().push(linalg::ZERO);
        v[u.hat0_index] += C64::new(alpha, 0.0);
        let image = &u.matrix * &v;
        assert!((image - v).norm() < 1e-10);
    }

    #[test]
    fn negative_input_vector_projects_to_hat0() {
        let p = build_or(3);
        let x: Input = "000".parse().unwrap();
        let w = p.witness(&x).unwrap();
        assert_eq!(w.kind, WitnessKind::Negative);
        let alpha = 2.0;
        let u = p.algorithm_unitary(&x, alpha).unwrap();
        // |v> = alpha (omega A~)^dagger
        let omega = w.omega.unwrap();
        let row = p.a_tilde(alpha).transpose() * &omega;
        let v = row.map(|c| c.conj()) * C64::new(alpha, 0.0);
        let pv = &u.pi_x * &v;
        assert!((pv - u.hat0()).norm() < 1e-10);
    }
}
