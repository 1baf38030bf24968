use super::{Part, SpanProgram};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

impl SpanProgram {
    /// Span program for the negated function.
    ///
    /// `H'_{j,a} = H_j ∩ H_{j,a}^perp`, the true and false parts swap,
    /// `V' = H (+) span{|0~>}`, `tau' = |0~>` and
    /// `A' = |0~><w_0| + Pi_H Lambda_A` with `w_0` the minimum-norm solution
    /// of `A v = tau`. If the new letter subspaces of a part span less than
    /// `H_j`, that part is rewritten in an orthonormal basis of their span.
    pub fn negate(&self) -> Result<SpanProgram> {
        let tol = self.tol;
        let dim_h = self.dim_h();
        let w0 = linalg::min_norm_solution(&self.a, &self.target, tol)?
            .ok_or(Error::InfeasibleNegation)?;
        let lambda = linalg::kernel_projector(&self.a, tol)?;

        let mut a_prime = ComplexMatrix::zeros(dim_h + 1, dim_h);
        a_prime.view_mut((0, 0), (dim_h, dim_h)).copy_from(&lambda);
        a_prime.row_mut(dim_h).copy_from(&w0.adjoint());

        // Columns of `embed` express the new coordinates of H' in old H.
        let mut new_parts = Vec::with_capacity(self.n());
        let mut new_cols: Vec<ComplexVector> = Vec::new();
        for (j, part) in self.parts.iter().enumerate() {
            let complements = part
                .letters
                .iter()
                .map(|basis| complement_in(part.dim, basis, tol))
                .collect::<Result<Vec<_>>>()?;
            let union: Vec<ComplexVector> = complements.iter().flatten().cloned().collect();
            let span = linalg::orthonormalize(part.dim, &union, tol)?;
            if span.len() == part.dim {
                for i in 0..part.dim {
                    new_cols.push(self.embed_part(j, &linalg::basis_vector(part.dim, i)));
                }
                new_parts.push(Part {
                    dim: part.dim,
                    letters: complements,
                });
            } else {
                let e = linalg::columns(part.dim, &span);
                let e_adj = e.adjoint();
                let letters = complements
                    .iter()
                    .map(|basis| basis.iter().map(|v| &e_adj * v).collect())
                    .collect();
                for v in &span {
                    new_cols.push(self.embed_part(j, v));
                }
                new_parts.push(Part {
                    dim: span.len(),
                    letters,
                });
            }
        }
        for i in 0..self.false_dim {
            new_cols.push(linalg::basis_vector(dim_h, self.false_offset() + i));
        }
        for i in 0..self.true_dim {
            new_cols.push(linalg::basis_vector(dim_h, self.true_offset() + i));
        }
        let embed = linalg::columns(dim_h, &new_cols);
        let a_new = a_prime * embed;
        let tau = linalg::basis_vector(dim_h + 1, dim_h);
        SpanProgram::with_tolerance(
            self.q,
            new_parts,
            self.false_dim,
            self.true_dim,
            tau,
            a_new,
            tol,
        )
    }
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in `C^dim`.
fn complement_in(
    dim: usize,
    basis: &[ComplexVector],
    tol: linalg::Tolerance,
) -> Result<Vec<ComplexVector>> {
    if basis.is_empty() {
        return Ok((0..dim).map(|i| linalg::basis_vector(dim, i)).collect());
    }
    let rows = linalg::columns(dim, basis).adjoint();
    linalg::kernel_basis(&rows, tol)
}
