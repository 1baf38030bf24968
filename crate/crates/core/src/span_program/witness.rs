use serde::{Deserialize, Serialize};

use super::{Input, SpanProgram};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Positive,
    Negative,
}

impl WitnessKind {
    /// Function value certified by this kind of witness.
    pub fn value(self) -> u8 {
        match self {
            WitnessKind::Positive => 1,
            WitnessKind::Negative => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::Positive => "positive",
            WitnessKind::Negative => "negative",
        }
    }
}

/// Optimal witness for one input.
///
/// For a positive witness `payload` is `|w>` in `H`. For a negative witness
/// `payload` holds the entries of the row `omega A` and `omega` the entries of
/// the functional, so that `omega(v) = sum_i omega[i] v[i]`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub kind: WitnessKind,
    pub size: f64,
    pub payload: ComplexVector,
    pub omega: Option<ComplexVector>,
}

impl SpanProgram {
    /// Minimum-norm `|w> in H(x)` with `A|w> = tau`.
    pub fn positive_witness(&self, x: &Input) -> Result<Option<Witness>> {
        let basis = self.hx_basis(x)?;
        let dim = self.dim_h();
        if basis.is_empty() {
            return Ok(None);
        }
        let b = linalg::columns(dim, &basis);
        let ab = &self.a * &b;
        let scale = Some(linalg::spectral_norm(&self.a));
        let Some(y) = linalg::min_norm_solution_scaled(&ab, &self.target, self.tol, scale)? else {
            return Ok(None);
        };
        let w = &b * y;
        let size = w.norm_squared();
        Ok(Some(Witness {
            kind: WitnessKind::Positive,
            size,
            payload: w,
            omega: None,
        }))
    }

    /// Minimum of `|omega A|^2` over functionals with `omega tau = 1` that
    /// vanish on `A H(x)`.
    pub fn negative_witness(&self, x: &Input) -> Result<Option<Witness>> {
        let basis = self.hx_basis(x)?;
        let dv = self.dim_v();
        // Write omega = z^dagger. Rows: (A b)^dagger z = 0, tau^dagger z = 1.
        let mut c = ComplexMatrix::zeros(basis.len() + 1, dv);
        for (r, b) in basis.iter().enumerate() {
            let ab = &self.a * b;
            c.row_mut(r).copy_from(&ab.adjoint());
        }
        c.row_mut(basis.len()).copy_from(&self.target.adjoint());
        let mut rhs = ComplexVector::zeros(basis.len() + 1);
        rhs[basis.len()] = linalg::ONE;
        let scale = Some(linalg::spectral_norm(&self.a));
        let Some(z_p) = linalg::min_norm_solution(&c, &rhs, self.tol)? else {
            return Ok(None);
        };
        let a_adj = self.a.adjoint();
        let null = linalg::kernel_basis(&c, self.tol)?;
        let z = if null.is_empty() {
            z_p
        } else {
            let n = linalg::columns(dv, &null);
            let m = &a_adj * &n;
            let rhs = -(&a_adj * &z_p);
            let (y, _) = linalg::least_squares_scaled(&m, &rhs, self.tol, scale)?;
            z_p + n * y
        };
        let omega = z.map(|c| c.conj());
        let row = (&a_adj * &z).map(|c| c.conj());
        Ok(Some(Witness {
            kind: WitnessKind::Negative,
            size: row.norm_squared(),
            payload: row,
            omega: Some(omega),
        }))
    }

    /// The witness certifying `f(x)`. Errors when `x` has neither kind or both.
    pub fn witness(&self, x: &Input) -> Result<Witness> {
        match (self.positive_witness(x)?, self.negative_witness(x)?) {
            (Some(w), None) | (None, Some(w)) => Ok(w),
            (None, None) => Err(Error::InvalidProgram(format!("input {x} has no witness"))),
            (Some(_), Some(_)) => Err(Error::InvalidProgram(format!(
                "input {x} has both a positive and a negative witness"
            ))),
        }
    }

    /// Residual of the witness conditions: `|A w - tau|` and distance of `w`
    /// from `H(x)` for positive witnesses; `|omega tau - 1|` and
    /// `|omega A Pi_H(x)|` for negative ones.
    pub fn witness_residual(&self, x: &Input, w: &Witness) -> Result<f64> {
        let proj = self.hx_projector(x)?;
        Ok(match w.kind {
            WitnessKind::Positive => {
                let fit = (&self.a * &w.payload - &self.target).norm();
                let outside = (&w.payload - &proj * &w.payload).norm();
                fit.max(outside)
            }
            WitnessKind::Negative => {
                let omega = w
                    .omega
                    .as_ref()
                    .ok_or_else(|| Error::Internal("negative witness without omega".into()))?;
                let hit = omega.transpose() * &self.target;
                let row = w.payload.transpose() * &proj;
                (hit[(0, 0)] - linalg::ONE).norm().max(row.norm())
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_or, build_stconn, GraphSpec};

    fn x(s: &str) -> Input {
        s.parse().unwrap()
    }

    #[test]
    fn or3_positive_half() {
        let p = build_or(3);
        let w = p.positive_witness(&x("110")).unwrap().unwrap();
        assert!((w.size - 0.5).abs() < 1e-12);
        assert!((w.payload[0].re - 0.5).abs() < 1e-12);
        assert!((w.payload[1].re - 0.5).abs() < 1e-12);
        assert!(w.payload[2].norm() < 1e-12);
        assert!(p.witness_residual(&x("110"), &w).unwrap() < 1e-8);
        assert!(p.positive_witness(&x("000")).unwrap().is_none());
    }

    #[test]
    fn or3_negative_three() {
        let p = build_or(3);
        let w = p.negative_witness(&x("000")).unwrap().unwrap();
        assert!((w.size - 3.0).abs() < 1e-10);
        let omega = w.omega.as_ref().unwrap();
        assert!((omega[0].re - 1.0).abs() < 1e-10);
        assert!(p.witness_residual(&x("000"), &w).unwrap() < 1e-8);
        assert!(p.negative_witness(&x("100")).unwrap().is_none());
    }

    #[test]
    fn path_positive_three() {
        let g = GraphSpec::new(4, vec![(0, 1), (1, 2), (2, 3)], 0, 3).unwrap();
        let p = build_stconn(&g);
        let w = p.positive_witness(&x("111")).unwrap().unwrap();
        assert!((w.size - 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_vertex_negative_one() {
        let g = GraphSpec::new(2, vec![(0, 1)], 0, 1).unwrap();
        let p = build_stconn(&g);
        let w = p.negative_witness(&x("0")).unwrap().unwrap();
        assert!((w.size - 1.0).abs() < 1e-10);
        assert!(p.witness_residual(&x("0"), &w).unwrap() < 1e-8);
        assert_eq!(p.witness(&x("0")).unwrap().kind, WitnessKind::Negative);
    }

    #[test]
    fn stconn_exclusive_witnesses() {
        let g = GraphSpec::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)], 0, 3).unwrap();
        let p = build_stconn(&g);
        for input in p.all_inputs() {
            let w = p.witness(&input).unwrap();
            assert!(p.witness_residual(&input, &w).unwrap() < 1e-8);
        }
    }
}
