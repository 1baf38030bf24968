//! Span programs over `[q]^n`, their witnesses, scaling, negation and the
//! reflection-product unitary used for function evaluation.
//!
//! The space `H` is laid out as `H_1 (+) ... (+) H_n (+) H_true (+) H_false`,
//! each part occupying a contiguous block of coordinates in that order. Each
//! letter subspace `H_{j,a}` is stored as an orthonormal basis written in the
//! coordinates of its own part `H_j`.

mod json;
mod negate;
mod scaling;
mod unitary;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector, Tolerance, ZERO};

pub use json::{Pair, SpanProgramDoc};
pub(crate) use json::{to_pair, to_vector};
pub use scaling::{Normalization, WitnessTable};
pub use unitary::{AlgorithmUnitary, QUERIES_PER_APPLICATION};
pub use witness::{Witness, WitnessKind};

/// A string `x in [q]^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Input(pub Vec<usize>);

impl Input {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    /// Number of positions holding a nonzero letter.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&a| a != 0).count()
    }

    /// All of `[q]^n` in lexicographic order.
    pub fn enumerate(n: usize, q: usize) -> Vec<Input> {
        let total = q.checked_pow(n as u32).expect("input space too large");
        (0..total)
            .map(|mut idx| {
                let mut letters = vec![0; n];
                for slot in letters.iter_mut().rev() {
                    *slot = idx % q;
                    idx /= q;
                }
                Input(letters)
            })
            .collect()
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &a in &self.0 {
            let c = std::char::from_digit(a as u32, 36).ok_or(fmt::Error)?;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Input {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidInput(format!("bad letter {c:?} in input {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Input)
    }
}

impl TryFrom<String> for Input {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Input> for String {
    fn from(x: Input) -> String {
        x.to_string()
    }
}

/// One input part `H_j` with its letter subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub dim: usize,
    /// `letters[a]` spans `H_{j,a}`, in the coordinates of `H_j`.
    pub letters: Vec<Vec<ComplexVector>>,
}

impl Part {
    /// Part of dimension `dim` where only `letter` (out of `q`) makes the whole
    /// part available; the other letters map to `{0}`.
    pub fn single_letter(dim: usize, q: usize, letter: usize) -> Self {
        let letters = (0..q)
            .map(|a| {
                if a == letter {
                    (0..dim).map(|i| linalg::basis_vector(dim, i)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Part { dim, letters }
    }
}

/// A span program `(H, V, tau, A)`.
#[derive(Debug, Clone)]
pub struct SpanProgram {
    q: usize,
    parts: Vec<Part>,
    true_dim: usize,
    false_dim: usize,
    target: ComplexVector,
    a: ComplexMatrix,
    tol: Tolerance,
}

impl SpanProgram {
    /// Validate and build a span program. Letter bases are orthonormalized.
    pub fn new(
        q: usize,
        parts: Vec<Part>,
        true_dim: usize,
        false_dim: usize,
        target: ComplexVector,
        a: ComplexMatrix,
    ) -> Result<Self> {
        Self::with_tolerance(q, parts, true_dim, false_dim, target, a, Tolerance::default())
    }

    pub fn with_tolerance(
        q: usize,
        parts: Vec<Part>,
        true_dim: usize,
        false_dim: usize,
        target: ComplexVector,
        a: ComplexMatrix,
        tol: Tolerance,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidProgram(format!("alphabet size must be >= 2, got {q}")));
        }
        let mut clean = Vec::with_capacity(parts.len());
        for (j, part) in parts.into_iter().enumerate() {
            if part.letters.len() != q {
                return Err(Error::InvalidProgram(format!(
                    "part {j} lists {} letter subspaces, expected {q}",
                    part.letters.len()
                )));
            }
            let mut letters = Vec::with_capacity(q);
            let mut union = Vec::new();
            for (a_idx, basis) in part.letters.iter().enumerate() {
                if let Some(v) = basis.iter().find(|v| v.len() != part.dim) {
                    return Err(Error::InvalidProgram(format!(
                        "H_({j},{a_idx}) has a vector of length {}, but H_{j} has dimension {}",
                        v.len(),
                        part.dim
                    )));
                }
                let ortho = linalg::orthonormalize(part.dim, basis, tol)?;
                union.extend(ortho.iter().cloned());
                letters.push(ortho);
            }
            let rank = linalg::orthonormalize(part.dim, &union, tol)?.len();
            if rank != part.dim {
                return Err(Error::InvalidProgram(format!(
                    "letter subspaces of part {j} span dimension {rank}, expected {}",
                    part.dim
                )));
            }
            clean.push(Part {
                dim: part.dim,
                letters,
            });
        }
        let dim_h: usize = clean.iter().map(|p| p.dim).sum::<usize>() + true_dim + false_dim;
        if a.ncols() != dim_h {
            return Err(Error::InvalidProgram(format!(
                "A has {} columns but H has dimension {dim_h}",
                a.ncols()
            )));
        }
        if a.nrows() != target.len() {
            return Err(Error::InvalidProgram(format!(
                "A has {} rows but the target has length {}",
                a.nrows(),
                target.len()
            )));
        }
        if !linalg::is_finite_matrix(&a) || !linalg::is_finite_vector(&target) {
            return Err(Error::InvalidProgram("non-finite entries in A or tau".into()));
        }
        if target.norm() == 0.0 {
            return Err(Error::InvalidProgram("target vector is zero".into()));
        }
        Ok(Self {
            q,
            parts: clean,
            true_dim,
            false_dim,
            target,
            a,
            tol,
        })
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn true_dim(&self) -> usize {
        self.true_dim
    }

    pub fn false_dim(&self) -> usize {
        self.false_dim
    }

    pub fn dim_h(&self) -> usize {
        self.parts.iter().map(|p| p.dim).sum::<usize>() + self.true_dim + self.false_dim
    }

    pub fn dim_v(&self) -> usize {
        self.target.len()
    }

    pub fn target(&self) -> &ComplexVector {
        &self.target
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// First coordinate of part `j` inside `H`.
    pub fn part_offset(&self, j: usize) -> usize {
        self.parts[..j].iter().map(|p| p.dim).sum()
    }

    pub fn true_offset(&self) -> usize {
        self.part_offset(self.n())
    }

    pub fn false_offset(&self) -> usize {
        self.true_offset() + self.true_dim
    }

    /// Letter subspace `H_{j,a}`, in part coordinates.
    pub fn letter_basis(&self, j: usize, a: usize) -> &[ComplexVector] {
        &self.parts[j].letters[a]
    }

    /// Whether `H_{j,a}` and `H_{j,b}` are orthogonal for all `a != b`.
    pub fn has_orthogonal_letters(&self) -> bool {
        let tol = self.tol.assert_tol;
        self.parts.iter().all(|part| {
            part.letters.iter().enumerate().all(|(a, ba)| {
                part.letters.iter().skip(a + 1).all(|bb| {
                    ba.iter()
                        .all(|u| bb.iter().all(|v| linalg::inner(u, v).norm() <= tol))
                })
            })
        })
    }

    pub fn check_input(&self, x: &Input) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::InvalidInput(format!(
                "input {x} has length {}, program expects {}",
                x.len(),
                self.n()
            )));
        }
        if let Some(&a) = x.letters().iter().find(|&&a| a >= self.q) {
            return Err(Error::InvalidInput(format!(
                "letter {a} in input {x} is outside the alphabet of size {}",
                self.q
            )));
        }
        Ok(())
    }

    /// Embed a part-local vector into `H`.
    pub fn embed_part(&self, j: usize, v: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::from_element(self.dim_h(), ZERO);
        let off = self.part_offset(j);
        out.rows_mut(off, v.len()).copy_from(v);
        out
    }

    /// Orthonormal basis of `H(x) = H_{1,x_1} (+) ... (+) H_{n,x_n} (+) H_true`.
    pub fn hx_basis(&self, x: &Input) -> Result<Vec<ComplexVector>> {
        self.check_input(x)?;
        let dim = self.dim_h();
        let mut basis = Vec::new();
        for (j, &a) in x.letters().iter().enumerate() {
            for v in self.letter_basis(j, a) {
                basis.push(self.embed_part(j, v));
            }
        }
        let off = self.true_offset();
        for i in 0..self.true_dim {
            basis.push(linalg::basis_vector(dim, off + i));
        }
        Ok(basis)
    }

    /// Orthogonal projector onto `H(x)`.
    pub fn hx_projector(&self, x: &Input) -> Result<ComplexMatrix> {
        let basis = self.hx_basis(x)?;
        linalg::projector_onto(self.dim_h(), &basis, self.tol)
    }

    /// Copy of the program with the target multiplied by `factor`.
    pub fn with_scaled_target(&self, factor: f64) -> SpanProgram {
        let mut p = self.clone();
        p.target *= crate::linalg::C64::new(factor, 0.0);
        p
    }

    /// Restrict to inputs the program can be queried on: every string in
    /// `[q]^n`.
    pub fn all_inputs(&self) -> Vec<Input> {
        Input::enumerate(self.n(), self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_or, build_stconn, GraphSpec};
    use crate::linalg::{C64, ONE};

    #[test]
    fn input_roundtrip_and_enumeration() {
        let x: Input = "0110".parse().unwrap();
        assert_eq!(x.letters(), &[0, 1, 1, 0]);
        assert_eq!(x.to_string(), "0110");
        assert_eq!(x.weight(), 2);
        let all = Input::enumerate(2, 3);
        assert_eq!(all.len(), 9);
        assert_eq!(all[5].to_string(), "12");
        assert!("0x?".parse::<Input>().is_err());
    }

    #[test]
    fn hx_projector_or2_all_ones() {
        let p = build_or(2);
        let proj = p.hx_projector(&"11".parse().unwrap()).unwrap();
        assert!((proj - ComplexMatrix::identity(2, 2)).norm() < 1e-12);
        let proj = p.hx_projector(&"10".parse().unwrap()).unwrap();
        assert!((proj[(0, 0)] - ONE).norm() < 1e-12 && proj[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn hx_projector_empty_is_zero() {
        let p = build_or(3);
        let proj = p.hx_projector(&"000".parse().unwrap()).unwrap();
        assert_eq!(proj, ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn hx_projector_degenerate_full_availability() {
        // every letter exposes the whole part, plus a true part
        let full = |d: usize| Part {
            dim: d,
            letters: vec![
                (0..d).map(|i| linalg::basis_vector(d, i)).collect(),
                (0..d).map(|i| linalg::basis_vector(d, i)).collect(),
            ],
        };
        let a = ComplexMatrix::from_element(1, 4, ONE);
        let p = SpanProgram::new(2, vec![full(2), full(1)], 1, 0, ComplexVector::from_element(1, ONE), a)
            .unwrap();
        for x in p.all_inputs() {
            let proj = p.hx_projector(&x).unwrap();
            assert!((proj - ComplexMatrix::identity(4, 4)).norm() < 1e-12);
        }
    }

    #[test]
    fn hx_projector_rejects_bad_letters() {
        let p = build_or(2);
        assert!(p.hx_projector(&"12".parse().unwrap()).is_err());
        assert!(p.hx_projector(&"1".parse().unwrap()).is_err());
    }

    #[test]
    fn validation_errors() {
        let bad_span = Part {
            dim: 2,
            letters: vec![vec![], vec![linalg::basis_vector(2, 0)]],
        };
        let a = ComplexMatrix::from_element(1, 2, ONE);
        let tau = ComplexVector::from_element(1, ONE);
        assert!(SpanProgram::new(2, vec![bad_span], 0, 0, tau.clone(), a.clone()).is_err());

        let ok = Part::single_letter(2, 2, 1);
        let zero_tau = ComplexVector::from_element(1, C64::new(0.0, 0.0));
        assert!(SpanProgram::new(2, vec![ok.clone()], 0, 0, zero_tau, a.clone()).is_err());
        let wrong_cols = ComplexMatrix::from_element(1, 3, ONE);
        assert!(SpanProgram::new(2, vec![ok], 0, 0, tau, wrong_cols).is_err());
    }

    #[test]
    fn catalog_programs_have_orthogonal_letters() {
        assert!(build_or(4).has_orthogonal_letters());
        let g = GraphSpec::new(3, vec![(0, 1), (1, 2)], 0, 2).unwrap();
        assert!(build_stconn(&g).has_orthogonal_letters());
    }
}
