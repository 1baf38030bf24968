//! JSON form of a span program.
//!
//! ```json
//! {
//!   "n": 2, "q": 2,
//!   "part_dims": [1, 1],
//!   "true_dim": 0, "false_dim": 0,
//!   "bases": [ [ [], [[[1, 0]]] ], [ [], [[[1, 0]]] ] ],
//!   "a": [ [[1, 0], [1, 0]] ],
//!   "tau": [[1, 0]]
//! }
//! ```
//!
//! `bases[j][a]` lists basis vectors of `H_{j,a}` in the coordinates of `H_j`;
//! complex numbers are `[re, im]`; `a` is row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Part, SpanProgram};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, C64};

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanProgramDoc {
    pub n: usize,
    pub q: usize,
    pub part_dims: Vec<usize>,
    #[serde(default)]
    pub true_dim: usize,
    #[serde(default)]
    pub false_dim: usize,
    pub bases: Vec<Vec<Vec<Vec<Pair>>>>,
    pub a: Vec<Vec<Pair>>,
    pub tau: Vec<Pair>,
}

pub(crate) fn to_c(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub(crate) fn to_pair(z: &C64) -> Pair {
    [z.re, z.im]
}

pub(crate) fn to_vector(v: &[Pair]) -> ComplexVector {
    ComplexVector::from_iterator(v.len(), v.iter().map(to_c))
}

impl SpanProgramDoc {
    pub fn from_program(p: &SpanProgram) -> Self {
        SpanProgramDoc {
            n: p.n(),
            q: p.q(),
            part_dims: p.parts().iter().map(|part| part.dim).collect(),
            true_dim: p.true_dim(),
            false_dim: p.false_dim(),
            bases: p
                .parts()
                .iter()
                .map(|part| {
                    part.letters
                        .iter()
                        .map(|basis| basis.iter().map(|v| v.iter().map(to_pair).collect()).collect())
                        .collect()
                })
                .collect(),
            a: p.matrix()
                .row_iter()
                .map(|r| r.iter().map(to_pair).collect())
                .collect(),
            tau: p.target().iter().map(to_pair).collect(),
        }
    }

    pub fn into_program(self) -> Result<SpanProgram> {
        let bad = |msg: String| Error::InvalidProgram(msg);
        if self.part_dims.len() != self.n {
            return Err(bad(format!(
                "part_dims: {} entries, expected n = {}",
                self.part_dims.len(),
                self.n
            )));
        }
        if self.bases.len() != self.n {
            return Err(bad(format!("bases: {} parts, expected n = {}", self.bases.len(), self.n)));
        }
        let mut parts = Vec::with_capacity(self.n);
        for (j, (letters, &dim)) in self.bases.iter().zip(&self.part_dims).enumerate() {
            if letters.len() != self.q {
                return Err(bad(format!(
                    "bases[{j}]: {} letters, expected q = {}",
                    letters.len(),
                    self.q
                )));
            }
            let mut out = Vec::with_capacity(self.q);
            for (a, basis) in letters.iter().enumerate() {
                let mut vs = Vec::with_capacity(basis.len());
                for (k, v) in basis.iter().enumerate() {
                    if v.len() != dim {
                        return Err(bad(format!(
                            "bases[{j}][{a}][{k}]: length {}, expected part dimension {dim}",
                            v.len()
                        )));
                    }
                    vs.push(to_vector(v));
                }
                out.push(vs);
            }
            parts.push(Part { dim, letters: out });
        }
        let cols: usize = self.part_dims.iter().sum::<usize>() + self.true_dim + self.false_dim;
        let rows = self.a.len();
        if rows != self.tau.len() {
            return Err(bad(format!("a: {rows} rows but tau has length {}", self.tau.len())));
        }
        let mut a = ComplexMatrix::zeros(rows, cols);
        for (r, row) in self.a.iter().enumerate() {
            if row.len() != cols {
                return Err(bad(format!("a[{r}]: {} entries, expected dim H = {cols}", row.len())));
            }
            for (c, z) in row.iter().enumerate() {
                a[(r, c)] = to_c(z);
            }
        }
        SpanProgram::new(
            self.q,
            parts,
            self.true_dim,
            self.false_dim,
            to_vector(&self.tau),
            a,
        )
    }
}

impl SpanProgram {
    pub fn from_json_str(s: &str) -> Result<SpanProgram> {
        let doc: SpanProgramDoc = serde_json::from_str(s)?;
        doc.into_program()
    }

    pub fn from_json_file(path: &Path) -> Result<SpanProgram> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SpanProgramDoc::from_program(self))?)
    }
}
