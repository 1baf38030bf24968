//! JSON form of a converting vector set with its states.
//!
//! ```json
//! {
//!   "n": 1, "q": 2, "m": 2,
//!   "inputs": ["0", "1"],
//!   "u": [ [ [[0, 0], [1, 0]] ], [ [[1, 0], [0, 0]] ] ],
//!   "v": [ [ [[1, 0], [0, 0]] ], [ [[0, 0], [1, 0]] ] ],
//!   "rho": [ [[1, 0], [0, 0]], [[1, 0], [0, 0]] ],
//!   "sigma": [ [[1, 0], [0, 0]], [[0, 0], [1, 0]] ]
//! }
//! ```
//!
//! `u[x][j]` and `v[x][j]` are vectors in `C^m`; states are listed per input.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cvs::{ConvertingVectorSet, GramPair};
use crate::error::{Error, Result};
use crate::span_program::{to_pair, to_vector, Pair};
use crate::span_program::Input;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvsDoc {
    pub n: usize,
    pub q: usize,
    pub m: usize,
    pub inputs: Vec<Input>,
    pub u: Vec<Vec<Vec<Pair>>>,
    pub v: Vec<Vec<Vec<Pair>>>,
    pub rho: Vec<Vec<Pair>>,
    pub sigma: Vec<Vec<Pair>>,
}

impl CvsDoc {
    pub fn from_parts(cvs: &ConvertingVectorSet, gp: &GramPair) -> Self {
        let fam = |f: &Vec<Vec<crate::linalg::ComplexVector>>| {
            f.iter()
                .map(|row| row.iter().map(|w| w.iter().map(to_pair).collect()).collect())
                .collect()
        };
        let states = |s: &Vec<crate::linalg::ComplexVector>| {
            s.iter().map(|w| w.iter().map(to_pair).collect()).collect()
        };
        CvsDoc {
            n: cvs.n,
            q: cvs.q,
            m: cvs.m,
            inputs: cvs.inputs.clone(),
            u: fam(&cvs.u),
            v: fam(&cvs.v),
            rho: states(&gp.rho_states),
            sigma: states(&gp.sigma_states),
        }
    }

    /// Build and validate; the identity must hold on every pair.
    pub fn into_parts(self) -> Result<(ConvertingVectorSet, GramPair)> {
        let fam = |f: &Vec<Vec<Vec<Pair>>>| -> Vec<Vec<_>> {
            f.iter().map(|row| row.iter().map(|w| to_vector(w)).collect()).collect()
        };
        let cvs = ConvertingVectorSet {
            n: self.n,
            q: self.q,
            m: self.m,
            inputs: self.inputs.clone(),
            u: fam(&self.u),
            v: fam(&self.v),
        };
        let gp = GramPair::new(
            self.rho.iter().map(|s| to_vector(s)).collect(),
            self.sigma.iter().map(|s| to_vector(s)).collect(),
        )?;
        let check = cvs.validate(&gp)?;
        if !check.valid {
            return Err(Error::InvalidCvs(format!(
                "defining identity violated by {:.3e}",
                check.max_residual
            )));
        }
        Ok((cvs, gp))
    }
}

pub fn cvs_from_json_str(s: &str) -> Result<(ConvertingVectorSet, GramPair)> {
    let doc: CvsDoc = serde_json::from_str(s)?;
    doc.into_parts()
}

pub fn cvs_from_json_file(path: &Path) -> Result<(ConvertingVectorSet, GramPair)> {
    cvs_from_json_str(&std::fs::read_to_string(path)?)
}

pub fn cvs_to_json_string(cvs: &ConvertingVectorSet, gp: &GramPair) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CvsDoc::from_parts(cvs, gp))?)
}
