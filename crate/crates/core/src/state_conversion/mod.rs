//! Converting vector sets and coherent state conversion with a probing stage.
//!
//! A converting vector set from `rho` to `sigma` supplies vectors `u_xj`,
//! `v_xj` with `rho_xy - sigma_xy = sum_{j: x_j != y_j} <u_xj|v_yj>`. The
//! conversion unitary acts on `(C^2 (x) H) (+) (C^n (x) C^q (x) C^m)`.

mod algorithm;
mod cvs;
mod json;
mod lemmas;
mod space;

pub use algorithm::{
    conversion_precision, convert, eps_hat, last_probe_round, ConversionPlan, ConvertResult,
    ProbePlan, ProbeStep,
};
pub use cvs::{cvs_from_span_program, mu_nu, ConvertingVectorSet, CvsCheck, GramPair, CVS_TOL};
pub use json::{cvs_from_json_file, cvs_from_json_str, cvs_to_json_string, CvsDoc};
pub use lemmas::{lemma_suite, LemmaItem, LemmaReport};
pub use space::{conversion_parts, conversion_unitary, ConversionParts, ConversionSpace};
