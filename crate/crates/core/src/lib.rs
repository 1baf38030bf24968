//! Exact desk-scale simulation of span-program quantum query algorithms.
//!
//! The crate builds span programs and converting vector sets, constructs the
//! reflection-product unitaries the algorithms run phase estimation on, and
//! evaluates every measurement statistic exactly in the eigenbasis of those
//! unitaries. Oracle calls are tracked in a [`QueryLedger`].
//!
//! Module map:
//!
//! - [`linalg`]: kernels, projectors, minimum-norm solves, unitary eigensystems
//! - [`qpe`]: Phase Checking, Phase Reflection, amplitude estimation model
//! - [`span_program`]: programs, witnesses, scaling, negation, algorithm unitary
//! - [`func_eval`]: function evaluation with a doubling witness-size guess
//! - [`state_conversion`]: converting vector sets and the probing conversion algorithm
//! - [`catalog`]: OR/AND and st-connectivity instances with independent ground truth
//! - [`experiment`]: config-driven runs that write CSV and JSON summaries

pub mod catalog;
pub mod error;
pub mod experiment;
pub mod func_eval;
pub mod ledger;
pub mod linalg;
pub mod qpe;
pub mod span_program;
pub mod state_conversion;

pub use error::{Error, Result};
pub use ledger::QueryLedger;
pub use linalg::{ComplexMatrix, ComplexVector, Tolerance, UnitaryEigensystem, C64};
pub use span_program::{Input, SpanProgram, Witness, WitnessKind};
