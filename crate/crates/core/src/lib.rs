//! Numerical toolkit for skew-information refined uncertainty relations.
//!
//! * [`linalg`]: Hermitian eigen-decomposition, PSD tests, determinants.
//! * [`skew`]: covariance, commutator, skew-information and classical
//!   uncertainty matrices, the matrix `L_X`, and every relation margin.
//! * [`gcov`]: g-covariance, metric-adjusted skew information, `λ_f`.
//! * [`gaussian`]: quadratic Hamiltonians, exact thermal moments, Fock
//!   truncation and the non-Gaussianity score `Δ_G`.
//! * [`fuzz`]: seeded random verification of all relations.
//! * [`relations`]: evaluation of a chosen set of relations in one call.
//! * [`io`]: JSON state, observable, report and reproducer formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod fuzz;
pub mod gaussian;
pub mod gcov;
pub mod io;
pub mod linalg;
pub mod margin;
pub mod relations;
pub mod skew;

pub use error::{Error, Result};
pub use linalg::{CMatrix, DensityMatrix, EigenSystem, HermitianMatrix, RMatrix, Tolerances};
pub use margin::{Margin, RelationId, Verdict};
pub use skew::{ObservableSet, TwoObsReport, UncertaintyReport};
