//! Algebraic feature generation for polynomial systems and the variable
//! ordering pipeline built on it.
//!
//! * [`poly`] and [`problem`] hold exact sparse polynomials, their parsers and
//!   resultants; [`smt`] extracts polynomial sets from SMT-LIB scripts.
//! * [`features`] enumerates and evaluates the composed degree features.
//! * [`dataset`] simplifies feature matrices and ranks columns by ANOVA F-value.
//! * [`heuristics`] implements the Brown and sum-of-total-degrees orderings.
//! * [`ml`] covers timing-derived targets, the nearest-neighbour classifier and
//!   tie-aware evaluation.

pub mod poly;
pub mod problem;
pub mod smt;
pub mod features;
pub mod ordering;
pub mod dataset;
pub mod heuristics;
pub mod ml;

pub use poly::{Polynomial, Rational, VariableSet};
pub use problem::{CorpusEntry, ProblemInstance};
