//! Workbench for quantifier-free fragments of set theory (MLS, MLSP, MLSC,
//! MLSCNOTORD, and the disjoint-unary-union extension) interpreted over
//! hereditarily finite sets.
//!
//! The crate provides:
//!
//! - [`hf`]: canonical hereditarily finite set values with all set operators,
//!   rank, the Ackermann ordering, and cumulative-hierarchy enumeration;
//! - [`syntax`]: the formula language (AST, parser, printer, fragment
//!   classification);
//! - [`semantics`]: set assignments and term/formula evaluation;
//! - [`normalize`]: reduction of arbitrary formulas to normalized
//!   conjunctions of flat literals;
//! - [`solver`]: a bounded-model oracle that exhaustively searches set
//!   assignments below a rank bound;
//! - [`gadgets`]: constructors for representing formulas and encoding
//!   gadgets, each paired with the semantic property it claims;
//! - [`verify`]: brute-force checkers that pit those claims against the
//!   oracle and emit machine-readable verdicts;
//! - [`corpus`]: deterministic random-formula generation for stress tests.

pub mod corpus;
pub mod gadgets;
pub mod hf;
pub mod normalize;
pub mod semantics;
pub mod solver;
pub mod syntax;
pub mod verify;

pub use hf::{Caps, HfError, HfSet};
pub use semantics::Assignment;
pub use solver::{ModelReport, SearchConfig};
pub use syntax::{Formula, Term};
