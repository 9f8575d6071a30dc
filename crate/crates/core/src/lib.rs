//! Symbolic model checking of ATL* over finite and infinite traces.
//!
//! The crate is organised bottom-up:
//!
//! * [`bdd`] is a self-contained reduced ordered BDD engine.
//! * [`formula`] parses and transforms ATL*/LTL/LTLf formulas.
//! * [`cgs`] holds concurrent game structures and their bit-level encoding.
//! * [`ltlf2dfa`] and [`dpa`] produce finite-word and parity automata.
//! * [`finite_mc`] solves the finite-trace strategic core as a safety game;
//!   [`infinite_mc`] reduces the infinite-trace case to parity games.
//! * [`driver`] evaluates full ATL* formulas by recursive labelling.
//! * [`bench`] generates the benchmark families and runs timing suites.

pub mod bdd;
pub mod bench;
pub mod cgs;
pub mod dpa;
pub mod driver;
pub mod finite_mc;
pub mod formula;
pub mod infinite_mc;
pub mod limits;
pub mod ltlf2dfa;

mod error;

pub use bdd::{Bdd, BddError, BddStore, VarBlock, VarId};
pub use cgs::{Cgs, Coalition, SymbolicCgs};
pub use driver::{check, CheckRequest, CheckResult, Engine, Semantics};
pub use error::{Error, Result};
pub use formula::{parse_formula, Formula};
pub use infinite_mc::SolverKind;
