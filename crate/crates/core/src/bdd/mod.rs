//! Reduced ordered binary decision diagrams.
//!
//! A [`BddStore`] owns a hash-consed node table together with the variable
//! order. Functions are represented by lightweight [`Bdd`] handles that carry
//! the id of the store that created them; every operation checks that its
//! operands belong to the receiving store.
//!
//! Variables are grouped into named [`VarBlock`]s. A block named `x'` is the
//! *primed partner* of block `x`; partners are laid out bit-interleaved
//! (`x0, x0', x1, x1', ...`) so that transition relations stay small.
//!
//! The store never collects garbage and never reorders variables on its own;
//! [`BddStore::insert_blocks`] may place new variables anywhere in the order
//! because existing nodes never mention them.

mod analysis;
mod quant;
mod store;

pub use store::{BddStore, BoolOp, DEFAULT_BUDGET_BYTES};

use std::fmt;

use thiserror::Error;

/// Stable identifier of a variable inside one store.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Handle to a canonical Boolean function stored in a [`BddStore`].
///
/// Two handles from the same store compare equal iff they denote the same
/// function.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bdd {
    pub(crate) root: u32,
    pub(crate) store: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.root == store::FALSE
    }

    pub fn is_true(self) -> bool {
        self.root == store::TRUE
    }

    pub fn is_const(self) -> bool {
        self.root <= store::TRUE
    }

    /// Identifier of the owning store.
    pub fn store_id(self) -> u32 {
        self.store
    }
}

impl fmt::Debug for Bdd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            store::FALSE => write!(f, "Bdd(false)"),
            store::TRUE => write!(f, "Bdd(true)"),
            r => write!(f, "Bdd(#{r}@{})", self.store),
        }
    }
}

/// A named, ordered group of variables (for example the bits of the current
/// state vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarBlock {
    pub name: String,
    pub vars: Vec<VarId>,
}

impl VarBlock {
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("a store needs at least one variable")]
    EmptyStore,
    #[error("duplicate variable block `{0}`")]
    DuplicateBlock(String),
    #[error("unknown variable block `{0}`")]
    UnknownBlock(String),
    #[error("paired blocks `{0}` and `{1}` differ in width")]
    PairWidthMismatch(String, String),
    #[error("operand belongs to store {found}, expected store {expected}")]
    CrossStore { expected: u32, found: u32 },
    #[error("variable {0} does not belong to this store")]
    UnknownVar(u32),
    #[error("rename blocks differ in length ({0} vs {1})")]
    BlockLengthMismatch(usize, usize),
    #[error("function depends on variable `{0}` outside the counted set")]
    FreeVariable(String),
    #[error("too many variables to count over ({0})")]
    CountOverflow(usize),
    #[error("node store exceeded its budget of {budget} bytes")]
    BudgetExceeded { budget: usize },
}

pub type BddResult<T> = Result<T, BddError>;

/// Smallest number of bits able to encode `n` distinct values.
pub fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
