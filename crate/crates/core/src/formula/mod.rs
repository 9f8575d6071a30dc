//! ATL*, LTL and LTLf formulas.
//!
//! Surface syntax covers state and path formulas with strategic quantifiers
//! `<<A,B>>`. Two operators exist only internally as targets of
//! negation normal form: weak next and release.

mod parser;
mod semantics;
mod transform;

pub use parser::{parse_formula, ParseError};
pub use semantics::{eval_finite_trace, eval_lasso, eval_on_trace, Trace};
pub(crate) use transform::map_children;
pub use transform::{
    extract_state_subformulas, fresh_atom, nnf, normalize, substitute_atoms, AtomMap, FormulaError,
    FRESH_PREFIX,
};

use std::collections::BTreeSet;
use std::fmt;

/// Abstract syntax of ATL* formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `<<A>> ψ` with coalition `A`.
    Strategic(BTreeSet<String>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    /// Weak next: true at the last position of a finite trace.
    WeakNext(Box<Formula>),
    /// Release, the dual of until.
    Release(Box<Formula>, Box<Formula>),
}

/// Result of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaClass {
    State,
    Path,
    IllFormed,
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn finally(f: Formula) -> Formula {
        Formula::Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    pub fn strategic<S: AsRef<str>>(agents: &[S], body: Formula) -> Formula {
        Formula::Strategic(
            agents.iter().map(|a| a.as_ref().to_string()).collect(),
            Box::new(body),
        )
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Finally(a) | Globally(a) | WeakNext(a) | Strategic(_, a) => vec![a],
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(p) = self {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn has_strategic(&self) -> bool {
        matches!(self, Formula::Strategic(..)) || self.children().iter().any(|c| c.has_strategic())
    }

    fn is_temporal(&self) -> bool {
        use Formula::*;
        matches!(
            self,
            Next(_) | Until(..) | Finally(_) | Globally(_) | WeakNext(_) | Release(..)
        )
    }

    fn has_internal(&self) -> bool {
        matches!(self, Formula::WeakNext(_) | Formula::Release(..))
            || self.children().iter().any(|c| c.has_internal())
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

/// Classifies a formula as a state formula, a path formula, or neither.
///
/// State formulas have every temporal operator under a strategic
/// quantifier. Internal-only operators make a formula ill-formed.
pub fn classify(f: &Formula) -> FormulaClass {
    if f.has_internal() {
        return FormulaClass::IllFormed;
    }
    if is_state(f) {
        FormulaClass::State
    } else {
        FormulaClass::Path
    }
}

fn is_state(f: &Formula) -> bool {
    match f {
        Formula::Strategic(..) => true,
        other if other.is_temporal() => false,
        other => other.children().iter().all(|c| is_state(c)),
    }
}

// Printing follows the surface grammar, so `parse_formula(&f.to_string())`
// yields `f` again for every surface formula. Binary operators are always
// parenthesised, and so are nested strategic formulas because their scope
// extends to the right.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, true)
    }
}

fn write_formula(x: &Formula, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
    use Formula::*;
    match x {
        True => write!(f, "true"),
        False => write!(f, "false"),
        Atom(p) => write!(f, "{p}"),
        Not(a) => {
            write!(f, "!")?;
            write_formula(a, f, false)
        }
        Next(a) => {
            write!(f, "X ")?;
            write_formula(a, f, false)
        }
        Finally(a) => {
            write!(f, "F ")?;
            write_formula(a, f, false)
        }
        Globally(a) => {
            write!(f, "G ")?;
            write_formula(a, f, false)
        }
        WeakNext(a) => {
            write!(f, "!X !")?;
            write_formula(a, f, false)
        }
        Strategic(agents, body) => {
            if !top {
                write!(f, "(")?;
            }
            write!(f, "<<")?;
            for (i, a) in agents.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ">> ")?;
            write_formula(body, f, false)?;
            if !top {
                write!(f, ")")?;
            }
            Ok(())
        }
        And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => {
            let op = match x {
                And(..) => "&",
                Or(..) => "|",
                Until(..) => "U",
                _ => "R",
            };
            write!(f, "(")?;
            write_formula(a, f, false)?;
            write!(f, " {op} ")?;
            write_formula(b, f, false)?;
            write!(f, ")")
        }
    }
}
