use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("strategic operator in a pure temporal formula: {0}")]
    StrategicOperator(String),
    #[error("position {index} out of range for a trace of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{0} atoms exceed the explicit alphabet limit")]
    TooManyAtoms(usize),
}

/// Fresh atom name ↦ the state subformula it stands for.
pub type AtomMap = BTreeMap<String, Formula>;

/// Prefix reserved for generated atoms; model atoms may not use it.
pub const FRESH_PREFIX: &str = "__";

static FRESH_COUNTER: AtomicUsize = AtomicUsize::new(1);

/// A process-wide unique atom name `__sub<k>`.
pub fn fresh_atom() -> String {
    format!(
        "{FRESH_PREFIX}sub{}",
        FRESH_COUNTER.fetch_add(1, Ordering::Relaxed)
    )
}

/// Replaces every maximal strategic subformula of `psi` by a fresh atom.
///
/// Boolean structure over atoms stays in place, so the result is a pure
/// temporal formula. Syntactically equal subformulas share one atom.
pub fn extract_state_subformulas(psi: &Formula) -> (Formula, AtomMap) {
    let mut by_formula: BTreeMap<Formula, String> = BTreeMap::new();
    let out = extract_rec(psi, &mut by_formula);
    let map = by_formula.into_iter().map(|(f, name)| (name, f)).collect();
    (out, map)
}

fn extract_rec(f: &Formula, seen: &mut BTreeMap<Formula, String>) -> Formula {
    use Formula::*;
    match f {
        Strategic(..) => {
            let name = seen.entry(f.clone()).or_insert_with(fresh_atom);
            Atom(name.clone())
        }
        True | False | Atom(_) => f.clone(),
        _ => map_children(f, |c| extract_rec(c, seen)),
    }
}

/// Rebuilds `f` with every immediate child replaced by `g(child)`.
pub(crate) fn map_children(f: &Formula, mut g: impl FnMut(&Formula) -> Formula) -> Formula {
    use Formula::*;
    let b = |x: Formula| Box::new(x);
    match f {
        True | False | Atom(_) => f.clone(),
        Not(a) => Not(b(g(a))),
        Next(a) => Next(b(g(a))),
        Finally(a) => Finally(b(g(a))),
        Globally(a) => Globally(b(g(a))),
        WeakNext(a) => WeakNext(b(g(a))),
        Strategic(ag, a) => Strategic(ag.clone(), b(g(a))),
        And(x, y) => {
            let x = g(x);
            And(b(x), b(g(y)))
        }
        Or(x, y) => {
            let x = g(x);
            Or(b(x), b(g(y)))
        }
        Until(x, y) => {
            let x = g(x);
            Until(b(x), b(g(y)))
        }
        Release(x, y) => {
            let x = g(x);
            Release(b(x), b(g(y)))
        }
    }
}

/// Replaces atoms named in `map` by their formulas.
pub fn substitute_atoms(f: &Formula, map: &AtomMap) -> Formula {
    match f {
        Formula::Atom(p) => map.get(p).cloned().unwrap_or_else(|| f.clone()),
        _ => map_children(f, |c| substitute_atoms(c, map)),
    }
}

fn reject_strategic(f: &Formula) -> Result<(), FormulaError> {
    if f.has_strategic() {
        Err(FormulaError::StrategicOperator(f.to_string()))
    } else {
        Ok(())
    }
}

/// Expands `F φ` to `true U φ` and `G φ` to `!(true U !φ)`, and removes
/// double negations.
pub fn normalize(f: &Formula) -> Result<Formula, FormulaError> {
    reject_strategic(f)?;
    Ok(normalize_rec(f))
}

fn normalize_rec(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Finally(a) => Formula::until(True, normalize_rec(a)),
        Globally(a) => negate(Formula::until(True, negate(normalize_rec(a)))),
        Not(a) => negate(normalize_rec(a)),
        _ => map_children(f, normalize_rec),
    }
}

fn negate(f: Formula) -> Formula {
    match f {
        Formula::Not(inner) => *inner,
        other => Formula::not(other),
    }
}

/// Negation normal form for finite-trace semantics: negations only in
/// front of atoms, with weak next and release as the duals of next and
/// until. `F` and `G` are expanded.
pub fn nnf(f: &Formula) -> Result<Formula, FormulaError> {
    reject_strategic(f)?;
    Ok(nnf_rec(f, false))
}

fn nnf_rec(f: &Formula, neg: bool) -> Formula {
    use Formula::*;
    let bx = Box::new;
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(_), false) => f.clone(),
        (Atom(_), true) => Formula::not(f.clone()),
        (Not(a), n) => nnf_rec(a, !n),
        (And(a, b), false) => And(bx(nnf_rec(a, false)), bx(nnf_rec(b, false))),
        (And(a, b), true) => Or(bx(nnf_rec(a, true)), bx(nnf_rec(b, true))),
        (Or(a, b), false) => Or(bx(nnf_rec(a, false)), bx(nnf_rec(b, false))),
        (Or(a, b), true) => And(bx(nnf_rec(a, true)), bx(nnf_rec(b, true))),
        (Next(a), false) => Next(bx(nnf_rec(a, false))),
        (Next(a), true) => WeakNext(bx(nnf_rec(a, true))),
        (WeakNext(a), false) => WeakNext(bx(nnf_rec(a, false))),
        (WeakNext(a), true) => Next(bx(nnf_rec(a, true))),
        (Until(a, b), false) => Until(bx(nnf_rec(a, false)), bx(nnf_rec(b, false))),
        (Until(a, b), true) => Release(bx(nnf_rec(a, true)), bx(nnf_rec(b, true))),
        (Release(a, b), false) => Release(bx(nnf_rec(a, false)), bx(nnf_rec(b, false))),
        (Release(a, b), true) => Until(bx(nnf_rec(a, true)), bx(nnf_rec(b, true))),
        (Finally(a), false) => Until(bx(True), bx(nnf_rec(a, false))),
        (Finally(a), true) => Release(bx(False), bx(nnf_rec(a, true))),
        (Globally(a), false) => Release(bx(False), bx(nnf_rec(a, false))),
        (Globally(a), true) => Until(bx(True), bx(nnf_rec(a, true))),
        (Strategic(..), _) => unreachable!("rejected before the rewrite"),
    }
}
