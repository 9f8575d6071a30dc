use std::collections::BTreeSet;

use super::transform::FormulaError;
use super::Formula;

/// A finite trace: the set of true atoms at each position.
pub type Trace = Vec<BTreeSet<String>>;

/// Finite-trace truth of `psi` at position `i` of `trace`.
///
/// `X` needs a successor position and `U` a witness inside the trace.
pub fn eval_finite_trace(
    psi: &Formula,
    trace: &[BTreeSet<String>],
    i: usize,
) -> Result<bool, FormulaError> {
    if i >= trace.len() {
        return Err(FormulaError::IndexOutOfRange {
            index: i,
            len: trace.len(),
        });
    }
    let values = eval_on_trace(psi, trace.len(), &|p: &str, k: usize| trace[k].contains(p))?;
    Ok(values[i])
}

/// Truth values of `psi` at every position of a trace of length `len`,
/// with atoms looked up through `holds(atom, position)`.
pub fn eval_on_trace(
    psi: &Formula,
    len: usize,
    holds: &dyn Fn(&str, usize) -> bool,
) -> Result<Vec<bool>, FormulaError> {
    use Formula::*;
    Ok(match psi {
        True => vec![true; len],
        False => vec![false; len],
        Atom(p) => (0..len).map(|k| holds(p, k)).collect(),
        Not(a) => eval_on_trace(a, len, holds)?
            .into_iter()
            .map(|v| !v)
            .collect(),
        And(a, b) => {
            let (x, y) = (eval_on_trace(a, len, holds)?, eval_on_trace(b, len, holds)?);
            x.iter().zip(&y).map(|(u, v)| *u && *v).collect()
        }
        Or(a, b) => {
            let (x, y) = (eval_on_trace(a, len, holds)?, eval_on_trace(b, len, holds)?);
            x.iter().zip(&y).map(|(u, v)| *u || *v).collect()
        }
        Next(a) => {
            let x = eval_on_trace(a, len, holds)?;
            (0..len).map(|k| k + 1 < len && x[k + 1]).collect()
        }
        WeakNext(a) => {
            let x = eval_on_trace(a, len, holds)?;
            (0..len).map(|k| k + 1 >= len || x[k + 1]).collect()
        }
        Until(a, b) => {
            let (x, y) = (eval_on_trace(a, len, holds)?, eval_on_trace(b, len, holds)?);
            let mut out = vec![false; len];
            for k in (0..len).rev() {
                out[k] = y[k] || (x[k] && k + 1 < len && out[k + 1]);
            }
            out
        }
        Release(a, b) => {
            let (x, y) = (eval_on_trace(a, len, holds)?, eval_on_trace(b, len, holds)?);
            let mut out = vec![false; len];
            for k in (0..len).rev() {
                out[k] = y[k] && (x[k] || k + 1 >= len || out[k + 1]);
            }
            out
        }
        Finally(a) => {
            let x = eval_on_trace(a, len, holds)?;
            let mut out = vec![false; len];
            for k in (0..len).rev() {
                out[k] = x[k] || (k + 1 < len && out[k + 1]);
            }
            out
        }
        Globally(a) => {
            let x = eval_on_trace(a, len, holds)?;
            let mut out = vec![false; len];
            for k in (0..len).rev() {
                out[k] = x[k] && (k + 1 >= len || out[k + 1]);
            }
            out
        }
        Strategic(..) => return Err(FormulaError::StrategicOperator(psi.to_string())),
    })
}

/// Truth values of `psi` on the ultimately periodic word `u·v^ω`, at the
/// `prefix + period` distinct positions; position `prefix + period - 1`
/// loops back to `prefix`. `X` and weak `X` coincide here.
pub fn eval_lasso(
    psi: &Formula,
    prefix: usize,
    period: usize,
    holds: &dyn Fn(&str, usize) -> bool,
) -> Result<Vec<bool>, FormulaError> {
    let len = prefix + period;
    if period == 0 {
        return Err(FormulaError::IndexOutOfRange {
            index: prefix,
            len: prefix,
        });
    }
    let succ = |k: usize| if k + 1 < len { k + 1 } else { prefix };
    let fix = |init: bool, step: &dyn Fn(&[bool], usize) -> bool| {
        let mut out = vec![init; len];
        loop {
            let next: Vec<bool> = (0..len).map(|k| step(&out, k)).collect();
            if next == out {
                return out;
            }
            out = next;
        }
    };
    use Formula::*;
    let ev = |f: &Formula| eval_lasso(f, prefix, period, holds);
    Ok(match psi {
        True => vec![true; len],
        False => vec![false; len],
        Atom(p) => (0..len).map(|k| holds(p, k)).collect(),
        Not(a) => ev(a)?.into_iter().map(|v| !v).collect(),
        And(a, b) => {
            let (x, y) = (ev(a)?, ev(b)?);
            x.iter().zip(&y).map(|(u, v)| *u && *v).collect()
        }
        Or(a, b) => {
            let (x, y) = (ev(a)?, ev(b)?);
            x.iter().zip(&y).map(|(u, v)| *u || *v).collect()
        }
        Next(a) | WeakNext(a) => {
            let x = ev(a)?;
            (0..len).map(|k| x[succ(k)]).collect()
        }
        Until(a, b) => {
            let (x, y) = (ev(a)?, ev(b)?);
            fix(false, &|o, k| y[k] || (x[k] && o[succ(k)]))
        }
        Release(a, b) => {
            let (x, y) = (ev(a)?, ev(b)?);
            fix(true, &|o, k| y[k] && (x[k] || o[succ(k)]))
        }
        Finally(a) => {
            let x = ev(a)?;
            fix(false, &|o, k| x[k] || o[succ(k)])
        }
        Globally(a) => {
            let x = ev(a)?;
            fix(true, &|o, k| x[k] && o[succ(k)])
        }
        Strategic(..) => return Err(FormulaError::StrategicOperator(psi.to_string())),
    })
}
