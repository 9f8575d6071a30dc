//! Deterministic parity automata for LTL over infinite words.
//!
//! Automata come from external translators in HOA format, or from the
//! built-in safety/co-safety construction. Internally every [`Dpa`] is
//! brought to the min-even convention: a run is accepting iff the least
//! priority visited infinitely often is even.

mod convert;
mod hoa;
mod race;
mod symbolic;

pub use convert::{acceptance_family, state_based_priorities, AcceptanceFamily};
pub use hoa::{parse_hoa, AccCond, HoaAutomaton, HoaEdge, HoaState, LabelExpr};
pub use race::{builtin_translate, race_translate, ToolSpec, Translation};
pub use symbolic::{encode_dpa, SymbolicDpa};

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("HOA parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Hoa {
        line: Option<usize>,
        message: String,
    },
    #[error("unsupported automaton: {0}")]
    Unsupported(String),
    #[error("no translator succeeded: {0}")]
    Translation(String),
}

impl AutomatonError {
    pub(crate) fn hoa(line: Option<usize>, message: impl Into<String>) -> Self {
        AutomatonError::Hoa {
            line,
            message: message.into(),
        }
    }
}

/// Which priorities count as accepting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    MinEven,
    MinOdd,
    MaxEven,
    MaxOdd,
}

impl Polarity {
    pub fn is_min(self) -> bool {
        matches!(self, Polarity::MinEven | Polarity::MinOdd)
    }

    /// Parity (0 or 1) of the accepting priorities.
    pub fn good_parity(self) -> u32 {
        match self {
            Polarity::MinEven | Polarity::MaxEven => 0,
            Polarity::MinOdd | Polarity::MaxOdd => 1,
        }
    }

    /// Whether a run recurring exactly on `priorities` is accepting.
    pub fn accepts(self, priorities: impl IntoIterator<Item = u32>) -> bool {
        let it = priorities.into_iter();
        let extreme = if self.is_min() { it.min() } else { it.max() };
        extreme.is_some_and(|p| p % 2 == self.good_parity())
    }
}

/// A complete deterministic parity automaton with state-based priorities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    pub atoms: Vec<String>,
    pub initial: usize,
    /// Successor of `(state, letter)` at `state << atoms.len() | letter`.
    pub delta: Vec<usize>,
    pub priority: Vec<u32>,
    pub polarity: Polarity,
}

impl Dpa {
    pub fn state_count(&self) -> usize {
        self.priority.len()
    }

    pub fn letter_count(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn step(&self, state: usize, letter: u32) -> usize {
        self.delta[state << self.atoms.len() | letter as usize]
    }

    /// One more than the largest priority.
    pub fn priority_count(&self) -> u32 {
        self.priority.iter().max().map_or(0, |m| m + 1)
    }

    pub fn letter_of<S: AsRef<str>>(&self, true_atoms: impl IntoIterator<Item = S>) -> u32 {
        let mut l = 0;
        for a in true_atoms {
            if let Some(i) = self.atoms.iter().position(|x| x == a.as_ref()) {
                l |= 1 << i;
            }
        }
        l
    }

    /// Acceptance of the ultimately periodic word `u·v^ω`.
    pub fn accepts_lasso(&self, u: &[u32], v: &[u32]) -> bool {
        assert!(!v.is_empty(), "period must be non-empty");
        let mut s = u.iter().fold(self.initial, |s, &l| self.step(s, l));
        let mut starts = vec![s];
        loop {
            for &l in v {
                s = self.step(s, l);
            }
            if let Some(pos) = starts.iter().position(|&x| x == s) {
                // Replay the cycle from the repeated start state.
                let mut t = starts[pos];
                let mut prios = BTreeSet::new();
                for _ in pos..starts.len() {
                    for &l in v {
                        t = self.step(t, l);
                        prios.insert(self.priority[t]);
                    }
                }
                return self.polarity.accepts(prios);
            }
            starts.push(s);
        }
    }

    /// Renumbers states breadth-first from the initial state, dropping
    /// unreachable ones.
    pub fn canonical(&self) -> Dpa {
        let letters = self.letter_count();
        let mut id = vec![usize::MAX; self.state_count()];
        let mut order = vec![self.initial];
        id[self.initial] = 0;
        let mut next = 0;
        while next < order.len() {
            let s = order[next];
            next += 1;
            for l in 0..letters {
                let t = self.step(s, l as u32);
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                }
            }
        }
        let mut delta = Vec::with_capacity(order.len() * letters);
        for &s in &order {
            for l in 0..letters {
                delta.push(id[self.step(s, l as u32)]);
            }
        }
        Dpa {
            atoms: self.atoms.clone(),
            initial: 0,
            delta,
            priority: order.iter().map(|&s| self.priority[s]).collect(),
            polarity: self.polarity,
        }
    }

    /// State-based HOA v1 text, one explicit edge per letter. Max
    /// polarities are written in the HOA max family, undoing the shift by
    /// one applied when reading them.
    pub fn to_hoa(&self) -> String {
        let max = self.polarity == Polarity::MaxEven || self.polarity == Polarity::MaxOdd;
        let top = self.priority_count();
        let (sets, odd, mark): (u32, bool, Box<dyn Fn(u32) -> Option<u32>>) = if max {
            (
                top.saturating_sub(1).max(1),
                self.polarity == Polarity::MaxEven,
                Box::new(|p: u32| p.checked_sub(1)),
            )
        } else {
            (
                top.max(1),
                self.polarity == Polarity::MinOdd,
                Box::new(Some),
            )
        };
        let mut out = String::from("HOA: v1\n");
        let _ = writeln!(out, "States: {}", self.state_count());
        let _ = writeln!(out, "Start: {}", self.initial);
        let _ = write!(out, "AP: {}", self.atoms.len());
        for a in &self.atoms {
            let _ = write!(out, " \"{a}\"");
        }
        out.push('\n');
        let kind = if max { "max" } else { "min" };
        let parity = if odd { "odd" } else { "even" };
        let _ = writeln!(out, "acc-name: parity {kind} {parity} {sets}");
        let _ = writeln!(
            out,
            "Acceptance: {sets} {}",
            convert::parity_condition(!max, odd, sets as usize)
        );
        out.push_str("properties: deterministic complete state-acc\n--BODY--\n");
        for s in 0..self.state_count() {
            match mark(self.priority[s]) {
                Some(m) => {
                    let _ = writeln!(out, "State: {s} {{{m}}}");
                }
                None => {
                    let _ = writeln!(out, "State: {s}");
                }
            }
            for l in 0..self.letter_count() {
                let _ = writeln!(
                    out,
                    "  [{}] {}",
                    self.letter_expr(l as u32),
                    self.step(s, l as u32)
                );
            }
        }
        out.push_str("--END--\n");
        out
    }

    fn letter_expr(&self, l: u32) -> String {
        if self.atoms.is_empty() {
            return "t".into();
        }
        (0..self.atoms.len())
            .map(|i| {
                if l >> i & 1 == 1 {
                    i.to_string()
                } else {
                    format!("!{i}")
                }
            })
            .collect::<Vec<_>>()
            .join("&")
    }
}

/// Converts to the min-even convention and compacts priorities.
///
/// Min-odd is shifted by one; max conventions are flipped to `K - Ω` with
/// `K` of the right parity. Compaction merges adjacent priorities of equal
/// parity, so an already compact min-even automaton is returned unchanged.
pub fn normalize_acceptance(d: &Dpa) -> Dpa {
    let max = d.priority.iter().copied().max().unwrap_or(0);
    let min = d.priority.iter().copied().min().unwrap_or(0);
    let remap: Box<dyn Fn(u32) -> u32> = match d.polarity {
        Polarity::MinEven => Box::new(|p| p),
        Polarity::MinOdd if min > 0 => Box::new(|p| p - 1),
        Polarity::MinOdd => Box::new(|p| p + 1),
        Polarity::MaxEven | Polarity::MaxOdd => {
            let want = d.polarity.good_parity();
            let k = if max % 2 == want { max } else { max + 1 };
            Box::new(move |p| k - p)
        }
    };
    let shifted: Vec<u32> = d.priority.iter().map(|&p| remap(p)).collect();
    let mut out = d.clone();
    out.priority = compact(&shifted);
    out.polarity = Polarity::MinEven;
    out
}

/// Order- and parity-preserving renumbering onto the fewest priorities.
fn compact(prios: &[u32]) -> Vec<u32> {
    let distinct: BTreeSet<u32> = prios.iter().copied().collect();
    let mut map = std::collections::BTreeMap::new();
    let mut prev: Option<(u32, u32)> = None;
    for p in distinct {
        let new = match prev {
            None => p % 2,
            Some((old, new)) if old % 2 == p % 2 => new,
            Some((_, new)) => new + 1,
        };
        map.insert(p, new);
        prev = Some((p, new));
    }
    prios.iter().map(|p| map[p]).collect()
}

#[cfg(test)]
mod tests;
