//! LTLf to minimal DFA translation.
//!
//! The formula is put in negation normal form and unfolded by progression:
//! an NFA state is a conjunction of pending next-obligations (`X ψ` or weak
//! `X ψ`). A state may end the trace iff it has no strong obligation.
//! Subset construction and Hopcroft minimization yield the DFA.
//!
//! Letters are bitmasks over [`Dfa::atoms`]: bit `i` is set iff atom `i`
//! holds.

mod minimize;
mod progression;
pub(crate) mod symbolic;

pub use minimize::{determinize_minimize, minimize};
pub use progression::ltlf_to_nfa;
pub use symbolic::{encode_dfa, SymbolicDfa};

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::formula::{Formula, FormulaError};

/// Largest alphabet handled explicitly, in atoms.
pub const MAX_ATOMS: usize = 20;

/// A complete deterministic finite automaton over `2^atoms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub atoms: Vec<String>,
    pub initial: usize,
    pub finals: Vec<bool>,
    /// Successor of `(state, letter)` at `state << atoms.len() | letter`.
    pub delta: Vec<usize>,
}

/// A nondeterministic automaton; the intermediate form of [`translate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub atoms: Vec<String>,
    pub initial: BTreeSet<usize>,
    pub finals: Vec<bool>,
    /// `succ[state][letter]`: successor set.
    pub succ: Vec<Vec<BTreeSet<usize>>>,
}

impl Nfa {
    pub fn state_count(&self) -> usize {
        self.finals.len()
    }

    pub fn accepts_letters(&self, word: &[u32]) -> bool {
        let mut cur = self.initial.clone();
        for &l in word {
            cur = cur
                .iter()
                .flat_map(|&s| self.succ[s][l as usize].iter().copied())
                .collect();
        }
        cur.iter().any(|&s| self.finals[s])
    }
}

impl Dfa {
    pub fn state_count(&self) -> usize {
        self.finals.len()
    }

    pub fn letter_count(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn step(&self, state: usize, letter: u32) -> usize {
        self.delta[state << self.atoms.len() | letter as usize]
    }

    pub fn run(&self, word: &[u32]) -> usize {
        word.iter().fold(self.initial, |s, &l| self.step(s, l))
    }

    pub fn accepts_letters(&self, word: &[u32]) -> bool {
        self.finals[self.run(word)]
    }

    /// Letter of a set of true atoms; atoms outside the alphabet are ignored.
    pub fn letter_of<S: AsRef<str>>(&self, true_atoms: impl IntoIterator<Item = S>) -> u32 {
        let mut l = 0;
        for a in true_atoms {
            if let Some(i) = self.atoms.iter().position(|x| x == a.as_ref()) {
                l |= 1 << i;
            }
        }
        l
    }

    /// Renumbers states in breadth-first order from the initial state and
    /// drops unreachable ones.
    pub fn canonical(&self) -> Dfa {
        let letters = self.letter_count();
        let mut id = vec![usize::MAX; self.state_count()];
        let mut order = vec![self.initial];
        id[self.initial] = 0;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for l in 0..letters {
                let t = self.step(s, l as u32);
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut delta = Vec::with_capacity(order.len() * letters);
        for &s in &order {
            for l in 0..letters {
                delta.push(id[self.step(s, l as u32)]);
            }
        }
        Dfa {
            atoms: self.atoms.clone(),
            initial: 0,
            finals: order.iter().map(|&s| self.finals[s]).collect(),
            delta,
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for s in 0..self.state_count() {
            let shape = if self.finals[s] {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  s{s} [shape={shape}];");
        }
        let _ = writeln!(out, "  init -> s{};", self.initial);
        for s in 0..self.state_count() {
            let mut by_target: Vec<(usize, Vec<String>)> = Vec::new();
            for l in 0..self.letter_count() {
                let t = self.step(s, l as u32);
                let label = self.letter_label(l as u32);
                match by_target.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, v)) => v.push(label),
                    None => by_target.push((t, vec![label])),
                }
            }
            for (t, labels) in by_target {
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", labels.join(" | "));
            }
        }
        out.push_str("}\n");
        out
    }

    fn letter_label(&self, l: u32) -> String {
        if self.atoms.is_empty() {
            return "true".into();
        }
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if l >> i & 1 == 1 {
                    a.clone()
                } else {
                    format!("!{a}")
                }
            })
            .collect::<Vec<_>>()
            .join("&")
    }
}

/// Minimal DFA accepting exactly the non-empty finite traces that satisfy
/// `psi`. Acceptance of the empty word is unconstrained and chosen to keep
/// the automaton small.
pub fn translate(psi: &Formula) -> Result<Dfa, FormulaError> {
    let nfa = ltlf_to_nfa(psi)?;
    let dfa = determinize_minimize(&nfa);
    Ok(relax_initial(&dfa))
}

/// Picks the smaller of the two minimal automata that differ only in
/// whether the empty word is accepted.
pub(crate) fn relax_initial(dfa: &Dfa) -> Dfa {
    let letters = dfa.letter_count();
    let n = dfa.state_count();
    // Fresh copy of the initial state with no incoming edges.
    let mut base = dfa.clone();
    base.finals.push(false);
    for l in 0..letters {
        base.delta.push(dfa.step(dfa.initial, l as u32));
    }
    base.initial = n;
    let mut best: Option<Dfa> = None;
    for accept_empty in [false, true] {
        let mut d = base.clone();
        d.finals[n] = accept_empty;
        let m = minimize(&d);
        if best
            .as_ref()
            .is_none_or(|b| m.state_count() < b.state_count())
        {
            best = Some(m);
        }
    }
    best.expect("two candidates")
}

/// Simulates `d` on a trace of label sets. The empty trace is rejected.
pub fn dfa_accepts(d: &Dfa, trace: &[BTreeSet<String>]) -> bool {
    if trace.is_empty() {
        return false;
    }
    let word: Vec<u32> = trace.iter().map(|letter| d.letter_of(letter)).collect();
    d.accepts_letters(&word)
}
