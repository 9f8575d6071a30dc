//! Concurrent game structures with final states.
//!
//! Models are written in CGSL, a small line-oriented format:
//!
//! ```text
//! agents: A, B
//! atoms: p
//! states: s0, s1
//! initial: s0
//! final: s1
//! actions A: go, stay
//! actions B: go, stay
//! label s1: p
//! trans s0 (go,go) -> s1
//! ```
//!
//! One `trans` line is required per state and joint action, with actions
//! listed in agent declaration order. `#` starts a comment.

mod parse;
mod random;
mod symbolic;

pub use parse::parse_model;
pub use random::{random_cgs, RandomModelParams};
pub use symbolic::SymbolicCgs;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

/// A set of agent names.
pub type Coalition = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelError {
    /// 1-based source line, when the error comes from model text.
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ModelError {}

impl ModelError {
    pub(crate) fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        ModelError {
            line,
            message: message.into(),
        }
    }
}

/// An explicit concurrent game structure.
///
/// Joint actions are numbered in mixed radix with the first agent as the
/// least significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgs {
    pub agents: Vec<String>,
    pub atoms: Vec<String>,
    pub states: Vec<String>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    /// Action names per agent.
    pub actions: Vec<Vec<String>>,
    /// Successor of `(state, joint)` at `state * joint_count + joint`.
    pub transitions: Vec<usize>,
    /// Atom indices true in each state.
    pub labels: Vec<BTreeSet<usize>>,
}

impl Cgs {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn joint_count(&self) -> usize {
        self.actions.iter().map(|a| a.len()).product()
    }

    pub fn joint_index(&self, choice: &[usize]) -> usize {
        let mut idx = 0;
        let mut radix = 1;
        for (a, acts) in choice.iter().zip(&self.actions) {
            idx += a * radix;
            radix *= acts.len();
        }
        idx
    }

    pub fn decode_joint(&self, mut joint: usize) -> Vec<usize> {
        self.actions
            .iter()
            .map(|acts| {
                let a = joint % acts.len();
                joint /= acts.len();
                a
            })
            .collect()
    }

    pub fn successor(&self, state: usize, joint: usize) -> usize {
        self.transitions[state * self.joint_count() + joint]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn holds(&self, state: usize, atom: &str) -> bool {
        self.atom_index(atom)
            .is_some_and(|i| self.labels[state].contains(&i))
    }

    /// Agent indices of a coalition, sorted.
    pub fn coalition_indices(&self, coalition: &Coalition) -> Result<Vec<usize>, ModelError> {
        coalition
            .iter()
            .map(|a| {
                self.agent_index(a)
                    .ok_or_else(|| ModelError::new(None, format!("unknown agent `{a}`")))
            })
            .collect::<Result<BTreeSet<_>, _>>()
            .map(|s| s.into_iter().collect())
    }

    /// States reachable from the initial state, in breadth-first order.
    pub fn reachable_states(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        let j = self.joint_count();
        while let Some(s) = queue.pop_front() {
            for joint in 0..j {
                let t = self.successor(s, joint);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Checks the structural invariants; parsed models always pass.
    pub fn validate(&self) -> Result<(), ModelError> {
        let err = |m: String| Err(ModelError::new(None, m));
        if self.agents.is_empty() {
            return err("no agents declared".into());
        }
        if self.states.is_empty() {
            return err("no states declared".into());
        }
        if self.initial >= self.state_count() {
            return err("initial state out of range".into());
        }
        if self.finals.iter().any(|&f| f >= self.state_count()) {
            return err("final state out of range".into());
        }
        if self.actions.len() != self.agents.len() {
            return err("action lists do not match agents".into());
        }
        if let Some(i) = self.actions.iter().position(|a| a.is_empty()) {
            return err(format!("agent `{}` has no actions", self.agents[i]));
        }
        if self.transitions.len() != self.state_count() * self.joint_count() {
            return err("transition function not total".into());
        }
        if self.transitions.iter().any(|&t| t >= self.state_count()) {
            return err("transition target out of range".into());
        }
        if self.labels.len() != self.state_count()
            || self.labels.iter().flatten().any(|&a| a >= self.atoms.len())
        {
            return err("labelling out of range".into());
        }
        Ok(())
    }

    /// CGSL text that parses back to this model.
    pub fn to_cgsl(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "agents: {}", self.agents.join(", "));
        let _ = writeln!(out, "atoms: {}", self.atoms.join(", "));
        let _ = writeln!(out, "states: {}", self.states.join(", "));
        let _ = writeln!(out, "initial: {}", self.states[self.initial]);
        let finals: Vec<&str> = self
            .finals
            .iter()
            .map(|&f| self.states[f].as_str())
            .collect();
        let _ = writeln!(out, "final: {}", finals.join(", "));
        for (agent, acts) in self.agents.iter().zip(&self.actions) {
            let _ = writeln!(out, "actions {agent}: {}", acts.join(", "));
        }
        for (s, labels) in self.labels.iter().enumerate() {
            if !labels.is_empty() {
                let names: Vec<&str> = labels.iter().map(|&a| self.atoms[a].as_str()).collect();
                let _ = writeln!(out, "label {}: {}", self.states[s], names.join(", "));
            }
        }
        let j = self.joint_count();
        for s in 0..self.state_count() {
            for joint in 0..j {
                let names: Vec<&str> = self
                    .decode_joint(joint)
                    .iter()
                    .zip(&self.actions)
                    .map(|(&a, acts)| acts[a].as_str())
                    .collect();
                let _ = writeln!(
                    out,
                    "trans {} ({}) -> {}",
                    self.states[s],
                    names.join(","),
                    self.states[self.successor(s, joint)]
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests;
