use std::collections::BTreeSet;

use rand::Rng;

use super::Cgs;

/// Shape of a randomly generated model.
#[derive(Debug, Clone, Copy)]
pub struct RandomModelParams {
    pub states: usize,
    pub agents: usize,
    pub max_actions: usize,
    /// Number of atoms, taken from `p, q, r, s, t, u`.
    pub atoms: usize,
    /// Probability that a state is final.
    pub final_prob: f64,
    /// Probability that an atom holds in a state.
    pub label_prob: f64,
}

const ATOM_NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
const AGENT_NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// A model with uniformly random transitions, labels and final states.
/// State 0 is initial.
pub fn random_cgs<R: Rng + ?Sized>(rng: &mut R, p: RandomModelParams) -> Cgs {
    assert!(p.states >= 1 && p.agents >= 1 && p.agents <= AGENT_NAMES.len());
    assert!(p.max_actions >= 1 && p.atoms <= ATOM_NAMES.len());
    let actions: Vec<Vec<String>> = (0..p.agents)
        .map(|_| {
            (0..rng.gen_range(1..=p.max_actions))
                .map(|k| format!("a{k}"))
                .collect()
        })
        .collect();
    let joint: usize = actions.iter().map(|a| a.len()).product();
    let transitions = (0..p.states * joint)
        .map(|_| rng.gen_range(0..p.states))
        .collect();
    let labels = (0..p.states)
        .map(|_| {
            (0..p.atoms)
                .filter(|_| rng.gen_bool(p.label_prob))
                .collect::<BTreeSet<_>>()
        })
        .collect();
    let finals = (0..p.states)
        .filter(|_| rng.gen_bool(p.final_prob))
        .collect();
    Cgs {
        agents: AGENT_NAMES[..p.agents]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        atoms: ATOM_NAMES[..p.atoms]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        states: (0..p.states).map(|i| format!("s{i}")).collect(),
        initial: 0,
        finals,
        actions,
        transitions,
        labels,
    }
}
