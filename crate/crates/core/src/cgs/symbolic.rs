use std::collections::BTreeMap;

use super::{Cgs, Coalition, ModelError};
use crate::bdd::{bits_for, Bdd, BddResult, BddStore, VarId};
use crate::error::{Error, Result};

/// Bit-level encoding of a [`Cgs`] inside a [`BddStore`].
///
/// States use the blocks `q` / `q'`, agent `i` uses block `act_<name>`.
/// All sets are restricted to valid encodings.
#[derive(Debug, Clone)]
pub struct SymbolicCgs {
    pub q: Vec<VarId>,
    pub q_next: Vec<VarId>,
    /// Action bits per agent, in agent order.
    pub actions: Vec<Vec<VarId>>,
    /// `δ(q, a, q')`.
    pub delta: Bdd,
    /// `λ′`: atom ↦ set of states.
    pub labels: BTreeMap<String, Bdd>,
    pub initial: Bdd,
    pub finals: Bdd,
    /// Encodings of actual states.
    pub valid: Bdd,
    /// Encodings of actual actions, per agent.
    pub action_valid: Vec<Bdd>,
    agents: Vec<String>,
    state_count: usize,
}

pub const STATE_BLOCK: &str = "q";
pub const NEXT_STATE_BLOCK: &str = "q'";

fn action_block(agent: &str) -> String {
    format!("act_{agent}")
}

impl SymbolicCgs {
    /// Block names and widths needed to encode `g`, in the default order.
    pub fn layout(g: &Cgs) -> Vec<(String, usize)> {
        let qbits = bits_for(g.state_count()).max(1);
        let mut out = vec![
            (STATE_BLOCK.to_string(), qbits),
            (NEXT_STATE_BLOCK.to_string(), qbits),
        ];
        for (agent, acts) in g.agents.iter().zip(&g.actions) {
            out.push((action_block(agent), bits_for(acts.len())));
        }
        out
    }

    /// A fresh store laid out for `g`.
    pub fn new_store(g: &Cgs) -> BddResult<BddStore> {
        let layout = Self::layout(g);
        let refs: Vec<(&str, usize)> = layout.iter().map(|(n, w)| (n.as_str(), *w)).collect();
        BddStore::new(&refs)
    }

    /// Encodes `g` into `store`, which must contain the blocks of
    /// [`SymbolicCgs::layout`] with at least the listed widths.
    pub fn encode(g: &Cgs, store: &mut BddStore) -> Result<SymbolicCgs> {
        let mut blocks = Vec::new();
        for (name, width) in Self::layout(g) {
            let vars = store.block_vars(&name)?;
            if vars.len() < width {
                return Err(Error::Invalid(format!(
                    "store too small: block `{name}` has {} bits, {width} needed",
                    vars.len()
                )));
            }
            blocks.push(vars);
        }
        let q = blocks[0].clone();
        let q_next = blocks[1].clone();
        let actions: Vec<Vec<VarId>> = blocks[2..].to_vec();

        let n = g.state_count() as u64;
        let valid = store.less_than(&q, n)?;
        let mut action_valid = Vec::with_capacity(actions.len());
        for (vars, acts) in actions.iter().zip(&g.actions) {
            action_valid.push(store.less_than(vars, acts.len() as u64)?);
        }

        let mut cubes = Vec::with_capacity(g.state_count() * g.joint_count());
        let mut lits: Vec<(VarId, bool)> = Vec::new();
        let push_value = |lits: &mut Vec<(VarId, bool)>, vars: &[VarId], value: usize| {
            for (i, &v) in vars.iter().enumerate() {
                lits.push((v, value >> i & 1 == 1));
            }
        };
        for s in 0..g.state_count() {
            for joint in 0..g.joint_count() {
                lits.clear();
                push_value(&mut lits, &q, s);
                push_value(&mut lits, &q_next, g.successor(s, joint));
                for (vars, a) in actions.iter().zip(g.decode_joint(joint)) {
                    push_value(&mut lits, vars, a);
                }
                cubes.push(store.cube_of(&mut lits)?);
            }
        }
        let delta = store.or_all(cubes)?;

        let mut labels = BTreeMap::new();
        for (ai, atom) in g.atoms.iter().enumerate() {
            let mut members = Vec::new();
            for s in 0..g.state_count() {
                if g.labels[s].contains(&ai) {
                    members.push(store.encode_value(&q, s as u64)?);
                }
            }
            labels.insert(atom.clone(), store.or_all(members)?);
        }
        let initial = store.encode_value(&q, g.initial as u64)?;
        let mut finals = Vec::new();
        for &f in &g.finals {
            finals.push(store.encode_value(&q, f as u64)?);
        }
        let finals = store.or_all(finals)?;
        Ok(SymbolicCgs {
            q,
            q_next,
            actions,
            delta,
            labels,
            initial,
            finals,
            valid,
            action_valid,
            agents: g.agents.clone(),
            state_count: g.state_count(),
        })
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    /// All action bits of all agents.
    pub fn all_action_vars(&self) -> Vec<VarId> {
        self.actions.iter().flatten().copied().collect()
    }

    /// The first variable of the action blocks in the order, if any.
    pub fn first_action_var(&self, store: &BddStore) -> Option<VarId> {
        self.all_action_vars()
            .into_iter()
            .min_by_key(|v| store.level(*v))
    }

    pub fn state(&self, store: &mut BddStore, id: usize) -> BddResult<Bdd> {
        store.encode_value(&self.q, id as u64)
    }

    /// `λ′(p)`, if `p` is a model atom or a labelled fresh atom.
    pub fn label(&self, atom: &str) -> Option<Bdd> {
        self.labels.get(atom).copied()
    }

    /// Registers a fresh atom that holds exactly in `states`.
    pub fn label_fresh(&mut self, name: &str, states: Bdd) {
        self.labels.insert(name.to_string(), states);
    }

    /// Post-image of a set of states under all joint actions.
    pub fn image(&self, store: &mut BddStore, states: Bdd) -> BddResult<Bdd> {
        let mut vars = self.q.clone();
        vars.extend(self.all_action_vars());
        let next = store.and_exists(&vars, states, self.delta)?;
        store.rename(next, &self.q_next, &self.q)
    }

    /// States reachable from the initial state.
    pub fn reachable(&self, store: &mut BddStore) -> BddResult<Bdd> {
        let mut r = self.initial;
        loop {
            let img = self.image(store, r)?;
            let next = store.or(r, img)?;
            if next == r {
                return Ok(r);
            }
            r = next;
        }
    }

    /// Action bits of the coalition (agent order) and the predicate of
    /// valid coalition action encodings.
    pub fn coalition_actions(
        &self,
        store: &mut BddStore,
        coalition: &Coalition,
    ) -> Result<(Vec<VarId>, Bdd)> {
        let mut vars = Vec::new();
        let mut act = store.tt();
        for name in coalition {
            if !self.agents.contains(name) {
                return Err(ModelError::new(None, format!("unknown agent `{name}`")).into());
            }
        }
        for (i, agent) in self.agents.iter().enumerate() {
            if coalition.contains(agent) {
                vars.extend(&self.actions[i]);
                act = store.and(act, self.action_valid[i])?;
            }
        }
        Ok((vars, act))
    }

    /// Action bits of the agents outside the coalition.
    pub fn opponent_action_vars(&self, coalition: &Coalition) -> Vec<VarId> {
        self.agents
            .iter()
            .zip(&self.actions)
            .filter(|(a, _)| !coalition.contains(*a))
            .flat_map(|(_, v)| v.iter().copied())
            .collect()
    }

    /// Sorted ids of the valid states in `set`.
    pub fn decode_states(&self, store: &mut BddStore, set: Bdd) -> BddResult<Vec<usize>> {
        let restricted = store.and(set, self.valid)?;
        Ok(store
            .decode_values(restricted, &self.q)?
            .into_iter()
            .map(|v| v as usize)
            .collect())
    }

    /// The set containing exactly the given state ids.
    pub fn encode_states(
        &self,
        store: &mut BddStore,
        ids: impl IntoIterator<Item = usize>,
    ) -> BddResult<Bdd> {
        let mut parts = Vec::new();
        for id in ids {
            parts.push(store.encode_value(&self.q, id as u64)?);
        }
        store.or_all(parts)
    }
}
