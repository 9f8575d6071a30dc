use super::{normalize_acceptance, Dpa};
use crate::bdd::{bits_for, Bdd, BddStore, VarId};
use crate::cgs::SymbolicCgs;
use crate::error::Result;
use crate::ltlf2dfa::symbolic::{add_automaton_blocks, letter_sets};

/// A min-even DPA encoded over `s`/`s'` with priority bits `c`.
#[derive(Debug, Clone)]
pub struct SymbolicDpa {
    pub s: Vec<VarId>,
    pub s_next: Vec<VarId>,
    pub c: Vec<VarId>,
    /// `Δ(s, q', s')`.
    pub delta: Bdd,
    /// `Ω(s, c)`.
    pub omega: Bdd,
    pub initial: Bdd,
    pub valid: Bdd,
    /// `priority_sets[i]`: states over `s` with priority `i`.
    pub priority_sets: Vec<Bdd>,
    pub state_count: usize,
}

impl SymbolicDpa {
    pub fn priority_count(&self) -> usize {
        self.priority_sets.len()
    }
}

/// Encodes `d` like [`crate::ltlf2dfa::encode_dfa`], reading letters on the
/// successor CGS state. The automaton is normalized first.
pub fn encode_dpa(d: &Dpa, sg: &SymbolicCgs, store: &mut BddStore) -> Result<SymbolicDpa> {
    let d = &normalize_acceptance(d);
    let k = d.priority_count() as usize;
    let width = bits_for(d.state_count()).max(1);
    let (base, s, s_next) = add_automaton_blocks(store, sg, width, &[("c", bits_for(k))])?;
    let c = store.block_vars(&format!("{base}_c"))?;
    let letters = letter_sets(store, sg, &d.atoms)?;
    let mut terms = Vec::new();
    let mut omega_terms = Vec::new();
    let mut priority_sets = vec![store.ff(); k];
    for src in 0..d.state_count() {
        let mut guards: Vec<(usize, Vec<Bdd>)> = Vec::new();
        for (l, set) in letters.iter().enumerate() {
            let Some(set) = set else { continue };
            let t = d.step(src, l as u32);
            match guards.iter_mut().find(|(x, _)| *x == t) {
                Some((_, v)) => v.push(*set),
                None => guards.push((t, vec![*set])),
            }
        }
        let enc_src = store.encode_value(&s, src as u64)?;
        for (t, sets) in guards {
            let guard = store.or_all(sets)?;
            let enc_t = store.encode_value(&s_next, t as u64)?;
            let both = store.and(enc_src, enc_t)?;
            terms.push(store.and(both, guard)?);
        }
        let p = d.priority[src] as usize;
        let enc_p = store.encode_value(&c, p as u64)?;
        omega_terms.push(store.and(enc_src, enc_p)?);
        priority_sets[p] = store.or(priority_sets[p], enc_src)?;
    }
    let over_q = store.or_all(terms)?;
    let delta = store.rename(over_q, &sg.q, &sg.q_next)?;
    let omega = store.or_all(omega_terms)?;
    let initial = store.encode_value(&s, d.initial as u64)?;
    let valid = store.less_than(&s, d.state_count() as u64)?;
    Ok(SymbolicDpa {
        s,
        s_next,
        c,
        delta,
        omega,
        initial,
        valid,
        priority_sets,
        state_count: d.state_count(),
    })
}
