use super::Dfa;
use crate::bdd::{bits_for, Bdd, BddStore, VarId};
use crate::cgs::SymbolicCgs;
use crate::error::{Error, Result};

/// A DFA encoded over state bits `s`/`s'`, reading CGS states `q'`.
#[derive(Debug, Clone)]
pub struct SymbolicDfa {
    pub s: Vec<VarId>,
    pub s_next: Vec<VarId>,
    /// `Δ(s, q', s')`.
    pub delta: Bdd,
    pub initial: Bdd,
    pub finals: Bdd,
    pub valid: Bdd,
    pub state_count: usize,
}

/// Adds a fresh pair of automaton blocks of `width` bits (plus any extra
/// unpaired blocks) just above the action variables.
pub(crate) fn add_automaton_blocks(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    width: usize,
    extra: &[(&str, usize)],
) -> Result<(String, Vec<VarId>, Vec<VarId>)> {
    let mut k = 0;
    let base = loop {
        let name = format!("aut{k}");
        if store.block(&name).is_none() {
            break name;
        }
        k += 1;
    };
    let next = format!("{base}'");
    let extra_names: Vec<String> = extra.iter().map(|(n, _)| format!("{base}_{n}")).collect();
    let mut blocks: Vec<(&str, usize)> = vec![(base.as_str(), width), (next.as_str(), width)];
    for (name, (_, w)) in extra_names.iter().zip(extra) {
        blocks.push((name.as_str(), *w));
    }
    let anchor = sg.first_action_var(store);
    store.insert_blocks(&blocks, anchor)?;
    let s = store.block_vars(&base)?;
    let s_next = store.block_vars(&next)?;
    Ok((base, s, s_next))
}

/// For every letter over `atoms` realised by some valid CGS state, the set
/// of such states (over `q`). Unrealised letters are `None`.
pub(crate) fn letter_sets(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    atoms: &[String],
) -> Result<Vec<Option<Bdd>>> {
    let mut lambda = Vec::with_capacity(atoms.len());
    for a in atoms {
        let l = sg
            .label(a)
            .ok_or_else(|| Error::Invalid(format!("atom `{a}` has no labelling in the model")))?;
        lambda.push(l);
    }
    let mut out = vec![None; 1 << atoms.len()];
    let mut stack = vec![(0usize, 0u32, sg.valid)];
    while let Some((i, letter, set)) = stack.pop() {
        if set.is_false() {
            continue;
        }
        if i == atoms.len() {
            out[letter as usize] = Some(set);
            continue;
        }
        let pos = store.and(set, lambda[i])?;
        let neg = store.diff(set, lambda[i])?;
        stack.push((i + 1, letter | 1 << i, pos));
        stack.push((i + 1, letter, neg));
    }
    Ok(out)
}

/// Encodes `d` with letters replaced by the CGS states carrying them and
/// read on the successor state `q'`. Atoms are resolved through `λ′`,
/// including fresh atoms registered with [`SymbolicCgs::label_fresh`].
pub fn encode_dfa(d: &Dfa, sg: &SymbolicCgs, store: &mut BddStore) -> Result<SymbolicDfa> {
    let width = bits_for(d.state_count()).max(1);
    let (_, s, s_next) = add_automaton_blocks(store, sg, width, &[])?;
    let letters = letter_sets(store, sg, &d.atoms)?;
    let mut terms = Vec::new();
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
    }
    let over_q = store.or_all(terms)?;
    let delta = store.rename(over_q, &sg.q, &sg.q_next)?;
    let initial = store.encode_value(&s, d.initial as u64)?;
    let mut finals = Vec::new();
    for (i, &f) in d.finals.iter().enumerate() {
        if f {
            finals.push(store.encode_value(&s, i as u64)?);
        }
    }
    let finals = store.or_all(finals)?;
    let valid = store.less_than(&s, d.state_count() as u64)?;
    Ok(SymbolicDfa {
        s,
        s_next,
        delta,
        initial,
        finals,
        valid,
        state_count: d.state_count(),
    })
}
