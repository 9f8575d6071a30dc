use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::cgs::{Cgs, Coalition};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::limits::Deadline;
use crate::ltlf2dfa::{translate, Dfa};

/// Labellings of fresh atoms for the explicit engines: atom ↦ states.
pub type ExplicitLabels = BTreeMap<String, BTreeSet<usize>>;

/// Letter of every CGS state over the automaton alphabet `atoms`.
pub(crate) fn state_letters(g: &Cgs, atoms: &[String], extra: &ExplicitLabels) -> Result<Vec<u32>> {
    let mut out = vec![0u32; g.state_count()];
    for (i, a) in atoms.iter().enumerate() {
        let holds: Box<dyn Fn(usize) -> bool> = if let Some(set) = extra.get(a) {
            Box::new(move |q| set.contains(&q))
        } else if g.atom_index(a).is_some() {
            Box::new(move |q| g.holds(q, a))
        } else {
            return Err(Error::Invalid(format!(
                "atom `{a}` has no labelling in the model"
            )));
        };
        for (q, l) in out.iter_mut().enumerate() {
            if holds(q) {
                *l |= 1 << i;
            }
        }
    }
    Ok(out)
}

/// For each state, the distinct successor sets of every coalition choice.
pub(crate) fn coalition_moves(g: &Cgs, coalition: &Coalition) -> Result<Vec<Vec<Vec<usize>>>> {
    let members = g.coalition_indices(coalition)?;
    let mut out = Vec::with_capacity(g.state_count());
    for q in 0..g.state_count() {
        let mut by_choice: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
        for j in 0..g.joint_count() {
            let choice = g.decode_joint(j);
            let key: Vec<usize> = members.iter().map(|&a| choice[a]).collect();
            by_choice.entry(key).or_default().insert(g.successor(q, j));
        }
        out.push(
            by_choice
                .into_values()
                .map(|s| s.into_iter().collect())
                .collect(),
        );
    }
    Ok(out)
}

/// Explicit product of `g` with `dfa` from the entries of `sources`.
struct Product {
    nodes: Vec<(usize, usize)>,
    /// Per node, per coalition choice, successor node ids.
    succ: Vec<Vec<Vec<usize>>>,
    entry: Vec<(usize, usize)>,
}

fn explore(
    g: &Cgs,
    dfa: &Dfa,
    letters: &[u32],
    moves: &[Vec<Vec<usize>>],
    sources: &[usize],
    limit: usize,
    deadline: &Deadline,
) -> Result<Product> {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut intern = |n: (usize, usize), nodes: &mut Vec<(usize, usize)>| -> Result<usize> {
        if let Some(&id) = ids.get(&n) {
            return Ok(id);
        }
        if nodes.len() >= limit {
            return Err(Error::Limit(format!(
                "explicit product exceeds {limit} states"
            )));
        }
        ids.insert(n, nodes.len());
        nodes.push(n);
        Ok(nodes.len() - 1)
    };
    let mut entry = Vec::new();
    for &q in sources {
        let id = intern((q, dfa.step(dfa.initial, letters[q])), &mut nodes)?;
        entry.push((q, id));
    }
    let mut succ = Vec::new();
    let mut next = 0;
    while next < nodes.len() {
        if next % 4096 == 0 {
            deadline.check()?;
        }
        let (q, s) = nodes[next];
        next += 1;
        let mut per_choice = Vec::with_capacity(moves[q].len());
        for targets in &moves[q] {
            let mut ts = Vec::with_capacity(targets.len());
            for &t in targets {
                ts.push(intern((t, dfa.step(s, letters[t])), &mut nodes)?);
            }
            ts.sort_unstable();
            ts.dedup();
            per_choice.push(ts);
        }
        succ.push(per_choice);
    }
    debug_assert_eq!(g.state_count(), moves.len());
    Ok(Product { nodes, succ, entry })
}

/// Explicit-state counterpart of [`super::game_solving`]: enumerates the
/// product graph and removes unsafe nodes until stable. `sources` defaults
/// to the reachable states; `limit` caps the number of product nodes.
pub fn explicit_game_solving(
    g: &Cgs,
    coalition: &Coalition,
    psi: &Formula,
    extra: &ExplicitLabels,
    sources: Option<&[usize]>,
    limit: usize,
    deadline: &Deadline,
) -> Result<BTreeSet<usize>> {
    let dfa = translate(psi)?;
    let letters = state_letters(g, &dfa.atoms, extra)?;
    let moves = coalition_moves(g, coalition)?;
    let reachable;
    let sources = match sources {
        Some(s) => s,
        None => {
            reachable = g.reachable_states();
            &reachable
        }
    };
    let p = explore(g, &dfa, &letters, &moves, sources, limit, deadline)?;
    let n = p.nodes.len();

    // Counter-based removal: a node dies once every choice has a dead
    // successor.
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (u, choices) in p.succ.iter().enumerate() {
        for (c, ts) in choices.iter().enumerate() {
            for &t in ts {
                preds[t].push((u, c));
            }
        }
    }
    let mut dead_succ: Vec<Vec<usize>> = p.succ.iter().map(|cs| vec![0; cs.len()]).collect();
    let mut ok_choices: Vec<usize> = p.succ.iter().map(|cs| cs.len()).collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = Vec::new();
    for (v, &(q, s)) in p.nodes.iter().enumerate() {
        if g.finals.contains(&q) && !dfa.finals[s] {
            alive[v] = false;
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        for &(u, c) in &preds[v] {
            dead_succ[u][c] += 1;
            if dead_succ[u][c] == 1 {
                ok_choices[u] -= 1;
                if ok_choices[u] == 0 && alive[u] {
                    alive[u] = false;
                    stack.push(u);
                }
            }
        }
    }
    Ok(p.entry
        .iter()
        .filter(|(_, id)| alive[*id])
        .map(|(q, _)| *q)
        .collect())
}
