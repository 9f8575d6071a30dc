//! Finite-trace strategic core: `⟨⟨A⟩⟩ψ` for pure LTLf `ψ` as a safety
//! game on the product of the CGS with the DFA of `ψ`.

pub(crate) mod explicit;

pub use explicit::{explicit_game_solving, ExplicitLabels};

use std::time::{Duration, Instant};

use crate::bdd::{Bdd, BddStore, VarId};
use crate::cgs::{Coalition, SymbolicCgs};
use crate::error::Result;
use crate::formula::Formula;
use crate::limits::Deadline;
use crate::ltlf2dfa::{encode_dfa, translate, SymbolicDfa};

/// Timings and sizes of one strategic-core call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub automaton_states: usize,
    pub iterations: usize,
    pub translate: Duration,
    pub build: Duration,
    pub solve: Duration,
}

/// The product of a CGS with an encoded DFA for a coalition.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    pub q: Vec<VarId>,
    pub q_next: Vec<VarId>,
    pub s: Vec<VarId>,
    pub s_next: Vec<VarId>,
    pub coalition_vars: Vec<VarId>,
    /// Valid coalition action encodings.
    pub available: Bdd,
    /// `δ'(q, a_A, q', s, s')`.
    pub delta: Bdd,
    /// `(q, Δ(s0, λ(q)))` for every source state `q`.
    pub entry: Bdd,
    /// Entry of the CGS initial state.
    pub initial: Bdd,
    pub reachable: Bdd,
    pub safe: Bdd,
}

#[derive(Debug, Clone)]
pub struct SafetyResult {
    /// Greatest fixpoint `Y*` over `(q, s)`.
    pub fixpoint: Bdd,
    /// Source states whose entry lies in `Y*`, over `q`.
    pub winning: Bdd,
    pub iterations: usize,
}

/// Builds the product and its safe set, exploring from the entries of the
/// states in `sources` (over `q`).
pub fn build_product(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    sd: &SymbolicDfa,
    coalition: &Coalition,
    sources: Bdd,
    deadline: &Deadline,
) -> Result<ProductSpace> {
    let (coalition_vars, available) = sg.coalition_actions(store, coalition)?;
    let opponents = sg.opponent_action_vars(coalition);
    let delta_a = store.exists(&opponents, sg.delta)?;
    let delta = store.and(delta_a, sd.delta)?;

    // Δ(s0, λ(q)) for every q: read the source state's own label.
    let on_q = store.rename(sd.delta, &sg.q_next, &sg.q)?;
    let first = store.and_exists(&sd.s, sd.initial, on_q)?;
    let first = store.rename(first, &sd.s_next, &sd.s)?;
    let src = store.and(sources, sg.valid)?;
    let entry = store.and(first, src)?;
    let initial = store.and(entry, sg.initial)?;

    let mut cur_vars = sg.q.clone();
    cur_vars.extend(&sd.s);
    cur_vars.extend(&coalition_vars);
    let mut reachable = entry;
    let mut frontier = entry;
    while !frontier.is_false() {
        deadline.check()?;
        let img = store.and_exists(&cur_vars, frontier, delta)?;
        let img = store.rename(img, &sg.q_next, &sg.q)?;
        let img = store.rename(img, &sd.s_next, &sd.s)?;
        frontier = store.diff(img, reachable)?;
        reachable = store.or(reachable, frontier)?;
    }
    let not_final = store.not(sg.finals)?;
    let ok = store.or(not_final, sd.finals)?;
    let safe = store.and(reachable, ok)?;
    Ok(ProductSpace {
        q: sg.q.clone(),
        q_next: sg.q_next.clone(),
        s: sd.s.clone(),
        s_next: sd.s_next.clone(),
        coalition_vars,
        available,
        delta,
        entry,
        initial,
        reachable,
        safe,
    })
}

/// Greatest fixpoint of `Y ↦ Safe ∧ Pre(Y)`, where `Pre(Y)` holds when
/// some available coalition action keeps every successor inside `Y`.
pub fn solve_safety(
    store: &mut BddStore,
    p: &ProductSpace,
    deadline: &Deadline,
) -> Result<SafetyResult> {
    let mut next_vars = p.q_next.clone();
    next_vars.extend(&p.s_next);
    let mut y = p.safe;
    let mut iterations = 0;
    loop {
        deadline.check()?;
        iterations += 1;
        let y_next = store.rename(y, &p.q, &p.q_next)?;
        let y_next = store.rename(y_next, &p.s, &p.s_next)?;
        let outside = store.not(y_next)?;
        let bad = store.and_exists(&next_vars, p.delta, outside)?;
        let good = store.diff(p.available, bad)?;
        let pre = store.exists(&p.coalition_vars, good)?;
        let shrunk = store.and(y, pre)?;
        log::debug!(
            "safety iteration {iterations}: {} nodes",
            store.size(shrunk).unwrap_or(0)
        );
        if shrunk == y {
            break;
        }
        y = shrunk;
    }
    let won = store.and(p.entry, y)?;
    let winning = store.exists(&p.s, won)?;
    Ok(SafetyResult {
        fixpoint: y,
        winning,
        iterations,
    })
}

/// States among `sources` (default: reachable ones) from which `coalition`
/// can enforce the pure LTLf formula `psi` on every finite outcome. Fresh
/// atoms of `psi` must already be labelled in `sg`.
pub fn game_solving(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    coalition: &Coalition,
    psi: &Formula,
    sources: Option<Bdd>,
    deadline: &Deadline,
) -> Result<(Bdd, SolveStats)> {
    let t0 = Instant::now();
    let dfa = translate(psi)?;
    let t1 = Instant::now();
    let sd = encode_dfa(&dfa, sg, store)?;
    let sources = match sources {
        Some(s) => s,
        None => sg.reachable(store)?,
    };
    let product = build_product(store, sg, &sd, coalition, sources, deadline)?;
    let t2 = Instant::now();
    let result = solve_safety(store, &product, deadline)?;
    let stats = SolveStats {
        automaton_states: dfa.state_count(),
        iterations: result.iterations,
        translate: t1 - t0,
        build: t2 - t1,
        solve: t2.elapsed(),
    };
    Ok((result.winning, stats))
}

#[cfg(test)]
mod tests;
