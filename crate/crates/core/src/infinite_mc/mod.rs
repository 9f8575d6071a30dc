//! Infinite-trace strategic core: `⟨⟨A⟩⟩ψ` for LTL `ψ` as a min-even
//! parity game between the coalition and the remaining agents.

mod explicit;
mod progress;
mod zielonka;

pub use explicit::{
    explicit_parity_game, explicit_parity_solving, parse_pgsolver, parse_pgsolver_ids, random_game,
    ExplicitGame, ExplicitProductGame, Player,
};
pub use progress::{solve_progress_measure, UniversalTree};
pub use zielonka::{attractor, zielonka};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bdd::{bits_for, Bdd, BddStore, VarId};
use crate::cgs::{Coalition, SymbolicCgs};
use crate::dpa::{
    builtin_translate, encode_dpa, race_translate, Dpa, SymbolicDpa, ToolSpec, Translation,
};
use crate::error::{Error, Result};
use crate::finite_mc::SolveStats;
use crate::formula::Formula;
use crate::limits::Deadline;

/// Largest game handed to the explicit Zielonka solver.
pub const EXPLICIT_GAME_CAP: usize = 1 << 20;

/// A symbolic min-even parity game.
///
/// Vertices are encodings over `vars`; edges relate `vars` to `vars_next`.
/// `e01` holds the edges leaving player-0 vertices, `e10` those leaving
/// player-1 vertices.
#[derive(Debug, Clone)]
pub struct ParityGame {
    pub vars: Vec<VarId>,
    pub vars_next: Vec<VarId>,
    pub v0: Bdd,
    pub v1: Bdd,
    pub e01: Bdd,
    pub e10: Bdd,
    /// `priorities[p]`: vertices of priority `p`.
    pub priorities: Vec<Bdd>,
    /// Player-0 vertices where plays from source states start.
    pub entry: Bdd,
}

impl ParityGame {
    pub fn priority_count(&self) -> usize {
        self.priorities.len()
    }

    pub fn vertices(&self, store: &mut BddStore) -> Result<Bdd> {
        Ok(store.or(self.v0, self.v1)?)
    }

    pub fn edges(&self, store: &mut BddStore) -> Result<Bdd> {
        Ok(store.or(self.e01, self.e10)?)
    }

    pub fn vertex_count(&self, store: &mut BddStore) -> Result<u128> {
        let v = self.vertices(store)?;
        Ok(store.sat_count(v, &self.vars)?)
    }

    /// Enumerates the game. Vertex `i` of the result has encoding
    /// `codes[i]` (bits of `vars`, least significant first); codes are
    /// sorted.
    pub fn to_explicit(
        &self,
        store: &mut BddStore,
        cap: usize,
    ) -> Result<(ExplicitGame, Vec<u64>)> {
        if self.vars.len() > 64 {
            return Err(Error::Limit("game encoding wider than 64 bits".into()));
        }
        let all = self.vertices(store)?;
        let count = store.sat_count(all, &self.vars)?;
        if count > cap as u128 {
            return Err(Error::Limit(format!(
                "game has {count} vertices, explicit cap is {cap}"
            )));
        }
        let codes = store.decode_values(all, &self.vars)?;
        let index = |c: u64| codes.binary_search(&c).ok();
        let odd: Vec<u64> = store.decode_values(self.v1, &self.vars)?;
        let mut priority = vec![0u32; codes.len()];
        for (p, &set) in self.priorities.iter().enumerate() {
            for c in store.decode_values(set, &self.vars)? {
                if let Some(i) = index(c) {
                    priority[i] = p as u32;
                }
            }
        }
        let mut owner = vec![Player::Even; codes.len()];
        for c in odd {
            if let Some(i) = index(c) {
                owner[i] = Player::Odd;
            }
        }
        let edges = self.edges(store)?;
        let mut succ = Vec::with_capacity(codes.len());
        let mut assignment: Vec<(VarId, bool)> = Vec::with_capacity(self.vars.len());
        for &c in &codes {
            assignment.clear();
            assignment.extend(
                self.vars
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v, c >> i & 1 == 1)),
            );
            let out = store.restrict(edges, &assignment)?;
            let mut ws = Vec::new();
            for t in store.decode_values(out, &self.vars_next)? {
                let w = index(t).ok_or_else(|| {
                    Error::Invalid(format!("edge from {c} leaves the vertex set"))
                })?;
                ws.push(w);
            }
            succ.push(ws);
        }
        Ok((ExplicitGame::new(owner, priority, succ)?, codes))
    }

    /// Encodes an explicit game in a fresh store with blocks `v`/`v'`;
    /// vertex `i` gets code `i`.
    pub fn from_explicit(g: &ExplicitGame) -> Result<(BddStore, ParityGame)> {
        let width = bits_for(g.len()).max(1);
        let mut store = BddStore::new(&[("v", width), ("v'", width)])?;
        let vars = store.block_vars("v")?;
        let vars_next = store.block_vars("v'")?;
        let mut code = Vec::with_capacity(g.len());
        let mut code_next = Vec::with_capacity(g.len());
        for i in 0..g.len() {
            code.push(store.encode_value(&vars, i as u64)?);
            code_next.push(store.encode_value(&vars_next, i as u64)?);
        }
        let mut v = [Vec::new(), Vec::new()];
        let mut e = [Vec::new(), Vec::new()];
        let mut priorities = vec![Vec::new(); g.priority_count() as usize];
        for i in 0..g.len() {
            let side = usize::from(g.owner[i] == Player::Odd);
            v[side].push(code[i]);
            priorities[g.priority[i] as usize].push(code[i]);
            let targets = store.or_all(g.succ[i].iter().map(|&w| code_next[w]))?;
            e[side].push(store.and(code[i], targets)?);
        }
        let [v0, v1] = v.map(|parts| store.or_all(parts));
        let [e01, e10] = e.map(|parts| store.or_all(parts));
        let mut prio_sets = Vec::with_capacity(priorities.len());
        for parts in priorities {
            prio_sets.push(store.or_all(parts)?);
        }
        let game = ParityGame {
            vars,
            vars_next,
            v0: v0?,
            v1: v1?,
            e01: e01?,
            e10: e10?,
            priorities: prio_sets,
            entry: store.ff(),
        };
        Ok((store, game))
    }
}

/// Winning regions of a solved game, over the game's `vars`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WinningRegions {
    pub w0: Bdd,
    pub w1: Bdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Zielonka,
    #[default]
    ProgressMeasure,
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zielonka" => Ok(SolverKind::Zielonka),
            "progress-measure" | "pm" => Ok(SolverKind::ProgressMeasure),
            _ => Err(format!("unknown solver `{s}` (zielonka, progress-measure)")),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Zielonka => "zielonka",
            SolverKind::ProgressMeasure => "progress-measure",
        })
    }
}

/// Fresh, uniquely named blocks for the layer bit and the primed coalition
/// actions, placed above the action variables.
fn add_game_blocks(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    actions: usize,
) -> Result<(VarId, VarId, Vec<VarId>)> {
    let mut k = 0;
    let base = loop {
        let name = format!("game{k}_l");
        if store.block(&name).is_none() {
            break format!("game{k}");
        }
        k += 1;
    };
    let (l, l_next, a_next) = (
        format!("{base}_l"),
        format!("{base}_l'"),
        format!("{base}_a'"),
    );
    let anchor = sg.first_action_var(store);
    store.insert_blocks(&[(&l, 1), (&l_next, 1), (&a_next, actions)], anchor)?;
    Ok((
        store.block_vars(&l)?[0],
        store.block_vars(&l_next)?[0],
        store.block_vars(&a_next)?,
    ))
}

/// The game of a CGS and an encoded DPA for `coalition`, restricted to the
/// product states reachable from the entries of `sources` (over `q`).
///
/// Player-0 vertices are `(q, s)` with the coalition action bits cleared
/// and the layer bit off; player-1 vertices are `(q, s, a_A)` with the
/// layer bit on. A player-1 move reads the label of the successor state.
pub fn build_parity_game(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    sp: &SymbolicDpa,
    coalition: &Coalition,
    sources: Bdd,
    deadline: &Deadline,
) -> Result<ParityGame> {
    let (a, available) = sg.coalition_actions(store, coalition)?;
    let (l, l_next, a_next) = add_game_blocks(store, sg, a.len())?;
    let opponents = sg.opponent_action_vars(coalition);
    let moves = store.exists(&opponents, sg.delta)?;
    let step = store.and(moves, sp.delta)?;

    let on_q = store.rename(sp.delta, &sg.q_next, &sg.q)?;
    let first = store.and_exists(&sp.s, sp.initial, on_q)?;
    let first = store.rename(first, &sp.s_next, &sp.s)?;
    let src = store.and(sources, sg.valid)?;
    let entry = store.and(first, src)?;

    let mut cur = sg.q.clone();
    cur.extend(&sp.s);
    cur.extend(&a);
    let mut reach = entry;
    let mut frontier = entry;
    while !frontier.is_false() {
        deadline.check()?;
        let img = store.and_exists(&cur, frontier, step)?;
        let img = store.rename(img, &sg.q_next, &sg.q)?;
        let img = store.rename(img, &sp.s_next, &sp.s)?;
        frontier = store.diff(img, reach)?;
        reach = store.or(reach, frontier)?;
    }

    let zero_a = store.encode_value(&a, 0)?;
    let zero_a_next = store.encode_value(&a_next, 0)?;
    let layer0 = store.nvar(l)?;
    let layer1 = store.var(l)?;
    let layer0_next = store.nvar(l_next)?;
    let layer1_next = store.var(l_next)?;
    let plain = store.and(zero_a, layer0)?;
    let v0 = store.and(reach, plain)?;
    let chosen = store.and(available, layer1)?;
    let v1 = store.and(reach, chosen)?;

    let same_q = store.equal_vectors(&sg.q, &sg.q_next)?;
    let same_s = store.equal_vectors(&sp.s, &sp.s_next)?;
    let available_next = store.rename(available, &a, &a_next)?;
    let e01 = store.and_all([v0, same_q, same_s, layer1_next, available_next])?;
    let e10 = store.and_all([v1, step, layer0_next, zero_a_next])?;

    let vertices = store.or(v0, v1)?;
    let mut priorities = Vec::with_capacity(sp.priority_count());
    for &set in &sp.priority_sets {
        priorities.push(store.and(vertices, set)?);
    }
    let entry = store.and(entry, plain)?;

    let mut vars = sg.q.clone();
    vars.extend(&sp.s);
    vars.extend(&a);
    vars.push(l);
    let mut vars_next = sg.q_next.clone();
    vars_next.extend(&sp.s_next);
    vars_next.extend(&a_next);
    vars_next.push(l_next);
    Ok(ParityGame {
        vars,
        vars_next,
        v0,
        v1,
        e01,
        e10,
        priorities,
        entry,
    })
}

/// Zielonka's algorithm on the enumerated game, mapped back to BDDs.
pub fn solve_zielonka(
    store: &mut BddStore,
    game: &ParityGame,
    cap: usize,
) -> Result<WinningRegions> {
    let (g, codes) = game.to_explicit(store, cap)?;
    let winners = zielonka(&g);
    let mut w0 = Vec::new();
    for (i, &c) in codes.iter().enumerate() {
        if winners[i] == Player::Even {
            w0.push(store.encode_value(&game.vars, c)?);
        }
    }
    let w0 = store.or_all(w0)?;
    let all = game.vertices(store)?;
    let w1 = store.diff(all, w0)?;
    Ok(WinningRegions { w0, w1 })
}

pub fn solve(
    store: &mut BddStore,
    game: &ParityGame,
    solver: SolverKind,
    deadline: &Deadline,
) -> Result<WinningRegions> {
    match solver {
        SolverKind::Zielonka => solve_zielonka(store, game, EXPLICIT_GAME_CAP),
        SolverKind::ProgressMeasure => solve_progress_measure(store, game, deadline),
    }
}

/// Winner of every vertex of an enumerated game.
pub fn solve_explicit(
    g: &ExplicitGame,
    solver: SolverKind,
    deadline: &Deadline,
) -> Result<Vec<Player>> {
    match solver {
        SolverKind::Zielonka => Ok(zielonka(g)),
        SolverKind::ProgressMeasure => {
            let (mut store, game) = ParityGame::from_explicit(g)?;
            let w = solve_progress_measure(&mut store, &game, deadline)?;
            let w0: std::collections::HashSet<u64> =
                store.decode_values(w.w0, &game.vars)?.into_iter().collect();
            Ok((0..g.len())
                .map(|v| {
                    if w0.contains(&(v as u64)) {
                        Player::Even
                    } else {
                        Player::Odd
                    }
                })
                .collect())
        }
    }
}

/// CGS states (over `q`) whose entry vertex player 0 wins.
pub fn winning_states(
    store: &mut BddStore,
    game: &ParityGame,
    w: &WinningRegions,
    sg: &SymbolicCgs,
) -> Result<Bdd> {
    let others: Vec<VarId> = game
        .vars
        .iter()
        .copied()
        .filter(|v| !sg.q.contains(v))
        .collect();
    let won = store.and(game.entry, w.w0)?;
    Ok(store.exists(&others, won)?)
}

/// The translation step: the tool race when tools are configured, the
/// built-in fragment otherwise or when every tool fails.
pub fn translate_ltl(
    psi: &Formula,
    tools: &[ToolSpec],
    deadline: &Deadline,
) -> Result<Translation> {
    if tools.is_empty() {
        return Ok(builtin_translate(psi)?);
    }
    let timeout = deadline.remaining().unwrap_or(Duration::from_secs(3600));
    match race_translate(psi, tools, timeout) {
        Ok(t) => Ok(t),
        // Every tool failed: the built-in fragment may still cover `psi`.
        Err(e) => builtin_translate(psi).map_err(|_| e.into()),
    }
}

/// States among `sources` (default: reachable ones) from which `coalition`
/// can enforce the language of `dpa` on every infinite outcome.
pub fn infinite_game_solving(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    coalition: &Coalition,
    dpa: &Dpa,
    solver: SolverKind,
    sources: Option<Bdd>,
    deadline: &Deadline,
) -> Result<(Bdd, SolveStats)> {
    let t0 = Instant::now();
    let sp = encode_dpa(dpa, sg, store)?;
    let sources = match sources {
        Some(s) => s,
        None => sg.reachable(store)?,
    };
    let game = build_parity_game(store, sg, &sp, coalition, sources, deadline)?;
    let t1 = Instant::now();
    let w = solve(store, &game, solver, deadline)?;
    let win = winning_states(store, &game, &w, sg)?;
    let stats = SolveStats {
        automaton_states: dpa.state_count(),
        iterations: 0,
        translate: Duration::ZERO,
        build: t1 - t0,
        solve: t1.elapsed(),
    };
    Ok((win, stats))
}
