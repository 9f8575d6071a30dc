use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;

use super::zielonka::zielonka;
use crate::cgs::{Cgs, Coalition};
use crate::dpa::{normalize_acceptance, Dpa};
use crate::error::{Error, Result};
use crate::finite_mc::explicit::state_letters;
use crate::finite_mc::ExplicitLabels;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    /// Player 0, the coalition.
    Even,
    /// Player 1, the environment.
    Odd,
}

impl Player {
    pub fn of_priority(p: u32) -> Player {
        if p.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }
}

/// An enumerated min-even parity game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
}

impl ExplicitGame {
    /// Checks that the three vectors agree, successors are in range and
    /// every vertex can move.
    pub fn new(
        owner: Vec<Player>,
        priority: Vec<u32>,
        succ: Vec<Vec<usize>>,
    ) -> Result<ExplicitGame> {
        let n = owner.len();
        if priority.len() != n || succ.len() != n {
            return Err(Error::Invalid(
                "owner, priority and successor lists differ in length".into(),
            ));
        }
        for (v, ws) in succ.iter().enumerate() {
            if ws.is_empty() {
                return Err(Error::Invalid(format!("vertex {v} has no successor")));
            }
            if let Some(w) = ws.iter().find(|&&w| w >= n) {
                return Err(Error::Invalid(format!(
                    "vertex {v} has successor {w} out of range"
                )));
            }
        }
        Ok(ExplicitGame {
            owner,
            priority,
            succ,
        })
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn priority_count(&self) -> u32 {
        self.priority.iter().max().map_or(0, |p| p + 1)
    }

    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, ws) in self.succ.iter().enumerate() {
            for &w in ws {
                pred[w].push(v);
            }
        }
        pred
    }

    /// PGSolver text. PGSolver reads max-parity, so priorities are written
    /// as `K - p` with `K` even.
    pub fn to_pgsolver(&self) -> String {
        let max = self.priority.iter().copied().max().unwrap_or(0);
        let k = max + max % 2;
        let mut out = String::new();
        let _ = writeln!(out, "parity {};", self.len().saturating_sub(1));
        for v in 0..self.len() {
            let owner = match self.owner[v] {
                Player::Even => 0,
                Player::Odd => 1,
            };
            let succ: Vec<String> = self.succ[v].iter().map(|w| w.to_string()).collect();
            let _ = writeln!(
                out,
                "{v} {} {owner} {};",
                k - self.priority[v],
                succ.join(",")
            );
        }
        out
    }
}

/// Reads a game in PGSolver format (max-parity) into min-even form.
pub fn parse_pgsolver(text: &str) -> Result<ExplicitGame> {
    parse_pgsolver_ids(text).map(|(g, _)| g)
}

/// Like `parse_pgsolver`, also returning the file's vertex id of each
/// vertex.
pub fn parse_pgsolver_ids(text: &str) -> Result<(ExplicitGame, Vec<usize>)> {
    let err = |line: usize, msg: &str| Error::Invalid(format!("pgsolver line {line}: {msg}"));
    let mut rows: Vec<(usize, u64, Player, Vec<usize>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with("parity") || body.starts_with("start") {
            continue;
        }
        let body = body.strip_suffix(';').unwrap_or(body);
        // A trailing quoted name is optional.
        let body = match body.find('"') {
            Some(q) => &body[..q],
            None => body,
        };
        let mut fields = body.split_whitespace();
        let mut next = |what: &str| {
            fields
                .next()
                .ok_or_else(|| err(line, &format!("missing {what}")))
        };
        let id: usize = next("vertex id")?
            .parse()
            .map_err(|_| err(line, "bad vertex id"))?;
        let prio: u64 = next("priority")?
            .parse()
            .map_err(|_| err(line, "bad priority"))?;
        let owner = match next("owner")? {
            "0" => Player::Even,
            "1" => Player::Odd,
            o => return Err(err(line, &format!("bad owner `{o}`"))),
        };
        let mut succ = Vec::new();
        for s in next("successors")?.split(',').filter(|s| !s.is_empty()) {
            succ.push(s.trim().parse().map_err(|_| err(line, "bad successor"))?);
        }
        rows.push((id, prio, owner, succ));
    }
    let mut index = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        if index.insert(row.0, i).is_some() {
            return Err(Error::Invalid(format!(
                "pgsolver: vertex {} declared twice",
                row.0
            )));
        }
    }
    let max = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let k = max + max % 2;
    let mut owner = Vec::with_capacity(rows.len());
    let mut priority = Vec::with_capacity(rows.len());
    let mut succ = Vec::with_capacity(rows.len());
    let ids: Vec<usize> = rows.iter().map(|r| r.0).collect();
    for (id, prio, o, ws) in rows {
        let p = u32::try_from(k - prio)
            .map_err(|_| Error::Invalid(format!("pgsolver: priority of {id} too large")))?;
        owner.push(o);
        priority.push(p);
        let mut mapped = Vec::with_capacity(ws.len());
        for w in ws {
            mapped.push(
                *index.get(&w).ok_or_else(|| {
                    Error::Invalid(format!("pgsolver: {id} -> unknown vertex {w}"))
                })?,
            );
        }
        succ.push(mapped);
    }
    Ok((ExplicitGame::new(owner, priority, succ)?, ids))
}

/// A game with `n` vertices, priorities below `k` and between 1 and
/// `max_out` distinct successors per vertex.
pub fn random_game(rng: &mut impl Rng, n: usize, k: u32, max_out: usize) -> ExplicitGame {
    let n = n.max(1);
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    for _ in 0..n {
        owner.push(if rng.gen_bool(0.5) {
            Player::Even
        } else {
            Player::Odd
        });
        priority.push(rng.gen_range(0..k.max(1)));
        let out = rng.gen_range(1..=max_out.clamp(1, n));
        let mut ws = sample(rng, n, out).into_vec();
        ws.sort_unstable();
        succ.push(ws);
    }
    ExplicitGame {
        owner,
        priority,
        succ,
    }
}

/// Game of a CGS and a DPA built vertex by vertex, without BDDs.
#[derive(Debug, Clone)]
pub struct ExplicitProductGame {
    pub game: ExplicitGame,
    /// `(q, s)` for player-0 vertices, `(q, s, choice)` for player-1 ones.
    pub vertices: Vec<(usize, usize, Option<Vec<usize>>)>,
    /// `(q, vertex)` for every source state.
    pub entry: Vec<(usize, usize)>,
}

/// Builds the product game by search from the entries of `sources`
/// (default: reachable states). `limit` caps the number of vertices.
pub fn explicit_parity_game(
    g: &Cgs,
    coalition: &Coalition,
    dpa: &Dpa,
    extra: &ExplicitLabels,
    sources: Option<&[usize]>,
    limit: usize,
) -> Result<ExplicitProductGame> {
    let dpa = normalize_acceptance(dpa);
    let letters = state_letters(g, &dpa.atoms, extra)?;
    let mut members = g.coalition_indices(coalition)?;
    members.sort_unstable();
    let choices: Vec<Vec<usize>> = {
        let mut all = vec![Vec::new()];
        for &m in &members {
            let mut ext = Vec::new();
            for c in &all {
                for a in 0..g.actions[m].len() {
                    let mut c = c.clone();
                    c.push(a);
                    ext.push(c);
                }
            }
            all = ext;
        }
        all
    };
    let mut by_choice: Vec<Vec<Vec<usize>>> = Vec::with_capacity(g.state_count());
    for q in 0..g.state_count() {
        let mut per = vec![BTreeSet::new(); choices.len()];
        for j in 0..g.joint_count() {
            let joint = g.decode_joint(j);
            let key: Vec<usize> = members.iter().map(|&m| joint[m]).collect();
            let c = choices
                .iter()
                .position(|c| *c == key)
                .expect("choice enumerated");
            per[c].insert(g.successor(q, j));
        }
        by_choice.push(per.into_iter().map(|s| s.into_iter().collect()).collect());
    }

    let reachable;
    let sources = match sources {
        Some(s) => s,
        None => {
            reachable = g.reachable_states();
            &reachable
        }
    };
    let mut ids: HashMap<(usize, usize, Option<usize>), usize> = HashMap::new();
    let mut vertices: Vec<(usize, usize, Option<usize>)> = Vec::new();
    let mut intern = |key: (usize, usize, Option<usize>), vertices: &mut Vec<_>| -> Result<usize> {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if vertices.len() >= limit {
            return Err(Error::Limit(format!(
                "explicit parity game exceeds {limit} vertices"
            )));
        }
        ids.insert(key, vertices.len());
        vertices.push(key);
        Ok(vertices.len() - 1)
    };
    let mut entry = Vec::new();
    for &q in sources {
        let v = intern((q, dpa.step(dpa.initial, letters[q]), None), &mut vertices)?;
        entry.push((q, v));
    }
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    while next < vertices.len() {
        let (q, s, c) = vertices[next];
        next += 1;
        let mut out = Vec::new();
        match c {
            None => {
                for c in 0..choices.len() {
                    out.push(intern((q, s, Some(c)), &mut vertices)?);
                }
            }
            Some(c) => {
                for &t in &by_choice[q][c] {
                    out.push(intern((t, dpa.step(s, letters[t]), None), &mut vertices)?);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        succ.push(out);
    }
    let owner = vertices
        .iter()
        .map(|v| {
            if v.2.is_none() {
                Player::Even
            } else {
                Player::Odd
            }
        })
        .collect();
    let priority = vertices.iter().map(|v| dpa.priority[v.1]).collect();
    let game = ExplicitGame::new(owner, priority, succ)?;
    let vertices = vertices
        .into_iter()
        .map(|(q, s, c)| (q, s, c.map(|c| choices[c].clone())))
        .collect();
    Ok(ExplicitProductGame {
        game,
        vertices,
        entry,
    })
}

/// Explicit counterpart of the symbolic parity pipeline: builds the game
/// vertex by vertex and solves it with Zielonka's algorithm.
pub fn explicit_parity_solving(
    g: &Cgs,
    coalition: &Coalition,
    dpa: &Dpa,
    extra: &ExplicitLabels,
    sources: Option<&[usize]>,
    limit: usize,
) -> Result<BTreeSet<usize>> {
    let p = explicit_parity_game(g, coalition, dpa, extra, sources, limit)?;
    let winners = zielonka(&p.game);
    Ok(p.entry
        .iter()
        .filter(|(_, v)| winners[*v] == Player::Even)
        .map(|(q, _)| *q)
        .collect())
}
