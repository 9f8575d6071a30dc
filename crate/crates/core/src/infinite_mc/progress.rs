//! Set-based progress measures over a succinct universal tree.
//!
//! A measure maps each vertex to a leaf of an ordered tree of height
//! `h = ⌊k/2⌋` (one level per odd priority) or to `⊤`. Leaves are tuples
//! of `h` bit strings of total length at most `⌊log2 n⌋`, ordered with
//! `0… < ε < 1…` at each level; this tree embeds every ordered tree of
//! height `h` with at most `n` leaves.
//!
//! The measure is never stored per vertex. Instead `D[r]` holds the
//! vertices whose measure is at least leaf `r`, and the least fixpoint is
//! reached by sweeping the leaves in order. Each sweep rebuilds `D[r]` from
//! controllable predecessors of lower (and occasionally higher) sets.

use std::collections::HashMap;

use rustc_hash::FxHashMap;

use super::{ParityGame, WinningRegions};
use crate::bdd::{Bdd, BddStore};
use crate::error::{Error, Result};
use crate::limits::Deadline;

/// Largest tree the solver builds.
pub const LEAF_CAP: usize = 1 << 22;

/// Shape of the succinct universal tree, reduced to what lifting needs.
#[derive(Debug, Clone)]
pub struct UniversalTree {
    height: usize,
    leaves: usize,
    /// `sub[j][i]`: index of the level-`j+1` subtree holding leaf `i`.
    sub: Vec<Vec<u32>>,
    /// `starts[j][t]`: first leaf of level-`j+1` subtree `t`.
    starts: Vec<Vec<u32>>,
}

/// Lengths of all bit strings of length at most `b`, in tree order.
fn inorder_lengths(b: usize) -> Vec<usize> {
    let mut out = vec![0];
    for _ in 0..b {
        let deeper: Vec<usize> = out.iter().map(|l| l + 1).collect();
        out = deeper
            .iter()
            .copied()
            .chain([0])
            .chain(deeper.iter().copied())
            .collect();
    }
    out
}

impl UniversalTree {
    /// Budget of string bits for a tree with room for `n` leaves.
    pub fn budget_for(n: usize) -> usize {
        (usize::BITS - 1 - n.max(1).leading_zeros()) as usize
    }

    /// Number of leaves for `n` and `height`, saturating.
    pub fn leaf_count(n: usize, height: usize) -> u128 {
        let budget = Self::budget_for(n);
        // count[b]: leaves below a node at the current level with `b` bits left.
        let mut count = vec![1u128; budget + 1];
        for _ in 0..height {
            let mut next = vec![0u128; budget + 1];
            for (b, slot) in next.iter_mut().enumerate() {
                for l in 0..=b {
                    *slot = slot.saturating_add(count[b - l].saturating_mul(1 << l));
                }
            }
            count = next;
        }
        count[budget]
    }

    pub fn new(n: usize, height: usize, cap: usize) -> Result<UniversalTree> {
        let total = Self::leaf_count(n, height);
        if total > cap as u128 {
            return Err(Error::Limit(format!(
                "universal tree for {n} vertices and height {height} has {total} leaves (cap {cap})"
            )));
        }
        let budget = Self::budget_for(n);
        let lengths: Vec<Vec<usize>> = (0..=budget).map(inorder_lengths).collect();
        let mut tree = UniversalTree {
            height,
            leaves: 0,
            sub: vec![Vec::with_capacity(total as usize); height],
            starts: vec![Vec::new(); height],
        };
        let mut path = vec![0u32; height];
        tree.grow(0, budget, &lengths, &mut path);
        debug_assert_eq!(tree.leaves as u128, total);
        Ok(tree)
    }

    fn grow(&mut self, depth: usize, budget: usize, lengths: &[Vec<usize>], path: &mut [u32]) {
        if depth == self.height {
            for (j, &t) in path.iter().enumerate() {
                self.sub[j].push(t);
            }
            self.leaves += 1;
            return;
        }
        for &len in &lengths[budget] {
            path[depth] = self.starts[depth].len() as u32;
            self.starts[depth].push(self.leaves as u32);
            self.grow(depth + 1, budget - len, lengths, path);
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    /// First leaf of the level-`j` subtree holding leaf `i` (`j ≥ 1`).
    fn first(&self, j: usize, i: usize) -> usize {
        self.starts[j - 1][self.sub[j - 1][i] as usize] as usize
    }

    fn prev_first(&self, j: usize, i: usize) -> Option<usize> {
        let t = self.sub[j - 1][i] as usize;
        t.checked_sub(1).map(|t| self.starts[j - 1][t] as usize)
    }

    fn next_first(&self, j: usize, i: usize) -> Option<usize> {
        let t = self.sub[j - 1][i] as usize;
        self.starts[j - 1].get(t + 1).map(|&s| s as usize)
    }

    fn last_first(&self, j: usize) -> usize {
        *self.starts[j - 1].last().expect("levels are non-empty") as usize
    }
}

/// Which set a vertex of priority `p` must reach for its measure to be at
/// least `i` (with `top = ⊤`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Threshold {
    Always,
    Rank(usize),
    Itself,
}

fn threshold(tree: &UniversalTree, p: usize, i: usize, top: usize) -> Threshold {
    if p % 2 == 1 {
        // Odd priorities move strictly past the current level-j subtree.
        let j = p.div_ceil(2);
        if i == top {
            return Threshold::Rank(tree.last_first(j));
        }
        let f = tree.first(j, i);
        if f == i {
            tree.prev_first(j, i)
                .map_or(Threshold::Always, Threshold::Rank)
        } else {
            Threshold::Rank(f)
        }
    } else {
        // Even priorities reset everything below level j.
        let j = p / 2;
        let t = if i == top || j == 0 {
            top
        } else if tree.first(j, i) == i {
            i
        } else {
            tree.next_first(j, i).unwrap_or(top)
        };
        if t == i {
            Threshold::Itself
        } else {
            Threshold::Rank(t)
        }
    }
}

struct Lifter<'a> {
    game: &'a ParityGame,
    all: Bdd,
    edges: Bdd,
    /// Per non-empty priority: (priority, player-0 part, player-1 part).
    parts: Vec<(usize, Bdd, Bdd)>,
    cpre: FxHashMap<Bdd, (Bdd, Bdd)>,
}

impl Lifter<'_> {
    /// Vertices all of whose successors lie in `y`, and those with some.
    fn cpre(&mut self, store: &mut BddStore, y: Bdd) -> Result<(Bdd, Bdd)> {
        if let Some(&r) = self.cpre.get(&y) {
            return Ok(r);
        }
        let g = self.game;
        let y_next = store.rename(y, &g.vars, &g.vars_next)?;
        let some = store.and_exists(&g.vars_next, self.edges, y_next)?;
        let out = store.diff(self.all, y)?;
        let out_next = store.rename(out, &g.vars, &g.vars_next)?;
        let escape = store.and_exists(&g.vars_next, self.edges, out_next)?;
        let every = store.diff(self.all, escape)?;
        self.cpre.insert(y, (every, some));
        Ok((every, some))
    }

    /// Vertices of the `idx`-th part whose lifted measure reaches `y`.
    fn lift(&mut self, store: &mut BddStore, idx: usize, y: Bdd) -> Result<Bdd> {
        let (_, even, odd) = self.parts[idx];
        let (every, some) = self.cpre(store, y)?;
        let a = store.and(even, every)?;
        let b = store.and(odd, some)?;
        Ok(store.or(a, b)?)
    }
}

/// Solves `game` by lifting set-based progress measures to their least
/// fixpoint. Player 1 wins exactly the vertices with measure `⊤`.
pub fn solve_progress_measure(
    store: &mut BddStore,
    game: &ParityGame,
    deadline: &Deadline,
) -> Result<WinningRegions> {
    let all = game.vertices(store)?;
    let n = usize::try_from(store.sat_count(all, &game.vars)?).unwrap_or(usize::MAX);
    let tree = UniversalTree::new(n, game.priority_count() / 2, LEAF_CAP)?;
    let edges = game.edges(store)?;
    let mut parts = Vec::new();
    for (p, &set) in game.priorities.iter().enumerate() {
        if set.is_false() {
            continue;
        }
        let even = store.and(set, game.v0)?;
        let odd = store.and(set, game.v1)?;
        parts.push((p, even, odd));
    }
    let mut lifter = Lifter {
        game,
        all,
        edges,
        parts,
        cpre: FxHashMap::default(),
    };

    let top = tree.leaves();
    let mut d = vec![store.ff(); top + 1];
    d[0] = all;
    // Rank updates are pure functions of the sets they read.
    let mut memo: HashMap<(Bdd, Vec<Option<Bdd>>), Bdd> = HashMap::new();
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut changed = false;
        for i in 1..=top {
            if i % 1024 == 0 {
                deadline.check()?;
            }
            let ths: Vec<Threshold> = lifter
                .parts
                .iter()
                .map(|&(p, _, _)| threshold(&tree, p, i, top))
                .collect();
            let key_sets: Vec<Option<Bdd>> = ths
                .iter()
                .map(|t| match *t {
                    Threshold::Always => Some(all),
                    Threshold::Rank(r) => Some(d[r]),
                    Threshold::Itself => None,
                })
                .collect();
            let key = (d[i], key_sets);
            let new = match memo.get(&key) {
                Some(&x) => x,
                None => {
                    let mut base = d[i];
                    for (idx, y) in key.1.iter().enumerate() {
                        if let Some(y) = *y {
                            let part = lifter.lift(store, idx, y)?;
                            base = store.or(base, part)?;
                        }
                    }
                    let mut x = base;
                    if key.1.iter().any(Option::is_none) {
                        loop {
                            let mut next = base;
                            for (idx, y) in key.1.iter().enumerate() {
                                if y.is_none() {
                                    let part = lifter.lift(store, idx, x)?;
                                    next = store.or(next, part)?;
                                }
                            }
                            if next == x {
                                break;
                            }
                            x = next;
                        }
                    }
                    memo.insert(key, x);
                    x
                }
            };
            if new != d[i] {
                d[i] = new;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    log::debug!(
        "progress measure: {top} leaves, {sweeps} sweeps, {} predecessor sets",
        lifter.cpre.len()
    );
    let w1 = d[top];
    let w0 = store.diff(all, w1)?;
    Ok(WinningRegions { w0, w1 })
}
