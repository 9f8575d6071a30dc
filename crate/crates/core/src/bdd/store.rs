use std::sync::atomic::{AtomicU32, Ordering};

use rustc_hash::FxHashMap;

use super::{Bdd, BddError, BddResult, VarBlock, VarId};

pub(crate) const FALSE: u32 = 0;
pub(crate) const TRUE: u32 = 1;
pub(crate) const TERMINAL_LEVEL: u32 = u32::MAX;

/// Default memory budget for a store: 4 GiB.
pub const DEFAULT_BUDGET_BYTES: usize = 4 << 30;

// Rough per-entry costs used for budget accounting.
const NODE_BYTES: usize = 12 + 24;
const CACHE_ENTRY_BYTES: usize = 24;

static NEXT_STORE_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    pub var: u32,
    pub low: u32,
    pub high: u32,
}

/// Binary Boolean connectives accepted by [`BddStore::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
    /// `f ∧ ¬g`
    Diff,
}

impl BoolOp {
    fn code(self) -> u8 {
        self as u8
    }

    fn commutative(self) -> bool {
        matches!(self, BoolOp::And | BoolOp::Or | BoolOp::Xor | BoolOp::Iff)
    }

    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Xor => a != b,
            BoolOp::Implies => !a || b,
            BoolOp::Iff => a == b,
            BoolOp::Diff => a && !b,
        }
    }
}

/// Owner of all nodes, variables and operation caches.
pub struct BddStore {
    pub(crate) id: u32,
    pub(crate) nodes: Vec<Node>,
    unique: FxHashMap<(u32, u32, u32), u32>,
    pub(crate) var_names: Vec<String>,
    pub(crate) level_of: Vec<u32>,
    pub(crate) var_at_level: Vec<u32>,
    blocks: Vec<VarBlock>,
    apply_cache: FxHashMap<(u8, u32, u32), u32>,
    not_cache: FxHashMap<u32, u32>,
    ite_cache: FxHashMap<(u32, u32, u32), u32>,
    pub(crate) quant_cache: FxHashMap<(u8, u32, u32), u32>,
    pub(crate) relprod_cache: FxHashMap<(u32, u32, u32), u32>,
    budget: usize,
}

impl std::fmt::Debug for BddStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BddStore")
            .field("id", &self.id)
            .field("vars", &self.var_names.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddStore {
    /// Creates a store from `(name, width)` blocks.
    ///
    /// A block `x'` is paired with `x` and their bits are interleaved at the
    /// position of whichever of the two appears first.
    pub fn new(blocks: &[(&str, usize)]) -> BddResult<Self> {
        let mut store = BddStore {
            id: NEXT_STORE_ID.fetch_add(1, Ordering::Relaxed),
            nodes: vec![
                Node {
                    var: u32::MAX,
                    low: FALSE,
                    high: FALSE,
                },
                Node {
                    var: u32::MAX,
                    low: TRUE,
                    high: TRUE,
                },
            ],
            unique: FxHashMap::default(),
            var_names: Vec::new(),
            level_of: Vec::new(),
            var_at_level: Vec::new(),
            blocks: Vec::new(),
            apply_cache: FxHashMap::default(),
            not_cache: FxHashMap::default(),
            ite_cache: FxHashMap::default(),
            quant_cache: FxHashMap::default(),
            relprod_cache: FxHashMap::default(),
            budget: DEFAULT_BUDGET_BYTES,
        };
        if blocks.iter().map(|b| b.1).sum::<usize>() == 0 {
            return Err(BddError::EmptyStore);
        }
        store.insert_blocks(blocks, None)?;
        Ok(store)
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn set_budget(&mut self, bytes: usize) {
        self.budget = bytes;
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Inserts new blocks into the variable order immediately above `before`
    /// (or at the bottom when `None`). Pairing rules are those of [`new`].
    ///
    /// [`new`]: BddStore::new
    pub fn insert_blocks(
        &mut self,
        blocks: &[(&str, usize)],
        before: Option<VarId>,
    ) -> BddResult<()> {
        for (i, (name, _)) in blocks.iter().enumerate() {
            if self.block(name).is_some() || blocks[..i].iter().any(|b| b.0 == *name) {
                return Err(BddError::DuplicateBlock(name.to_string()));
            }
        }
        let partner = |name: &str| -> Option<usize> {
            let want = match name.strip_suffix('\'') {
                Some(base) => base.to_string(),
                None => format!("{name}'"),
            };
            blocks.iter().position(|b| b.0 == want)
        };
        // Lay out the new variables as a sequence of (block index, bit).
        let mut layout: Vec<(usize, usize)> = Vec::new();
        let mut placed = vec![false; blocks.len()];
        for (i, (name, width)) in blocks.iter().enumerate() {
            if placed[i] {
                continue;
            }
            placed[i] = true;
            match partner(name) {
                Some(j) if !placed[j] => {
                    placed[j] = true;
                    if blocks[j].1 != *width {
                        let (a, b) = if name.ends_with('\'') {
                            (blocks[j].0, *name)
                        } else {
                            (*name, blocks[j].0)
                        };
                        return Err(BddError::PairWidthMismatch(a.to_string(), b.to_string()));
                    }
                    for bit in 0..*width {
                        layout.push((i, bit));
                        layout.push((j, bit));
                    }
                }
                _ => layout.extend((0..*width).map(|bit| (i, bit))),
            }
        }
        let insert_level = match before {
            Some(v) => {
                self.check_var(v)?;
                self.level_of[v.index()] as usize
            }
            None => self.var_at_level.len(),
        };
        let mut new_blocks: Vec<VarBlock> = blocks
            .iter()
            .map(|(name, width)| VarBlock {
                name: name.to_string(),
                vars: Vec::with_capacity(*width),
            })
            .collect();
        let mut new_vars = Vec::with_capacity(layout.len());
        for (b, bit) in layout {
            let id = self.var_names.len() as u32;
            self.var_names.push(format!("{}{}", blocks[b].0, bit));
            self.level_of.push(0);
            new_blocks[b].vars.push(VarId(id));
            new_vars.push(id);
        }
        // Blocks list their variables in bit order.
        for (blk, (_, width)) in new_blocks.iter_mut().zip(blocks) {
            debug_assert_eq!(blk.vars.len(), *width);
        }
        self.var_at_level
            .splice(insert_level..insert_level, new_vars);
        for (lvl, &v) in self.var_at_level.iter().enumerate() {
            self.level_of[v as usize] = lvl as u32;
        }
        self.blocks.extend(new_blocks);
        Ok(())
    }

    pub fn block(&self, name: &str) -> Option<&VarBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn block_vars(&self, name: &str) -> BddResult<Vec<VarId>> {
        self.block(name)
            .map(|b| b.vars.clone())
            .ok_or_else(|| BddError::UnknownBlock(name.to_string()))
    }

    pub fn blocks(&self) -> &[VarBlock] {
        &self.blocks
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.var_names[v.index()]
    }

    pub fn level(&self, v: VarId) -> u32 {
        self.level_of[v.index()]
    }

    /// Variables in order, topmost first.
    pub fn order(&self) -> Vec<VarId> {
        self.var_at_level.iter().map(|&v| VarId(v)).collect()
    }

    /// Number of allocated nodes including the two terminals.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Drops every memoized operation result. Nodes are kept.
    pub fn clear_caches(&mut self) {
        self.apply_cache.clear();
        self.not_cache.clear();
        self.ite_cache.clear();
        self.quant_cache.clear();
        self.relprod_cache.clear();
    }

    // ----- handles -------------------------------------------------------

    pub(crate) fn wrap(&self, root: u32) -> Bdd {
        Bdd {
            root,
            store: self.id,
        }
    }

    pub(crate) fn own(&self, f: Bdd) -> BddResult<u32> {
        if f.store != self.id {
            return Err(BddError::CrossStore {
                expected: self.id,
                found: f.store,
            });
        }
        Ok(f.root)
    }

    pub(crate) fn check_var(&self, v: VarId) -> BddResult<()> {
        if v.index() < self.var_names.len() {
            Ok(())
        } else {
            Err(BddError::UnknownVar(v.0))
        }
    }

    pub fn tt(&self) -> Bdd {
        self.wrap(TRUE)
    }

    pub fn ff(&self) -> Bdd {
        self.wrap(FALSE)
    }

    pub fn constant(&self, value: bool) -> Bdd {
        self.wrap(if value { TRUE } else { FALSE })
    }

    /// The projection function of variable `v`.
    pub fn var(&mut self, v: VarId) -> BddResult<Bdd> {
        self.check_var(v)?;
        let r = self.mk(v.0, FALSE, TRUE)?;
        Ok(self.wrap(r))
    }

    pub fn nvar(&mut self, v: VarId) -> BddResult<Bdd> {
        self.check_var(v)?;
        let r = self.mk(v.0, TRUE, FALSE)?;
        Ok(self.wrap(r))
    }

    pub fn literal(&mut self, v: VarId, positive: bool) -> BddResult<Bdd> {
        if positive {
            self.var(v)
        } else {
            self.nvar(v)
        }
    }

    // ----- node level primitives ------------------------------------------

    #[inline]
    pub(crate) fn node_level(&self, n: u32) -> u32 {
        if n <= TRUE {
            TERMINAL_LEVEL
        } else {
            self.level_of[self.nodes[n as usize].var as usize]
        }
    }

    #[inline]
    pub(crate) fn node(&self, n: u32) -> Node {
        self.nodes[n as usize]
    }

    /// Cofactors of `n` with respect to the variable at `level`.
    #[inline]
    pub(crate) fn cofactors(&self, n: u32, level: u32) -> (u32, u32) {
        if self.node_level(n) == level {
            let node = self.nodes[n as usize];
            (node.low, node.high)
        } else {
            (n, n)
        }
    }

    fn memory_estimate(&self) -> usize {
        self.nodes.len() * NODE_BYTES
            + (self.apply_cache.len()
                + self.not_cache.len()
                + self.ite_cache.len()
                + self.quant_cache.len()
                + self.relprod_cache.len())
                * CACHE_ENTRY_BYTES
    }

    pub(crate) fn mk(&mut self, var: u32, low: u32, high: u32) -> BddResult<u32> {
        if low == high {
            return Ok(low);
        }
        if let Some(&n) = self.unique.get(&(var, low, high)) {
            return Ok(n);
        }
        if self.nodes.len() & 0x3ff == 0 && self.memory_estimate() > self.budget {
            self.clear_caches();
            if self.memory_estimate() > self.budget {
                return Err(BddError::BudgetExceeded {
                    budget: self.budget,
                });
            }
        }
        let n = self.nodes.len() as u32;
        self.nodes.push(Node { var, low, high });
        self.unique.insert((var, low, high), n);
        Ok(n)
    }

    // ----- Boolean operations ----------------------------------------------

    pub fn apply(&mut self, op: BoolOp, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        let (f, g) = (self.own(f)?, self.own(g)?);
        let r = self.apply_rec(op, f, g)?;
        Ok(self.wrap(r))
    }

    pub fn and(&mut self, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        self.apply(BoolOp::And, f, g)
    }

    pub fn or(&mut self, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        self.apply(BoolOp::Or, f, g)
    }

    pub fn xor(&mut self, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        self.apply(BoolOp::Xor, f, g)
    }

    pub fn implies(&mut self, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        self.apply(BoolOp::Implies, f, g)
    }

    pub fn iff(&mut self, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        self.apply(BoolOp::Iff, f, g)
    }

    /// `f ∧ ¬g`
    pub fn diff(&mut self, f: Bdd, g: Bdd) -> BddResult<Bdd> {
        self.apply(BoolOp::Diff, f, g)
    }

    pub fn not(&mut self, f: Bdd) -> BddResult<Bdd> {
        let f = self.own(f)?;
        let r = self.not_rec(f)?;
        Ok(self.wrap(r))
    }

    pub fn ite(&mut self, f: Bdd, g: Bdd, h: Bdd) -> BddResult<Bdd> {
        let (f, g, h) = (self.own(f)?, self.own(g)?, self.own(h)?);
        let r = self.ite_rec(f, g, h)?;
        Ok(self.wrap(r))
    }

    /// Conjunction of all functions in `fs` (true for an empty list).
    pub fn and_all(&mut self, fs: impl IntoIterator<Item = Bdd>) -> BddResult<Bdd> {
        let mut acc = self.tt();
        for f in fs {
            acc = self.and(acc, f)?;
        }
        Ok(acc)
    }

    /// Disjunction of all functions, combined as a balanced tree.
    pub fn or_all(&mut self, fs: impl IntoIterator<Item = Bdd>) -> BddResult<Bdd> {
        let mut layer: Vec<Bdd> = fs.into_iter().collect();
        if layer.is_empty() {
            return Ok(self.ff());
        }
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            for pair in layer.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.or(pair[0], pair[1])?
                } else {
                    pair[0]
                });
            }
            layer = next;
        }
        Ok(layer[0])
    }

    pub(crate) fn not_rec(&mut self, f: u32) -> BddResult<u32> {
        if f <= TRUE {
            return Ok(f ^ 1);
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return Ok(r);
        }
        let node = self.nodes[f as usize];
        let low = self.not_rec(node.low)?;
        let high = self.not_rec(node.high)?;
        let r = self.mk(node.var, low, high)?;
        self.not_cache.insert(f, r);
        Ok(r)
    }

    pub(crate) fn apply_rec(&mut self, op: BoolOp, f: u32, g: u32) -> BddResult<u32> {
        if f <= TRUE && g <= TRUE {
            return Ok(op.eval(f == TRUE, g == TRUE) as u32);
        }
        // Terminal shortcuts.
        match op {
            BoolOp::And => {
                if f == FALSE || g == FALSE {
                    return Ok(FALSE);
                }
                if f == TRUE || f == g {
                    return Ok(g);
                }
                if g == TRUE {
                    return Ok(f);
                }
            }
            BoolOp::Or => {
                if f == TRUE || g == TRUE {
                    return Ok(TRUE);
                }
                if f == FALSE || f == g {
                    return Ok(g);
                }
                if g == FALSE {
                    return Ok(f);
                }
            }
            BoolOp::Xor => {
                if f == g {
                    return Ok(FALSE);
                }
                if f == FALSE {
                    return Ok(g);
                }
                if g == FALSE {
                    return Ok(f);
                }
            }
            BoolOp::Implies => {
                if f == FALSE || g == TRUE || f == g {
                    return Ok(TRUE);
                }
                if f == TRUE {
                    return Ok(g);
                }
            }
            BoolOp::Iff => {
                if f == g {
                    return Ok(TRUE);
                }
                if f == TRUE {
                    return Ok(g);
                }
                if g == TRUE {
                    return Ok(f);
                }
            }
            BoolOp::Diff => {
                if f == FALSE || g == TRUE || f == g {
                    return Ok(FALSE);
                }
                if g == FALSE {
                    return Ok(f);
                }
            }
        }
        let (a, b) = if op.commutative() && f > g {
            (g, f)
        } else {
            (f, g)
        };
        let key = (op.code(), a, b);
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }
        let (lf, lg) = (self.node_level(f), self.node_level(g));
        let level = lf.min(lg);
        let var = self.var_at_level[level as usize];
        let (f0, f1) = self.cofactors(f, level);
        let (g0, g1) = self.cofactors(g, level);
        let low = self.apply_rec(op, f0, g0)?;
        let high = self.apply_rec(op, f1, g1)?;
        let r = self.mk(var, low, high)?;
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    pub(crate) fn ite_rec(&mut self, f: u32, g: u32, h: u32) -> BddResult<u32> {
        if f == TRUE {
            return Ok(g);
        }
        if f == FALSE {
            return Ok(h);
        }
        if g == h {
            return Ok(g);
        }
        if g == TRUE && h == FALSE {
            return Ok(f);
        }
        if g == FALSE && h == TRUE {
            return self.not_rec(f);
        }
        if g == TRUE {
            return self.apply_rec(BoolOp::Or, f, h);
        }
        if h == FALSE {
            return self.apply_rec(BoolOp::And, f, g);
        }
        if let Some(&r) = self.ite_cache.get(&(f, g, h)) {
            return Ok(r);
        }
        let level = self
            .node_level(f)
            .min(self.node_level(g))
            .min(self.node_level(h));
        let var = self.var_at_level[level as usize];
        let (f0, f1) = self.cofactors(f, level);
        let (g0, g1) = self.cofactors(g, level);
        let (h0, h1) = self.cofactors(h, level);
        let low = self.ite_rec(f0, g0, h0)?;
        let high = self.ite_rec(f1, g1, h1)?;
        let r = self.mk(var, low, high)?;
        self.ite_cache.insert((f, g, h), r);
        Ok(r)
    }

    // ----- encodings --------------------------------------------------------

    /// Conjunction of literals encoding `value` in binary over `vars`
    /// (least significant bit first).
    pub fn encode_value(&mut self, vars: &[VarId], value: u64) -> BddResult<Bdd> {
        let mut lits: Vec<(VarId, bool)> = vars
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (value >> i) & 1 == 1))
            .collect();
        self.cube_of(&mut lits)
    }

    /// Conjunction of the given literals.
    pub fn cube_of(&mut self, lits: &mut [(VarId, bool)]) -> BddResult<Bdd> {
        for (v, _) in lits.iter() {
            self.check_var(*v)?;
        }
        // Build bottom-up so every mk call is already ordered.
        lits.sort_by_key(|(v, _)| std::cmp::Reverse(self.level(*v)));
        let mut acc = TRUE;
        for &(v, positive) in lits.iter() {
            acc = if positive {
                self.mk(v.0, FALSE, acc)?
            } else {
                self.mk(v.0, acc, FALSE)?
            };
        }
        Ok(self.wrap(acc))
    }

    /// The set of values `< bound` over `vars`.
    pub fn less_than(&mut self, vars: &[VarId], bound: u64) -> BddResult<Bdd> {
        let mut acc = self.ff();
        for value in 0..bound.min(1u64 << vars.len().min(63)) {
            let c = self.encode_value(vars, value)?;
            acc = self.or(acc, c)?;
        }
        Ok(acc)
    }

    /// `⋀_i (a_i ↔ b_i)`
    pub fn equal_vectors(&mut self, a: &[VarId], b: &[VarId]) -> BddResult<Bdd> {
        if a.len() != b.len() {
            return Err(BddError::BlockLengthMismatch(a.len(), b.len()));
        }
        let mut pairs: Vec<(VarId, VarId)> = a.iter().copied().zip(b.iter().copied()).collect();
        pairs.sort_by_key(|(x, y)| std::cmp::Reverse(self.level(*x).min(self.level(*y))));
        let mut acc = self.tt();
        for (x, y) in pairs {
            let vx = self.var(x)?;
            let vy = self.var(y)?;
            let eq = self.iff(vx, vy)?;
            acc = self.and(eq, acc)?;
        }
        Ok(acc)
    }
}
