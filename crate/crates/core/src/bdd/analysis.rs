use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};

use super::store::{FALSE, TRUE};
use super::{Bdd, BddError, BddResult, BddStore, VarId};

impl BddStore {
    /// Variables the function depends on, topmost first.
    pub fn support(&self, f: Bdd) -> BddResult<Vec<VarId>> {
        let root = self.own(f)?;
        let mut seen = FxHashSet::default();
        let mut vars = FxHashSet::default();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            vars.insert(node.var);
            stack.push(node.low);
            stack.push(node.high);
        }
        let mut out: Vec<VarId> = vars.into_iter().map(VarId).collect();
        out.sort_by_key(|v| self.level(*v));
        Ok(out)
    }

    /// Number of nodes reachable from `f`, terminals included.
    pub fn size(&self, f: Bdd) -> BddResult<usize> {
        let root = self.own(f)?;
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) || n <= TRUE {
                continue;
            }
            let node = self.node(n);
            stack.push(node.low);
            stack.push(node.high);
        }
        Ok(seen.len())
    }

    pub fn eval(&self, f: Bdd, assignment: impl Fn(VarId) -> bool) -> BddResult<bool> {
        let mut n = self.own(f)?;
        while n > TRUE {
            let node = self.node(n);
            n = if assignment(VarId(node.var)) {
                node.high
            } else {
                node.low
            };
        }
        Ok(n == TRUE)
    }

    /// Number of assignments to `over` that satisfy `f`.
    pub fn sat_count(&self, f: Bdd, over: &[VarId]) -> BddResult<u128> {
        let root = self.own(f)?;
        if over.len() > 126 {
            return Err(BddError::CountOverflow(over.len()));
        }
        let mut sorted: Vec<VarId> = over.to_vec();
        sorted.sort_by_key(|v| self.level(*v));
        sorted.dedup();
        let pos: FxHashMap<u32, usize> = sorted.iter().enumerate().map(|(i, v)| (v.0, i)).collect();
        for v in self.support(f)? {
            if !pos.contains_key(&v.0) {
                return Err(BddError::FreeVariable(self.var_name(v).to_string()));
            }
        }
        let total = sorted.len();
        let position = |n: u32| {
            if n <= TRUE {
                total
            } else {
                pos[&self.node(n).var]
            }
        };
        let mut memo: FxHashMap<u32, u128> = FxHashMap::default();
        fn count(
            store: &BddStore,
            n: u32,
            position: &dyn Fn(u32) -> usize,
            memo: &mut FxHashMap<u32, u128>,
        ) -> u128 {
            if n == FALSE {
                return 0;
            }
            if n == TRUE {
                return 1;
            }
            if let Some(&c) = memo.get(&n) {
                return c;
            }
            let node = store.node(n);
            let p = position(n);
            let lo = count(store, node.low, position, memo) << (position(node.low) - p - 1);
            let hi = count(store, node.high, position, memo) << (position(node.high) - p - 1);
            memo.insert(n, lo + hi);
            lo + hi
        }
        Ok(count(self, root, &position, &mut memo) << position(root))
    }

    /// Calls `visit` with every satisfying assignment of `vars` (given in the
    /// caller's order). `f` must only depend on `vars`.
    pub fn for_each_minterm(
        &self,
        f: Bdd,
        vars: &[VarId],
        mut visit: impl FnMut(&[bool]),
    ) -> BddResult<()> {
        let root = self.own(f)?;
        let in_vars: FxHashSet<u32> = vars.iter().map(|v| v.0).collect();
        for v in self.support(f)? {
            if !in_vars.contains(&v.0) {
                return Err(BddError::FreeVariable(self.var_name(v).to_string()));
            }
        }
        // Walk in level order, report in caller order.
        let mut by_level: Vec<(usize, VarId)> = vars.iter().copied().enumerate().collect();
        by_level.sort_by_key(|(_, v)| self.level(*v));
        let mut values = vec![false; vars.len()];
        self.minterm_rec(root, 0, &by_level, &mut values, &mut visit);
        Ok(())
    }

    fn minterm_rec(
        &self,
        n: u32,
        depth: usize,
        by_level: &[(usize, VarId)],
        values: &mut Vec<bool>,
        visit: &mut impl FnMut(&[bool]),
    ) {
        if n == FALSE {
            return;
        }
        if depth == by_level.len() {
            debug_assert_eq!(n, TRUE);
            visit(values);
            return;
        }
        let (slot, var) = by_level[depth];
        let level = self.level(var);
        let (lo, hi) = self.cofactors(n, level);
        values[slot] = false;
        self.minterm_rec(lo, depth + 1, by_level, values, visit);
        values[slot] = true;
        self.minterm_rec(hi, depth + 1, by_level, values, visit);
    }

    /// Decodes every satisfying assignment of `vars` as an unsigned integer
    /// (first variable = least significant bit), sorted ascending.
    pub fn decode_values(&self, f: Bdd, vars: &[VarId]) -> BddResult<Vec<u64>> {
        let mut out = Vec::new();
        self.for_each_minterm(f, vars, |bits| {
            out.push(
                bits.iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i)),
            );
        })?;
        out.sort_unstable();
        Ok(out)
    }

    /// Structural audit of the nodes below `f`: reducedness, strict level
    /// ordering along edges, and uniqueness of `(var, low, high)` triples.
    pub fn audit(&self, f: Bdd) -> BddResult<Result<(), String>> {
        let root = self.own(f)?;
        let mut seen = FxHashSet::default();
        let mut triples = FxHashMap::default();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            if node.low == node.high {
                return Ok(Err(format!("node {n} has identical children")));
            }
            let lvl = self.node_level(n);
            if self.node_level(node.low) <= lvl || self.node_level(node.high) <= lvl {
                return Ok(Err(format!("node {n} violates the variable order")));
            }
            if let Some(other) = triples.insert((node.var, node.low, node.high), n) {
                return Ok(Err(format!("nodes {other} and {n} are duplicates")));
            }
            stack.push(node.low);
            stack.push(node.high);
        }
        Ok(Ok(()))
    }

    /// Graphviz rendering: solid edges are high branches, dashed ones low.
    pub fn to_dot(&self, f: Bdd) -> BddResult<String> {
        let root = self.own(f)?;
        let mut out = String::from("digraph bdd {\n");
        let _ = writeln!(
            out,
            "  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];"
        );
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            let _ = writeln!(
                out,
                "  n{n} [label=\"{}\"];",
                self.var_names[node.var as usize]
            );
            let _ = writeln!(out, "  n{n} -> n{} [style=solid];", node.high);
            let _ = writeln!(out, "  n{n} -> n{} [style=dashed];", node.low);
            stack.push(node.low);
            stack.push(node.high);
        }
        out.push_str("}\n");
        Ok(out)
    }
}
