use rustc_hash::FxHashMap;

use super::store::{BoolOp, FALSE, TRUE};
use super::{Bdd, BddError, BddResult, BddStore, VarId};

const EXISTS: u8 = 0;
const FORALL: u8 = 1;

impl BddStore {
    /// Positive cube over `vars`; the representation of a quantified set.
    fn var_cube(&mut self, vars: &[VarId]) -> BddResult<u32> {
        let mut lits: Vec<(VarId, bool)> = vars.iter().map(|&v| (v, true)).collect();
        Ok(self.cube_of(&mut lits)?.root)
    }

    pub fn exists(&mut self, vars: &[VarId], f: Bdd) -> BddResult<Bdd> {
        let f = self.own(f)?;
        let cube = self.var_cube(vars)?;
        let r = self.quant_rec(EXISTS, f, cube)?;
        Ok(self.wrap(r))
    }

    pub fn forall(&mut self, vars: &[VarId], f: Bdd) -> BddResult<Bdd> {
        let f = self.own(f)?;
        let cube = self.var_cube(vars)?;
        let r = self.quant_rec(FORALL, f, cube)?;
        Ok(self.wrap(r))
    }

    /// `∃ vars. f ∧ g` without building the conjunction first.
    pub fn and_exists(&mut self, vars: &[VarId], f: Bdd, g: Bdd) -> BddResult<Bdd> {
        let (f, g) = (self.own(f)?, self.own(g)?);
        let cube = self.var_cube(vars)?;
        let r = self.relprod_rec(f, g, cube)?;
        Ok(self.wrap(r))
    }

    fn quant_rec(&mut self, kind: u8, f: u32, mut cube: u32) -> BddResult<u32> {
        if f <= TRUE {
            return Ok(f);
        }
        let level = self.node_level(f);
        while cube != TRUE && self.node_level(cube) < level {
            cube = self.node(cube).high;
        }
        if cube == TRUE {
            return Ok(f);
        }
        if let Some(&r) = self.quant_cache.get(&(kind, f, cube)) {
            return Ok(r);
        }
        let node = self.node(f);
        let r = if self.node_level(cube) == level {
            let rest = self.node(cube).high;
            let low = self.quant_rec(kind, node.low, rest)?;
            let absorbing = if kind == EXISTS { TRUE } else { FALSE };
            if low == absorbing {
                absorbing
            } else {
                let high = self.quant_rec(kind, node.high, rest)?;
                let op = if kind == EXISTS {
                    BoolOp::Or
                } else {
                    BoolOp::And
                };
                self.apply_rec(op, low, high)?
            }
        } else {
            let low = self.quant_rec(kind, node.low, cube)?;
            let high = self.quant_rec(kind, node.high, cube)?;
            self.mk(node.var, low, high)?
        };
        self.quant_cache.insert((kind, f, cube), r);
        Ok(r)
    }

    fn relprod_rec(&mut self, f: u32, g: u32, mut cube: u32) -> BddResult<u32> {
        if f == FALSE || g == FALSE {
            return Ok(FALSE);
        }
        if f == TRUE && g == TRUE {
            return Ok(TRUE);
        }
        if cube == TRUE {
            return self.apply_rec(BoolOp::And, f, g);
        }
        if f == TRUE || f == g {
            return self.quant_rec(EXISTS, g, cube);
        }
        if g == TRUE {
            return self.quant_rec(EXISTS, f, cube);
        }
        let level = self.node_level(f).min(self.node_level(g));
        while cube != TRUE && self.node_level(cube) < level {
            cube = self.node(cube).high;
        }
        if cube == TRUE {
            return self.apply_rec(BoolOp::And, f, g);
        }
        let (a, b) = if f < g { (f, g) } else { (g, f) };
        if let Some(&r) = self.relprod_cache.get(&(a, b, cube)) {
            return Ok(r);
        }
        let var = self.var_at_level[level as usize];
        let (f0, f1) = self.cofactors(f, level);
        let (g0, g1) = self.cofactors(g, level);
        let r = if self.node_level(cube) == level {
            let rest = self.node(cube).high;
            let low = self.relprod_rec(f0, g0, rest)?;
            if low == TRUE {
                TRUE
            } else {
                let high = self.relprod_rec(f1, g1, rest)?;
                self.apply_rec(BoolOp::Or, low, high)?
            }
        } else {
            let low = self.relprod_rec(f0, g0, cube)?;
            let high = self.relprod_rec(f1, g1, cube)?;
            self.mk(var, low, high)?
        };
        self.relprod_cache.insert((a, b, cube), r);
        Ok(r)
    }

    /// Exchanges every variable of `from` with the variable at the same
    /// position in `to`. When `f` does not mention `to` this is a plain
    /// substitution `from ↦ to`.
    pub fn rename(&mut self, f: Bdd, from: &[VarId], to: &[VarId]) -> BddResult<Bdd> {
        if from.len() != to.len() {
            return Err(BddError::BlockLengthMismatch(from.len(), to.len()));
        }
        let root = self.own(f)?;
        let mut map: FxHashMap<u32, u32> = FxHashMap::default();
        for (&a, &b) in from.iter().zip(to) {
            self.check_var(a)?;
            self.check_var(b)?;
            map.insert(a.0, b.0);
            map.insert(b.0, a.0);
        }
        if root <= TRUE || map.is_empty() {
            return Ok(f);
        }
        // Order-preserving renamings are a linear rebuild.
        let support = self.support(f)?;
        let mapped: Vec<u32> = support
            .iter()
            .map(|v| *map.get(&v.0).unwrap_or(&v.0))
            .collect();
        let monotone = mapped
            .windows(2)
            .all(|w| self.level_of[w[0] as usize] < self.level_of[w[1] as usize]);
        if monotone {
            let mut memo = FxHashMap::default();
            let r = self.rebuild_rec(root, &map, &mut memo)?;
            return Ok(self.wrap(r));
        }
        let mut subst = Vec::with_capacity(map.len());
        for (&a, &b) in &map {
            let vb = self.var(VarId(b))?;
            subst.push((VarId(a), vb));
        }
        self.compose(f, &subst)
    }

    fn rebuild_rec(
        &mut self,
        n: u32,
        map: &FxHashMap<u32, u32>,
        memo: &mut FxHashMap<u32, u32>,
    ) -> BddResult<u32> {
        if n <= TRUE {
            return Ok(n);
        }
        if let Some(&r) = memo.get(&n) {
            return Ok(r);
        }
        let node = self.node(n);
        let low = self.rebuild_rec(node.low, map, memo)?;
        let high = self.rebuild_rec(node.high, map, memo)?;
        let var = *map.get(&node.var).unwrap_or(&node.var);
        let r = self.mk(var, low, high)?;
        memo.insert(n, r);
        Ok(r)
    }

    /// Simultaneous substitution of functions for variables.
    pub fn compose(&mut self, f: Bdd, subst: &[(VarId, Bdd)]) -> BddResult<Bdd> {
        let root = self.own(f)?;
        let mut map: FxHashMap<u32, u32> = FxHashMap::default();
        for &(v, g) in subst {
            self.check_var(v)?;
            map.insert(v.0, self.own(g)?);
        }
        if map.is_empty() {
            return Ok(f);
        }
        let mut memo = FxHashMap::default();
        let r = self.compose_rec(root, &map, &mut memo)?;
        Ok(self.wrap(r))
    }

    fn compose_rec(
        &mut self,
        n: u32,
        map: &FxHashMap<u32, u32>,
        memo: &mut FxHashMap<u32, u32>,
    ) -> BddResult<u32> {
        if n <= TRUE {
            return Ok(n);
        }
        if let Some(&r) = memo.get(&n) {
            return Ok(r);
        }
        let node = self.node(n);
        let low = self.compose_rec(node.low, map, memo)?;
        let high = self.compose_rec(node.high, map, memo)?;
        let sel = match map.get(&node.var) {
            Some(&g) => g,
            None => self.mk(node.var, FALSE, TRUE)?,
        };
        let r = self.ite_rec(sel, high, low)?;
        memo.insert(n, r);
        Ok(r)
    }

    /// Cofactor of `f` under a partial assignment.
    pub fn restrict(&mut self, f: Bdd, assignment: &[(VarId, bool)]) -> BddResult<Bdd> {
        let subst: Vec<(VarId, Bdd)> = assignment
            .iter()
            .map(|&(v, b)| (v, self.constant(b)))
            .collect();
        self.compose(f, &subst)
    }
}
