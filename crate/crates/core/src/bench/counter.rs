use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cgs::{parse_model, Cgs};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterMode {
    Finite,
    Infinite,
}

/// Two agents `A`, `B` share a counter bounded by `c`; each step every agent
/// either increments (`i`) or waits (`w`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterParams {
    pub c: usize,
    /// Step bound, finite mode only.
    pub s: usize,
    pub mode: CounterMode,
}

impl CounterParams {
    pub fn finite(c: usize, s: usize) -> Self {
        CounterParams {
            c,
            s,
            mode: CounterMode::Finite,
        }
    }

    pub fn infinite(c: usize) -> Self {
        CounterParams {
            c,
            s: 0,
            mode: CounterMode::Infinite,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c < 1 {
            return Err(Error::Invalid("counter bound C must be at least 1".into()));
        }
        if self.mode == CounterMode::Finite && self.s < 1 {
            return Err(Error::Invalid("finite counter needs S >= 1".into()));
        }
        Ok(())
    }
}

const ACTIONS: [&str; 2] = ["i", "w"];

/// Successor of `(count, step)` when `incs` agents increment.
fn step(p: &CounterParams, (c, t): (usize, usize), incs: usize) -> (usize, usize) {
    match p.mode {
        CounterMode::Finite if t == p.s => (c, t),
        CounterMode::Finite => ((c + incs).min(p.c), t + 1),
        CounterMode::Infinite => ((c + incs).min(p.c), 0),
    }
}

fn name(p: &CounterParams, (c, t): (usize, usize)) -> String {
    match p.mode {
        CounterMode::Finite => format!("c{c}_t{t}"),
        CounterMode::Infinite => format!("c{c}"),
    }
}

/// CGSL text of the counter system, restricted to states reachable from
/// `(0, 0)`. Atoms: `counter_max` at count `C`, `p<k>` at count `k`.
pub fn counter_cgsl(p: &CounterParams) -> Result<String> {
    p.validate()?;
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order = vec![(0, 0)];
    ids.insert((0, 0), 0);
    let mut queue = VecDeque::from([(0, 0)]);
    while let Some(st) = queue.pop_front() {
        for incs in 0..=2 {
            let next = step(p, st, incs);
            if let std::collections::btree_map::Entry::Vacant(e) = ids.entry(next) {
                e.insert(order.len());
                order.push(next);
                queue.push_back(next);
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# counter C={} S={} {:?}", p.c, p.s, p.mode);
    let _ = writeln!(out, "agents: A, B");
    let atoms: Vec<String> = std::iter::once("counter_max".to_string())
        .chain((1..=p.c).map(|k| format!("p{k}")))
        .collect();
    let _ = writeln!(out, "atoms: {}", atoms.join(", "));
    let names: Vec<String> = order.iter().map(|&st| name(p, st)).collect();
    let _ = writeln!(out, "states: {}", names.join(", "));
    let _ = writeln!(out, "initial: {}", names[0]);
    if p.mode == CounterMode::Finite {
        let finals: Vec<&str> = order
            .iter()
            .zip(&names)
            .filter(|(st, _)| st.1 == p.s)
            .map(|(_, n)| n.as_str())
            .collect();
        let _ = writeln!(out, "final: {}", finals.join(", "));
    }
    let _ = writeln!(out, "actions A: {}", ACTIONS.join(", "));
    let _ = writeln!(out, "actions B: {}", ACTIONS.join(", "));
    for (&(c, _), n) in order.iter().zip(&names) {
        let mut labels = Vec::new();
        if c == p.c {
            labels.push("counter_max".to_string());
        }
        if c >= 1 {
            labels.push(format!("p{c}"));
        }
        if !labels.is_empty() {
            let _ = writeln!(out, "label {n}: {}", labels.join(", "));
        }
    }
    for (&st, n) in order.iter().zip(&names) {
        for a in ACTIONS {
            for b in ACTIONS {
                let incs = usize::from(a == "i") + usize::from(b == "i");
                let _ = writeln!(out, "trans {n} ({a},{b}) -> {}", name(p, step(p, st, incs)));
            }
        }
    }
    Ok(out)
}

pub fn gen_counter(p: &CounterParams) -> Result<(String, Cgs)> {
    let text = counter_cgsl(p)?;
    let g = parse_model(&text)?;
    Ok((text, g))
}
