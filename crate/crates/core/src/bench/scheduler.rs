//! Fair scheduler: `n` processes compete for one resource handed out by a
//! scheduler agent.
//!
//! A configuration is the set of waiting processes plus the holder of the
//! resource, if any. A process acts with `a` (request when idle, give up
//! when waiting, release when holding) or stays put with `w`. The scheduler
//! plays `g<i>` to grant process `i`, which succeeds when `i` keeps waiting
//! and the resource is free or being released in the same step. A boot
//! state precedes the all-idle configuration, which gives
//! `(n + 2)·2^(n-1) + 1` states.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cgs::{parse_model, Cgs};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerParams {
    pub n: usize,
}

impl SchedulerParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Invalid(
                "the scheduler needs at least 2 processes".into(),
            ));
        }
        if self.n > 10 {
            return Err(Error::Limit(format!(
                "scheduler with {} processes is too large to enumerate",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Config {
    Boot,
    /// Waiting bitmask and holder.
    Run(u32, Option<usize>),
}

fn name(c: Config) -> String {
    match c {
        Config::Boot => "boot".to_string(),
        Config::Run(w, h) => {
            let mut s = format!("w{w}");
            if let Some(h) = h {
                let _ = write!(s, "_h{}", h + 1);
            }
            s
        }
    }
}

/// `acts[i]` is true when process `i` plays `a`; `grant` is the index of the
/// granted process, if any.
fn step(c: Config, acts: &[bool], grant: Option<usize>) -> Config {
    let Config::Run(waiting, holder) = c else {
        return Config::Run(0, None);
    };
    let mut w = waiting;
    let mut h = holder;
    for (i, &a) in acts.iter().enumerate() {
        if !a {
            continue;
        }
        if h == Some(i) {
            h = None;
        } else {
            // Idle processes request, waiting ones give up.
            w ^= 1 << i;
        }
    }
    if let Some(g) = grant {
        let still_waiting = waiting & (1 << g) != 0 && w & (1 << g) != 0;
        if still_waiting && h.is_none() {
            w &= !(1 << g);
            h = Some(g);
        }
    }
    Config::Run(w, h)
}

/// Agents `P1..Pn` and `S`; atoms `wt<i>` (waiting) and `gr<i>` (holding).
pub fn scheduler_cgsl(p: &SchedulerParams) -> Result<String> {
    p.validate()?;
    let n = p.n;
    let mut ids: BTreeMap<Config, usize> = BTreeMap::new();
    let mut order = vec![Config::Boot];
    ids.insert(Config::Boot, 0);
    let mut queue = VecDeque::from([Config::Boot]);
    let grants: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
    let joint = |mask: u32| -> Vec<bool> { (0..n).map(|i| mask & (1 << i) != 0).collect() };
    while let Some(c) = queue.pop_front() {
        for mask in 0..1u32 << n {
            for &g in &grants {
                let next = step(c, &joint(mask), g);
                if let std::collections::btree_map::Entry::Vacant(e) = ids.entry(next) {
                    e.insert(order.len());
                    order.push(next);
                    queue.push_back(next);
                }
            }
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "# fair scheduler, {n} processes");
    let agents: Vec<String> = (1..=n)
        .map(|i| format!("P{i}"))
        .chain(["S".to_string()])
        .collect();
    let _ = writeln!(out, "agents: {}", agents.join(", "));
    let atoms: Vec<String> = (1..=n)
        .map(|i| format!("wt{i}"))
        .chain((1..=n).map(|i| format!("gr{i}")))
        .collect();
    let _ = writeln!(out, "atoms: {}", atoms.join(", "));
    let names: Vec<String> = order.iter().map(|&c| name(c)).collect();
    let _ = writeln!(out, "states: {}", names.join(", "));
    let _ = writeln!(out, "initial: boot");
    for i in 1..=n {
        let _ = writeln!(out, "actions P{i}: a, w");
    }
    let grant_names: Vec<String> = std::iter::once("none".to_string())
        .chain((1..=n).map(|i| format!("g{i}")))
        .collect();
    let _ = writeln!(out, "actions S: {}", grant_names.join(", "));
    for (&c, nm) in order.iter().zip(&names) {
        if let Config::Run(w, h) = c {
            let mut labels: Vec<String> = (0..n)
                .filter(|i| w & (1 << i) != 0)
                .map(|i| format!("wt{}", i + 1))
                .collect();
            if let Some(h) = h {
                labels.push(format!("gr{}", h + 1));
            }
            if !labels.is_empty() {
                let _ = writeln!(out, "label {nm}: {}", labels.join(", "));
            }
        }
    }
    // Joint actions in declaration order: the last agent varies fastest.
    for (&c, nm) in order.iter().zip(&names) {
        for mask in 0..1u32 << n {
            let acts = joint(mask);
            let procs: Vec<&str> = acts.iter().map(|&a| if a { "a" } else { "w" }).collect();
            for (g, gname) in grants.iter().zip(&grant_names) {
                let _ = writeln!(
                    out,
                    "trans {nm} ({},{gname}) -> {}",
                    procs.join(","),
                    name(step(c, &acts, *g))
                );
            }
        }
    }
    Ok(out)
}

pub fn gen_scheduler(p: &SchedulerParams) -> Result<(String, Cgs)> {
    let text = scheduler_cgsl(p)?;
    let g = parse_model(&text)?;
    Ok((text, g))
}
