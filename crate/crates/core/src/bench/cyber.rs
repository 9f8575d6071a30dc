//! Cyber-defence scenario: one attacker against two defenders sharing a
//! budget, over five servers and a fixed horizon.
//!
//! Flags per server, set by attacker events:
//!
//! | flag | event                         |
//! |------|-------------------------------|
//! | 1    | scan                          |
//! | 2    | user-level malicious process  |
//! | 3    | privilege escalation          |
//! | 4    | file modification (tamper)    |
//! | 5    | admin process                 |
//! | 6    | DoS payload                   |
//!
//! `monitor(i)` sets the defender's suspicion bucket for `i` from every
//! flag except 4, which only `analyze(i)` reveals. Buckets gate the
//! responses: `remove` and `data_repair` need bucket 1, `restore` bucket 2.
//! An unavailable or unaffordable action is a no-op. Within a step the
//! attacker moves first, then D1, then D2, and a monitor reads the flags
//! as they stand when the defender acts.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cgs::{parse_model, Cgs};
use crate::error::{Error, Result};

pub const SERVERS: usize = 5;
pub const FLAGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Confidentiality,
    Integrity,
    Availability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    Conservative,
    Aggressive,
    Proportional,
    Diversity,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [
        Heuristic::Conservative,
        Heuristic::Aggressive,
        Heuristic::Proportional,
        Heuristic::Diversity,
    ];
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "confidentiality" => Ok(Scenario::Confidentiality),
            "integrity" => Ok(Scenario::Integrity),
            "availability" => Ok(Scenario::Availability),
            _ => Err(Error::Invalid(format!("unknown scenario `{s}`"))),
        }
    }
}

impl FromStr for Heuristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conservative" => Ok(Heuristic::Conservative),
            "aggressive" => Ok(Heuristic::Aggressive),
            "proportional" => Ok(Heuristic::Proportional),
            "diversity" => Ok(Heuristic::Diversity),
            _ => Err(Error::Invalid(format!("unknown heuristic `{s}`"))),
        }
    }
}

/// Thresholds and weights of the suspicion heuristics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspicionConfig {
    pub weights: [u32; FLAGS],
    /// Weighted-sum thresholds `T1 < T2`.
    pub t1: u32,
    pub t2: u32,
    /// Flags that trigger immediate escalation under the aggressive heuristic,
    /// which otherwise puts any observed flag in bucket 1.
    pub critical: [bool; FLAGS],
    /// Thresholds on the normalised weighted sum, in `[0, 1]`.
    pub p1: f64,
    pub p2: f64,
    /// Thresholds on the number of distinct flags set.
    pub d1: u32,
    pub d2: u32,
}

impl Default for SuspicionConfig {
    fn default() -> Self {
        SuspicionConfig {
            weights: [1, 1, 2, 2, 3, 3],
            t1: 3,
            t2: 6,
            critical: [false, false, false, false, true, true],
            p1: 0.2,
            p2: 0.5,
            d1: 2,
            d2: 3,
        }
    }
}

impl SuspicionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t1 >= self.t2 {
            return Err(Error::Invalid(format!(
                "thresholds must satisfy T1 < T2, got {} and {}",
                self.t1, self.t2
            )));
        }
        if !(0.0..=1.0).contains(&self.p1) || !(0.0..=1.0).contains(&self.p2) || self.p1 >= self.p2
        {
            return Err(Error::Invalid(format!(
                "proportional thresholds must satisfy 0 <= P1 < P2 <= 1, got {} and {}",
                self.p1, self.p2
            )));
        }
        if self.d1 >= self.d2 {
            return Err(Error::Invalid(format!(
                "diversity thresholds must satisfy D1 < D2, got {} and {}",
                self.d1, self.d2
            )));
        }
        Ok(())
    }
}

fn bucket<T: PartialOrd>(x: T, lo: T, hi: T) -> u8 {
    if x < lo {
        0
    } else if x < hi {
        1
    } else {
        2
    }
}

/// Suspicion bucket for the flag vector `flags`.
pub fn suspicion_update(h: Heuristic, flags: &[bool; FLAGS], cfg: &SuspicionConfig) -> Result<u8> {
    cfg.validate()?;
    let sum: u32 = flags
        .iter()
        .zip(&cfg.weights)
        .filter(|(f, _)| **f)
        .map(|(_, w)| w)
        .sum();
    Ok(match h {
        Heuristic::Conservative => bucket(sum, cfg.t1, cfg.t2),
        Heuristic::Aggressive => {
            if flags.iter().zip(&cfg.critical).any(|(f, c)| *f && *c) {
                2
            } else {
                u8::from(flags.iter().any(|f| *f))
            }
        }
        Heuristic::Proportional => {
            let total: u32 = cfg.weights.iter().sum();
            let r = if total == 0 {
                0.0
            } else {
                f64::from(sum) / f64::from(total)
            };
            bucket(r, cfg.p1, cfg.p2)
        }
        Heuristic::Diversity => bucket(flags.iter().filter(|f| **f).count() as u32, cfg.d1, cfg.d2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyberParams {
    pub scenario: Scenario,
    /// Horizon in steps.
    pub horizon: usize,
    /// Initial shared defender budget.
    pub budget: u32,
    pub heuristic: Heuristic,
    pub suspicion: SuspicionConfig,
    /// Servers the agents may act on; the others stay untouched. Narrowing
    /// this is the main knob for keeping the model small.
    pub targets: Vec<usize>,
    /// Server the attacker starts on.
    pub start: usize,
    pub costs: Costs,
    /// Cap on `states × joint actions`.
    pub max_transitions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Costs {
    pub monitor: u32,
    pub analyze: u32,
    pub remove: u32,
    pub restore: u32,
    pub data_repair: u32,
}

impl Default for Costs {
    fn default() -> Self {
        Costs {
            monitor: 0,
            analyze: 0,
            remove: 1,
            restore: 2,
            data_repair: 1,
        }
    }
}

impl CyberParams {
    pub fn new(scenario: Scenario, horizon: usize, budget: u32, heuristic: Heuristic) -> Self {
        CyberParams {
            scenario,
            horizon,
            budget,
            heuristic,
            suspicion: SuspicionConfig::default(),
            targets: (0..SERVERS).collect(),
            start: 0,
            costs: Costs::default(),
            max_transitions: 20_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::Invalid("horizon T must be at least 1".into()));
        }
        self.suspicion.validate()?;
        if self.targets.is_empty() || self.targets.iter().any(|&t| t >= SERVERS) {
            return Err(Error::Invalid(format!(
                "targets must be a non-empty subset of 0..{SERVERS}"
            )));
        }
        if self.start >= SERVERS {
            return Err(Error::Invalid(format!(
                "start server must be below {SERVERS}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AttackerAct {
    Nothing,
    Scan(usize),
    Exploit(usize),
    Escalate(usize),
    Tamper(usize),
    Deny(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DefenderAct {
    Nothing,
    Monitor(usize),
    Analyze(usize),
    Remove(usize),
    Restore(usize),
    DataRepair(usize),
}

fn attacker_actions(p: &CyberParams) -> Vec<(String, AttackerAct)> {
    let mut out = vec![("do_nothing".to_string(), AttackerAct::Nothing)];
    for &i in &p.targets {
        out.push((format!("scan{i}"), AttackerAct::Scan(i)));
        out.push((format!("exploit{i}"), AttackerAct::Exploit(i)));
        out.push((format!("escalate{i}"), AttackerAct::Escalate(i)));
        match p.scenario {
            Scenario::Integrity => out.push((format!("tamper{i}"), AttackerAct::Tamper(i))),
            Scenario::Availability => out.push((format!("deny{i}"), AttackerAct::Deny(i))),
            Scenario::Confidentiality => {}
        }
    }
    out
}

fn defender_actions(p: &CyberParams) -> Vec<(String, DefenderAct)> {
    let mut out = vec![("do_nothing".to_string(), DefenderAct::Nothing)];
    for &i in &p.targets {
        out.push((format!("monitor{i}"), DefenderAct::Monitor(i)));
        out.push((format!("remove{i}"), DefenderAct::Remove(i)));
        out.push((format!("restore{i}"), DefenderAct::Restore(i)));
        if p.scenario == Scenario::Integrity {
            out.push((format!("analyze{i}"), DefenderAct::Analyze(i)));
            out.push((format!("data_repair{i}"), DefenderAct::DataRepair(i)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Server {
    priv_level: u8,
    scanned: bool,
    down: bool,
    tampered: bool,
    flags: [bool; FLAGS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct World {
    t: usize,
    budget: u32,
    pos: usize,
    servers: [Server; SERVERS],
    /// `sigma[j][i]`: bucket of defender `j` for server `i`.
    sigma: [[u8; SERVERS]; 2],
}

fn compromised(p: &CyberParams, s: &Server) -> bool {
    match p.scenario {
        Scenario::Confidentiality => s.priv_level == 2,
        Scenario::Integrity => s.tampered,
        Scenario::Availability => s.down,
    }
}

fn attack(w: &mut World, a: AttackerAct) {
    match a {
        AttackerAct::Nothing => {}
        AttackerAct::Scan(i) => {
            let s = &mut w.servers[i];
            s.scanned = true;
            s.flags[0] = true;
        }
        AttackerAct::Exploit(i) => {
            let s = &mut w.servers[i];
            if s.scanned && s.priv_level == 0 && !s.down {
                s.priv_level = 1;
                s.flags[1] = true;
                w.pos = i;
            }
        }
        AttackerAct::Escalate(i) => {
            let s = &mut w.servers[i];
            if w.pos == i && s.priv_level == 1 {
                s.priv_level = 2;
                s.flags[2] = true;
                s.flags[4] = true;
            }
        }
        AttackerAct::Tamper(i) => {
            let s = &mut w.servers[i];
            if w.pos == i && s.priv_level >= 1 {
                s.tampered = true;
                s.flags[3] = true;
            }
        }
        AttackerAct::Deny(i) => {
            let s = &mut w.servers[i];
            if w.pos == i && s.priv_level >= 1 {
                s.down = true;
                s.flags[5] = true;
            }
        }
    }
}

fn defend(p: &CyberParams, w: &mut World, j: usize, a: DefenderAct) -> Result<()> {
    let c = &p.costs;
    let pay = |w: &mut World, cost: u32| -> bool {
        if w.budget >= cost {
            w.budget -= cost;
            true
        } else {
            false
        }
    };
    match a {
        DefenderAct::Nothing => {}
        DefenderAct::Monitor(i) | DefenderAct::Analyze(i) => {
            let mut seen = w.servers[i].flags;
            if matches!(a, DefenderAct::Monitor(_)) {
                seen[3] = false;
            }
            let cost = if matches!(a, DefenderAct::Monitor(_)) {
                c.monitor
            } else {
                c.analyze
            };
            if pay(w, cost) {
                w.sigma[j][i] = suspicion_update(p.heuristic, &seen, &p.suspicion)?;
            }
        }
        DefenderAct::Remove(i) => {
            if w.sigma[j][i] >= 1 && pay(w, c.remove) {
                let s = &mut w.servers[i];
                if s.priv_level == 1 {
                    s.priv_level = 0;
                    s.flags[1] = false;
                }
            }
        }
        DefenderAct::Restore(i) => {
            if w.sigma[j][i] >= 2 && pay(w, c.restore) {
                let s = &mut w.servers[i];
                s.priv_level = 0;
                s.down = false;
                for f in [1, 2, 4, 5] {
                    s.flags[f] = false;
                }
            }
        }
        DefenderAct::DataRepair(i) => {
            if w.sigma[j][i] >= 1 && pay(w, c.data_repair) {
                let s = &mut w.servers[i];
                s.tampered = false;
                s.flags[3] = false;
            }
        }
    }
    Ok(())
}

fn step(p: &CyberParams, w: &World, a: AttackerAct, d: [DefenderAct; 2]) -> Result<World> {
    if w.t == p.horizon {
        return Ok(*w);
    }
    let mut next = *w;
    next.t += 1;
    attack(&mut next, a);
    defend(p, &mut next, 0, d[0])?;
    defend(p, &mut next, 1, d[1])?;
    Ok(next)
}

/// CGSL text of the scenario, restricted to reachable states. Agents
/// `Attacker`, `D1`, `D2`; atoms `compromised_<i>` per server and
/// `budget_left`. States at step `T` are final.
pub fn cyber_cgsl(p: &CyberParams) -> Result<String> {
    p.validate()?;
    let atk = attacker_actions(p);
    let def = defender_actions(p);
    let joint = atk.len() * def.len() * def.len();
    let clean = Server {
        priv_level: 0,
        scanned: false,
        down: false,
        tampered: false,
        flags: [false; FLAGS],
    };
    let init = World {
        t: 0,
        budget: p.budget,
        pos: p.start,
        servers: [clean; SERVERS],
        sigma: [[0; SERVERS]; 2],
    };

    let mut ids: HashMap<World, usize> = HashMap::from([(init, 0)]);
    let mut order = vec![init];
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let w = order[k];
        if order.len().saturating_mul(joint) > p.max_transitions {
            return Err(Error::Limit(format!(
                "cyber model exceeds {} transitions; reduce T or B, or narrow the targets",
                p.max_transitions
            )));
        }
        let mut row = Vec::with_capacity(joint);
        for (_, a) in &atk {
            for (_, d1) in &def {
                for (_, d2) in &def {
                    let next = step(p, &w, *a, [*d1, *d2])?;
                    let id = *ids.entry(next).or_insert_with(|| {
                        order.push(next);
                        queue.push_back(order.len() - 1);
                        order.len() - 1
                    });
                    row.push(id);
                }
            }
        }
        debug_assert_eq!(succ.len(), k);
        succ.push(row);
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "# cyber {:?} T={} B={} {:?} targets={:?}",
        p.scenario, p.horizon, p.budget, p.heuristic, p.targets
    );
    let _ = writeln!(out, "agents: Attacker, D1, D2");
    let atoms: Vec<String> = (0..SERVERS)
        .map(|i| format!("compromised_{i}"))
        .chain(["budget_left".to_string()])
        .collect();
    let _ = writeln!(out, "atoms: {}", atoms.join(", "));
    let names: Vec<String> = (0..order.len()).map(|k| format!("s{k}")).collect();
    let _ = writeln!(out, "states: {}", names.join(", "));
    let _ = writeln!(out, "initial: s0");
    let finals: Vec<&str> = order
        .iter()
        .zip(&names)
        .filter(|(w, _)| w.t == p.horizon)
        .map(|(_, n)| n.as_str())
        .collect();
    let _ = writeln!(out, "final: {}", finals.join(", "));
    let an: Vec<&str> = atk.iter().map(|(n, _)| n.as_str()).collect();
    let dn: Vec<&str> = def.iter().map(|(n, _)| n.as_str()).collect();
    let _ = writeln!(out, "actions Attacker: {}", an.join(", "));
    let _ = writeln!(out, "actions D1: {}", dn.join(", "));
    let _ = writeln!(out, "actions D2: {}", dn.join(", "));
    for (w, n) in order.iter().zip(&names) {
        let mut labels: Vec<String> = (0..SERVERS)
            .filter(|&i| compromised(p, &w.servers[i]))
            .map(|i| format!("compromised_{i}"))
            .collect();
        if w.budget > 0 {
            labels.push("budget_left".to_string());
        }
        if !labels.is_empty() {
            let _ = writeln!(out, "label {n}: {}", labels.join(", "));
        }
    }
    for (k, row) in succ.iter().enumerate() {
        let mut it = row.iter();
        for a in &an {
            for d1 in &dn {
                for d2 in &dn {
                    let t = it.next().expect("one successor per joint action");
                    let _ = writeln!(out, "trans {} ({a},{d1},{d2}) -> {}", names[k], names[*t]);
                }
            }
        }
    }
    Ok(out)
}

pub fn gen_cyber(p: &CyberParams) -> Result<(String, Cgs)> {
    let text = cyber_cgsl(p)?;
    let g = parse_model(&text)?;
    Ok((text, g))
}

/// Smallest budget in `lo..=hi` for which `holds` is true, by binary
/// search; `holds` must be monotone.
pub fn min_budget_binary(
    lo: u32,
    hi: u32,
    mut holds: impl FnMut(u32) -> Result<bool>,
) -> Result<Option<u32>> {
    if !holds(hi)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// Smallest budget in `lo..=hi` for which `holds` is true, by scanning.
pub fn min_budget_linear(
    lo: u32,
    hi: u32,
    mut holds: impl FnMut(u32) -> Result<bool>,
) -> Result<Option<u32>> {
    for b in lo..=hi {
        if holds(b)? {
            return Ok(Some(b));
        }
    }
    Ok(None)
}
