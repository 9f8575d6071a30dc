use std::collections::HashMap;

use super::hoa::{AccCond, HoaAutomaton, LabelExpr};
use super::{AutomatonError, Dpa, Polarity};
use crate::ltlf2dfa::MAX_ATOMS;

/// Acceptance conditions that reduce to parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptanceFamily {
    All,
    None,
    Buchi,
    CoBuchi,
    Parity { min: bool, odd: bool, sets: usize },
}

/// The HOA condition of `parity min|max even|odd sets`.
pub(crate) fn parity_condition(min: bool, odd: bool, sets: usize) -> AccCond {
    let good = |k: usize| (k % 2 == 1) == odd;
    let order: Vec<usize> = if min {
        (0..sets).collect()
    } else {
        (0..sets).rev().collect()
    };
    let Some((&last, rest)) = order.split_last() else {
        // No sets: every run has the default priority.
        let unmarked_good = if min { good(0) } else { !odd };
        return if unmarked_good {
            AccCond::True
        } else {
            AccCond::False
        };
    };
    let mut cond = if good(last) {
        AccCond::Inf(last, false)
    } else {
        AccCond::Fin(last, false)
    };
    for &k in rest.iter().rev() {
        cond = if good(k) {
            AccCond::Or(Box::new(AccCond::Inf(k, false)), Box::new(cond))
        } else {
            AccCond::And(Box::new(AccCond::Fin(k, false)), Box::new(cond))
        };
    }
    cond
}

/// Recognises the acceptance condition of `h` structurally.
pub fn acceptance_family(h: &HoaAutomaton) -> Result<AcceptanceFamily, AutomatonError> {
    let cond = h
        .acceptance
        .as_ref()
        .ok_or_else(|| AutomatonError::hoa(None, "missing acceptance condition"))?;
    let n = h.acc_sets;
    let family = match cond {
        AccCond::True => Some(AcceptanceFamily::All),
        AccCond::False => Some(AcceptanceFamily::None),
        AccCond::Inf(0, false) => Some(AcceptanceFamily::Buchi),
        AccCond::Fin(0, false) => Some(AcceptanceFamily::CoBuchi),
        _ => [(true, false), (true, true), (false, false), (false, true)]
            .into_iter()
            .find(|&(min, odd)| parity_condition(min, odd, n) == *cond)
            .map(|(min, odd)| AcceptanceFamily::Parity { min, odd, sets: n }),
    };
    family.ok_or_else(|| {
        let name = h
            .acc_name
            .as_ref()
            .map(|v| v.join(" "))
            .unwrap_or_else(|| "unnamed".into());
        AutomatonError::Unsupported(format!(
            "acceptance `{name}` ({n} sets: {cond}) is not reducible to parity"
        ))
    })
}

impl AcceptanceFamily {
    fn polarity(self) -> Polarity {
        match self {
            AcceptanceFamily::Parity {
                min: true,
                odd: false,
                ..
            } => Polarity::MinEven,
            AcceptanceFamily::Parity {
                min: true,
                odd: true,
                ..
            } => Polarity::MinOdd,
            // Max priorities are shifted up by one to free 0 for "unmarked",
            // which flips the accepting parity.
            AcceptanceFamily::Parity {
                min: false,
                odd: false,
                ..
            } => Polarity::MaxOdd,
            AcceptanceFamily::Parity {
                min: false,
                odd: true,
                ..
            } => Polarity::MaxEven,
            _ => Polarity::MinEven,
        }
    }

    fn priority(self, marks: &[usize]) -> u32 {
        match self {
            AcceptanceFamily::All => 0,
            AcceptanceFamily::None => 1,
            AcceptanceFamily::Buchi => u32::from(!marks.contains(&0)),
            AcceptanceFamily::CoBuchi => {
                if marks.contains(&0) {
                    1
                } else {
                    2
                }
            }
            AcceptanceFamily::Parity {
                min: true, sets, ..
            } => marks
                .iter()
                .copied()
                .filter(|&m| m < sets)
                .min()
                .unwrap_or(sets) as u32,
            AcceptanceFamily::Parity {
                min: false, sets, ..
            } => marks
                .iter()
                .copied()
                .filter(|&m| m < sets)
                .max()
                .map_or(0, |m| m as u32 + 1),
        }
    }
}

type Row = Vec<Option<(usize, u32)>>;

/// Per state and letter: successor and transition priority.
fn transition_table(
    h: &HoaAutomaton,
    family: AcceptanceFamily,
    n: usize,
) -> Result<Vec<Row>, AutomatonError> {
    let k = h.ap.len();
    let letters = 1usize << k;
    let mut table = vec![vec![None; letters]; n];
    for st in &h.body {
        if st.id >= n {
            return Err(AutomatonError::hoa(
                None,
                format!("state {} out of range", st.id),
            ));
        }
        let implicit = st.label.is_none() && st.edges.iter().all(|e| e.label.is_none());
        if implicit && !st.edges.is_empty() && st.edges.len() != letters {
            return Err(AutomatonError::hoa(
                None,
                format!(
                    "state {} has {} implicitly labelled edges, expected {letters}",
                    st.id,
                    st.edges.len()
                ),
            ));
        }
        for (i, e) in st.edges.iter().enumerate() {
            let mut marks = e.marks.clone();
            marks.extend(&st.marks);
            let prio = family.priority(&marks);
            let label = e.label.as_ref().or(st.label.as_ref());
            for l in 0..letters {
                let fires = match label {
                    Some(expr) => expr.eval(l as u32, &h.aliases)?,
                    None if implicit => l == i,
                    None => {
                        return Err(AutomatonError::hoa(
                            None,
                            format!("unlabelled edge in state {}", st.id),
                        ))
                    }
                };
                if !fires {
                    continue;
                }
                let entry = &mut table[st.id][l];
                match *entry {
                    Some(prev) if prev != (e.target, prio) => {
                        return Err(AutomatonError::Unsupported(format!(
                            "nondeterministic choice in state {}",
                            st.id
                        )));
                    }
                    _ => *entry = Some((e.target, prio)),
                }
            }
        }
    }
    Ok(table)
}

/// Converts a deterministic HOA automaton with parity-reducible acceptance
/// into a complete [`Dpa`] with priorities on states, in its declared
/// polarity.
///
/// With state-based marks priorities carry over. Otherwise states are
/// explored breadth-first and each reachable state takes the priority of
/// its incoming transition, split into one copy per distinct incoming
/// priority. The initial state keeps the first priority that reaches it,
/// or the largest priority if none does. Missing transitions go to a
/// rejecting sink; unreachable states are dropped.
pub fn state_based_priorities(h: &HoaAutomaton) -> Result<Dpa, AutomatonError> {
    let family = acceptance_family(h)?;
    let polarity = family.polarity();
    if h.ap.len() > MAX_ATOMS {
        return Err(AutomatonError::Unsupported(format!(
            "{} atomic propositions",
            h.ap.len()
        )));
    }
    let initial = match h.start.as_slice() {
        [s] => *s,
        [] => return Err(AutomatonError::Unsupported("no initial state".into())),
        _ => return Err(AutomatonError::Unsupported("several initial states".into())),
    };
    let n = h.states.unwrap_or_else(|| {
        h.body
            .iter()
            .map(|s| s.id + 1)
            .chain([initial + 1])
            .max()
            .unwrap_or(0)
    });
    if initial >= n {
        return Err(AutomatonError::hoa(
            None,
            format!("initial state {initial} out of range"),
        ));
    }
    let table = transition_table(h, family, n)?;
    let letters = 1usize << h.ap.len();
    let reject = 1 - polarity.good_parity();
    let sink = n;
    let step = |s: usize, l: usize| {
        if s == sink {
            (sink, reject)
        } else {
            table[s][l].unwrap_or((sink, reject))
        }
    };

    let state_based = h
        .body
        .iter()
        .all(|s| s.edges.iter().all(|e| e.marks.is_empty()));
    if state_based {
        let mut own = vec![family.priority(&[]); n + 1];
        for st in &h.body {
            own[st.id] = family.priority(&st.marks);
        }
        own[sink] = reject;
        let delta = (0..=n)
            .flat_map(|s| (0..letters).map(move |l| (s, l)))
            .map(|(s, l)| step(s, l).0)
            .collect();
        let d = Dpa {
            atoms: h.ap.clone(),
            initial,
            delta,
            priority: own,
            polarity,
        };
        return Ok(d.canonical());
    }

    let fresh = table
        .iter()
        .flatten()
        .flatten()
        .map(|&(_, p)| p)
        .chain([reject])
        .max()
        .unwrap_or(0);
    let mut ids: HashMap<(usize, u32), usize> = HashMap::new();
    let mut nodes: Vec<usize> = vec![initial];
    let mut priority = vec![fresh];
    let mut initial_claimed = false;
    let mut delta = Vec::new();
    let mut next = 0;
    while next < nodes.len() {
        let s = nodes[next];
        next += 1;
        for l in 0..letters {
            let (t, p) = step(s, l);
            let id = match ids.get(&(t, p)) {
                Some(&id) => id,
                None if t == initial && !initial_claimed => {
                    initial_claimed = true;
                    priority[0] = p;
                    ids.insert((t, p), 0);
                    0
                }
                None => {
                    nodes.push(t);
                    priority.push(p);
                    ids.insert((t, p), nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            delta.push(id);
        }
    }
    Ok(Dpa {
        atoms: h.ap.clone(),
        initial: 0,
        delta,
        priority,
        polarity,
    }
    .canonical())
}

impl std::fmt::Display for AccCond {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let child = |c: &AccCond, f: &mut std::fmt::Formatter<'_>| match c {
            AccCond::And(..) | AccCond::Or(..) => write!(f, "({c})"),
            _ => write!(f, "{c}"),
        };
        match self {
            AccCond::True => write!(f, "t"),
            AccCond::False => write!(f, "f"),
            AccCond::Inf(k, neg) => write!(f, "Inf({}{k})", if *neg { "!" } else { "" }),
            AccCond::Fin(k, neg) => write!(f, "Fin({}{k})", if *neg { "!" } else { "" }),
            AccCond::And(a, b) => {
                child(a, f)?;
                write!(f, " & ")?;
                child(b, f)
            }
            AccCond::Or(a, b) => {
                child(a, f)?;
                write!(f, " | ")?;
                child(b, f)
            }
        }
    }
}

impl std::fmt::Display for LabelExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelExpr::True => write!(f, "t"),
            LabelExpr::False => write!(f, "f"),
            LabelExpr::Ap(i) => write!(f, "{i}"),
            LabelExpr::Alias(a) => write!(f, "@{a}"),
            LabelExpr::Not(e) => write!(f, "!({e})"),
            LabelExpr::And(a, b) => write!(f, "({a} & {b})"),
            LabelExpr::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}
