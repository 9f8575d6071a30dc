use std::collections::{BTreeSet, HashMap};

use super::{Cgs, ModelError};
use crate::formula::FRESH_PREFIX;

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_atom_name(s: &str) -> bool {
    is_ident(s) && s.starts_with(|c: char| c.is_ascii_lowercase())
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

#[derive(Default)]
struct Raw<'a> {
    agents: Option<(usize, Vec<&'a str>)>,
    atoms: Option<(usize, Vec<&'a str>)>,
    states: Option<(usize, Vec<&'a str>)>,
    initial: Option<(usize, &'a str)>,
    finals: Option<(usize, Vec<&'a str>)>,
    actions: Vec<(usize, &'a str, Vec<&'a str>)>,
    labels: Vec<(usize, &'a str, Vec<&'a str>)>,
    trans: Vec<(usize, &'a str, Vec<&'a str>, &'a str)>,
}

fn set_once<T>(
    slot: &mut Option<(usize, T)>,
    line: usize,
    value: T,
    what: &str,
) -> Result<(), ModelError> {
    if let Some((prev, _)) = slot {
        return Err(ModelError::new(
            Some(line),
            format!("duplicate `{what}` section (first on line {prev})"),
        ));
    }
    *slot = Some((line, value));
    Ok(())
}

fn lex_lines(text: &str) -> Result<Raw<'_>, ModelError> {
    let mut raw = Raw::default();
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let body = full.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |m: String| ModelError::new(Some(line), m);
        let keyword_end = body
            .find(|c: char| c.is_whitespace() || c == ':')
            .unwrap_or(body.len());
        let (keyword, rest) = body.split_at(keyword_end);
        match keyword {
            "trans" => {
                let open = rest
                    .find('(')
                    .ok_or_else(|| err("expected `(` in transition".into()))?;
                let close = rest
                    .find(')')
                    .ok_or_else(|| err("expected `)` in transition".into()))?;
                if close < open {
                    return Err(err("malformed joint action".into()));
                }
                let src = rest[..open].trim();
                let acts = split_list(&rest[open + 1..close]);
                let tail = rest[close + 1..].trim();
                let dst = tail
                    .strip_prefix("->")
                    .ok_or_else(|| err("expected `->` after joint action".into()))?
                    .trim();
                if !is_ident(src) || !is_ident(dst) {
                    return Err(err(
                        "malformed transition; expected `trans <state> (<actions>) -> <state>`"
                            .into(),
                    ));
                }
                raw.trans.push((line, src, acts, dst));
            }
            "agents" | "atoms" | "states" | "initial" | "final" | "actions" | "label" => {
                let colon = rest
                    .find(':')
                    .ok_or_else(|| err(format!("expected `:` after `{keyword}`")))?;
                let head = rest[..colon].trim();
                let items = split_list(&rest[colon + 1..]);
                let needs_head = matches!(keyword, "actions" | "label");
                if needs_head && !is_ident(head) {
                    return Err(err(format!("expected a name between `{keyword}` and `:`")));
                }
                if !needs_head && !head.is_empty() {
                    return Err(err(format!("unexpected `{head}` before `:`")));
                }
                if let Some(bad) = items.iter().find(|t| !is_ident(t)) {
                    return Err(err(format!("invalid identifier `{bad}`")));
                }
                match keyword {
                    "agents" => set_once(&mut raw.agents, line, items, keyword)?,
                    "atoms" => set_once(&mut raw.atoms, line, items, keyword)?,
                    "states" => set_once(&mut raw.states, line, items, keyword)?,
                    "final" => set_once(&mut raw.finals, line, items, keyword)?,
                    "initial" => {
                        if items.len() != 1 {
                            return Err(err("`initial` takes exactly one state".into()));
                        }
                        set_once(&mut raw.initial, line, items[0], keyword)?
                    }
                    "actions" => raw.actions.push((line, head, items)),
                    _ => raw.labels.push((line, head, items)),
                }
            }
            other => return Err(err(format!("unknown declaration `{other}`"))),
        }
    }
    Ok(raw)
}

fn index_names<'a>(
    names: &[&'a str],
    line: usize,
    what: &str,
) -> Result<HashMap<&'a str, usize>, ModelError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(*n, i).is_some() {
            return Err(ModelError::new(
                Some(line),
                format!("duplicate {what} `{n}`"),
            ));
        }
    }
    Ok(map)
}

/// Parses and validates CGSL text.
pub fn parse_model(text: &str) -> Result<Cgs, ModelError> {
    let raw = lex_lines(text)?;
    let missing = |what: &str| ModelError::new(None, format!("missing `{what}` section"));
    let (agents_line, agents) = raw.agents.ok_or_else(|| missing("agents"))?;
    let (atoms_line, atoms) = raw.atoms.unwrap_or((0, Vec::new()));
    let (states_line, states) = raw.states.ok_or_else(|| missing("states"))?;
    let (initial_line, initial) = raw.initial.ok_or_else(|| missing("initial"))?;

    if agents.is_empty() {
        return Err(ModelError::new(
            Some(agents_line),
            "at least one agent is required",
        ));
    }
    if states.is_empty() {
        return Err(ModelError::new(
            Some(states_line),
            "at least one state is required",
        ));
    }
    let agent_ix = index_names(&agents, agents_line, "agent")?;
    let atom_ix = index_names(&atoms, atoms_line, "atom")?;
    let state_ix = index_names(&states, states_line, "state")?;
    for a in &atoms {
        if a.starts_with(FRESH_PREFIX) {
            return Err(ModelError::new(
                Some(atoms_line),
                format!("atom `{a}` uses the reserved prefix `{FRESH_PREFIX}`"),
            ));
        }
        if !is_atom_name(a) {
            return Err(ModelError::new(
                Some(atoms_line),
                format!("atom `{a}` must start with a lowercase letter"),
            ));
        }
    }
    let lookup_state = |name: &str, line: usize| {
        state_ix
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::new(Some(line), format!("undefined state `{name}`")))
    };

    let initial = lookup_state(initial, initial_line)?;
    let mut finals = BTreeSet::new();
    if let Some((line, names)) = &raw.finals {
        for n in names {
            if !finals.insert(lookup_state(n, *line)?) {
                return Err(ModelError::new(
                    Some(*line),
                    format!("duplicate final state `{n}`"),
                ));
            }
        }
    }

    let mut actions: Vec<Option<(usize, Vec<String>)>> = vec![None; agents.len()];
    let mut action_ix: Vec<HashMap<&str, usize>> = vec![HashMap::new(); agents.len()];
    for (line, agent, acts) in &raw.actions {
        let i = *agent_ix.get(agent).ok_or_else(|| {
            ModelError::new(
                Some(*line),
                format!("actions declared for undefined agent `{agent}`"),
            )
        })?;
        if let Some((prev, _)) = &actions[i] {
            return Err(ModelError::new(
                Some(*line),
                format!("duplicate actions for agent `{agent}` (first on line {prev})"),
            ));
        }
        if acts.is_empty() {
            return Err(ModelError::new(
                Some(*line),
                format!("agent `{agent}` needs at least one action"),
            ));
        }
        action_ix[i] = index_names(acts, *line, "action")?;
        actions[i] = Some((*line, acts.iter().map(|s| s.to_string()).collect()));
    }
    let actions: Vec<Vec<String>> = actions
        .into_iter()
        .zip(&agents)
        .map(|(a, name)| {
            a.map(|(_, v)| v).ok_or_else(|| {
                ModelError::new(None, format!("no actions declared for agent `{name}`"))
            })
        })
        .collect::<Result<_, _>>()?;

    let mut labels = vec![BTreeSet::new(); states.len()];
    let mut labelled = vec![None; states.len()];
    for (line, state, atoms_here) in &raw.labels {
        let s = lookup_state(state, *line)?;
        if let Some(prev) = labelled[s].replace(*line) {
            return Err(ModelError::new(
                Some(*line),
                format!("duplicate label for state `{state}` (first on line {prev})"),
            ));
        }
        for a in atoms_here {
            let ai = *atom_ix
                .get(a)
                .ok_or_else(|| ModelError::new(Some(*line), format!("undefined atom `{a}`")))?;
            labels[s].insert(ai);
        }
    }

    let joint_count: usize = actions.iter().map(|a| a.len()).product();
    let mut table: Vec<Option<(usize, usize)>> = vec![None; states.len() * joint_count];
    for (line, src, acts, dst) in &raw.trans {
        let s = lookup_state(src, *line)?;
        let t = lookup_state(dst, *line)?;
        if acts.len() != agents.len() {
            return Err(ModelError::new(
                Some(*line),
                format!(
                    "joint action has {} components, expected {}",
                    acts.len(),
                    agents.len()
                ),
            ));
        }
        let mut joint = 0;
        let mut radix = 1;
        for (i, a) in acts.iter().enumerate() {
            let ai = *action_ix[i].get(a).ok_or_else(|| {
                ModelError::new(
                    Some(*line),
                    format!("undefined action `{a}` for agent `{}`", agents[i]),
                )
            })?;
            joint += ai * radix;
            radix *= actions[i].len();
        }
        let slot = &mut table[s * joint_count + joint];
        if let Some((prev, _)) = slot {
            return Err(ModelError::new(
                Some(*line),
                format!("duplicate transition (first on line {prev})"),
            ));
        }
        *slot = Some((*line, t));
    }
    let mut transitions = Vec::with_capacity(table.len());
    for (k, entry) in table.iter().enumerate() {
        match entry {
            Some((_, t)) => transitions.push(*t),
            None => {
                let (s, joint) = (k / joint_count, k % joint_count);
                let mut names = Vec::new();
                let mut j = joint;
                for acts in &actions {
                    names.push(acts[j % acts.len()].as_str());
                    j /= acts.len();
                }
                return Err(ModelError::new(
                    None,
                    format!(
                        "transition function not total: no transition for state `{}` and ({})",
                        states[s],
                        names.join(",")
                    ),
                ));
            }
        }
    }

    let g = Cgs {
        agents: agents.iter().map(|s| s.to_string()).collect(),
        atoms: atoms.iter().map(|s| s.to_string()).collect(),
        states: states.iter().map(|s| s.to_string()).collect(),
        initial,
        finals,
        actions,
        transitions,
        labels,
    };
    g.validate()?;
    Ok(g)
}
