use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bdd::BddStore;

const ONE_STATE: &str = "\
agents: A
atoms: p
states: s
initial: s
final:
actions A: stay
label s: p
trans s (stay) -> s
";

const WITH_SINK: &str = "\
# two reachable states and an unreachable sink
agents: A, B
atoms: p
states: s0, s1, sink
initial: s0
final: s1
actions A: go, stay
actions B: x
label s1: p
trans s0 (go, x) -> s1
trans s0 (stay, x) -> s0
trans s1 (go, x) -> s0
trans s1 (stay, x) -> s1
trans sink (go, x) -> s0
trans sink (stay, x) -> sink
";

fn setup(g: &Cgs) -> (BddStore, SymbolicCgs) {
    let mut store = SymbolicCgs::new_store(g).unwrap();
    let sg = SymbolicCgs::encode(g, &mut store).unwrap();
    (store, sg)
}

#[test]
fn parses_one_state_model() {
    let g = parse_model(ONE_STATE).unwrap();
    assert_eq!(g.state_count(), 1);
    assert_eq!(g.transitions, vec![0]);
    assert!(g.holds(0, "p"));
}

#[test]
fn one_state_delta_is_valid_conjunct() {
    let g = parse_model(ONE_STATE).unwrap();
    let (mut store, sg) = setup(&g);
    let valid_next = store.rename(sg.valid, &sg.q, &sg.q_next).unwrap();
    let expect = store.and(sg.valid, valid_next).unwrap();
    assert_eq!(sg.delta, expect);
    assert_eq!(sg.reachable(&mut store).unwrap(), sg.initial);
}

#[test]
fn missing_transition_is_reported() {
    let text = WITH_SINK.replace("trans sink (stay, x) -> sink\n", "");
    let err = parse_model(&text).unwrap_err();
    assert!(
        err.message.contains("transition function not total"),
        "{err}"
    );
    assert!(err.message.contains("sink"));
}

#[test]
fn reference_errors_carry_lines() {
    let cases = [
        (
            WITH_SINK.replace("trans s0 (go, x) -> s1", "trans s0 (go, x) -> s9"),
            10,
            "undefined state",
        ),
        (
            WITH_SINK.replace("trans s0 (go, x) -> s1", "trans s0 (jump, x) -> s1"),
            10,
            "undefined action",
        ),
        (
            WITH_SINK.replace("label s1: p", "label s1: z"),
            9,
            "undefined atom",
        ),
        (
            WITH_SINK.replace("actions B: x", "actions B: x\nactions B: y"),
            9,
            "duplicate actions",
        ),
        (
            WITH_SINK.replace("trans s1 (stay, x) -> s1", "trans s0 (stay, x) -> s1"),
            13,
            "duplicate transition",
        ),
        (
            WITH_SINK.replace("states: s0, s1, sink", "states: s0, s1, s1"),
            4,
            "duplicate state",
        ),
        (
            WITH_SINK.replace("atoms: p", "atoms: p\natoms: q"),
            4,
            "duplicate `atoms`",
        ),
    ];
    for (text, line, needle) in cases {
        let err = parse_model(&text).unwrap_err();
        assert_eq!(err.line, Some(line), "{err}");
        assert!(err.message.contains(needle), "{err}");
    }
}

#[test]
fn reserved_atom_prefix_rejected() {
    let text = ONE_STATE.replace("atoms: p", "atoms: __sub1, p");
    let err = parse_model(&text).unwrap_err();
    assert!(err.message.contains("reserved"));
}

#[test]
fn printer_round_trips() {
    let g = parse_model(WITH_SINK).unwrap();
    assert_eq!(parse_model(&g.to_cgsl()).unwrap(), g);
}

#[test]
fn valid_set_counts_states() {
    let g = parse_model(WITH_SINK).unwrap();
    let (store, sg) = setup(&g);
    assert_eq!(store.sat_count(sg.valid, &sg.q).unwrap(), 3);
}

#[test]
fn reachable_excludes_sink() {
    let g = parse_model(WITH_SINK).unwrap();
    let (mut store, sg) = setup(&g);
    let r = sg.reachable(&mut store).unwrap();
    assert_eq!(sg.decode_states(&mut store, r).unwrap(), vec![0, 1]);
    let mut explicit = g.reachable_states();
    explicit.sort();
    assert_eq!(explicit, vec![0, 1]);
}

#[test]
fn labels_and_finals_encoded() {
    let g = parse_model(WITH_SINK).unwrap();
    let (mut store, sg) = setup(&g);
    let p = sg.label("p").unwrap();
    assert_eq!(sg.decode_states(&mut store, p).unwrap(), vec![1]);
    assert_eq!(sg.decode_states(&mut store, sg.finals).unwrap(), vec![1]);
}

#[test]
fn coalition_action_blocks() {
    let text = "\
agents: a1, a2
states: s
initial: s
actions a1: x, y, z
actions a2: x, y, z
";
    let mut text = text.to_string();
    for i in ["x", "y", "z"] {
        for j in ["x", "y", "z"] {
            text.push_str(&format!("trans s ({i},{j}) -> s\n"));
        }
    }
    let g = parse_model(&text).unwrap();
    let (mut store, sg) = setup(&g);

    let (vars, act) = sg.coalition_actions(&mut store, &Coalition::new()).unwrap();
    assert!(vars.is_empty());
    assert!(act.is_true());

    let all: Coalition = ["a1", "a2"].iter().map(|s| s.to_string()).collect();
    let (vars, _) = sg.coalition_actions(&mut store, &all).unwrap();
    assert_eq!(vars, sg.all_action_vars());

    let one: Coalition = BTreeSet::from(["a1".to_string()]);
    let (vars, act) = sg.coalition_actions(&mut store, &one).unwrap();
    assert_eq!(vars.len(), 2);
    assert_eq!(store.sat_count(act, &vars).unwrap(), 3);

    let bad: Coalition = BTreeSet::from(["nobody".to_string()]);
    assert!(sg.coalition_actions(&mut store, &bad).is_err());
}

fn random_params(states: usize) -> RandomModelParams {
    RandomModelParams {
        states,
        agents: 2,
        max_actions: 3,
        atoms: 2,
        final_prob: 0.3,
        label_prob: 0.5,
    }
}

/// Decodes every minterm of δ and compares against the explicit table.
fn check_encoding(g: &Cgs) {
    let (mut store, sg) = setup(g);
    let mut vars = sg.q.clone();
    vars.extend(&sg.q_next);
    let action_vars = sg.all_action_vars();
    vars.extend(&action_vars);
    let mut seen = BTreeSet::new();
    store
        .for_each_minterm(sg.delta, &vars, |bits| {
            let value = |range: std::ops::Range<usize>| {
                bits[range]
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (i, &b)| acc | (b as usize) << i)
            };
            let qn = sg.q.len();
            let s = value(0..qn);
            let t = value(qn..2 * qn);
            let mut offset = 2 * qn;
            let mut choice = Vec::new();
            for block in &sg.actions {
                choice.push(value(offset..offset + block.len()));
                offset += block.len();
            }
            assert!(s < g.state_count());
            assert_eq!(t, g.successor(s, g.joint_index(&choice)));
            seen.insert((s, g.joint_index(&choice)));
        })
        .unwrap();
    assert_eq!(seen.len(), g.state_count() * g.joint_count());

    // Determinism audit: every valid (q, a) has exactly one successor.
    let total = store.sat_count(sg.delta, &vars).unwrap();
    assert_eq!(total as usize, g.state_count() * g.joint_count());
    let enabled = store.exists(&sg.q_next, sg.delta).unwrap();
    let all_valid = store.and_all(sg.action_valid.iter().copied()).unwrap();
    let domain = store.and(sg.valid, all_valid).unwrap();
    assert_eq!(enabled, domain);
}

#[test]
fn encoding_matches_explicit_table_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in (1..=64).step_by(3) {
        let g = random_cgs(&mut rng, random_params(n));
        check_encoding(&g);
        assert_eq!(parse_model(&g.to_cgsl()).unwrap(), g);
    }
}

#[test]
fn symbolic_reachability_matches_bfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let mut g = random_cgs(&mut rng, random_params(20));
        // Sparse transitions so that reachability is non-trivial.
        let last = g.state_count() - 1;
        for t in g.transitions.iter_mut() {
            *t = (*t % 5).min(last);
        }
        let (mut store, sg) = setup(&g);
        let r = sg.reachable(&mut store).unwrap();
        let mut expect = g.reachable_states();
        expect.sort();
        assert_eq!(sg.decode_states(&mut store, r).unwrap(), expect);
    }
}

#[test]
fn reachability_monotone_under_added_actions() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let g = random_cgs(&mut rng, random_params(16));
        let mut h = g.clone();
        // An extra action for the first agent; old joint actions keep their targets.
        let old_j = g.joint_count();
        h.actions[0].push("extra".into());
        let new_j = h.joint_count();
        let mut table = vec![0; h.state_count() * new_j];
        for s in 0..h.state_count() {
            for joint in 0..new_j {
                let choice = h.decode_joint(joint);
                table[s * new_j + joint] = if choice[0] < g.actions[0].len() {
                    g.transitions[s * old_j + g.joint_index(&choice)]
                } else {
                    rng.gen_range(0..h.state_count())
                };
            }
        }
        h.transitions = table;
        h.validate().unwrap();
        let before: BTreeSet<usize> = g.reachable_states().into_iter().collect();
        let (mut store, sg) = setup(&h);
        let r = sg.reachable(&mut store).unwrap();
        let after: BTreeSet<usize> = sg
            .decode_states(&mut store, r)
            .unwrap()
            .into_iter()
            .collect();
        assert!(before.is_subset(&after));
    }
}
