use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cgs::{parse_model, random_cgs, Cgs, RandomModelParams};
use crate::error::Error;
use crate::formula::{eval_finite_trace, parse_formula};

fn coalition(names: &[&str]) -> Coalition {
    names.iter().map(|s| s.to_string()).collect()
}

fn symbolic(g: &Cgs, a: &Coalition, psi: &str) -> BTreeSet<usize> {
    let mut store = SymbolicCgs::new_store(g).unwrap();
    let sg = SymbolicCgs::encode(g, &mut store).unwrap();
    let (win, _) = game_solving(
        &mut store,
        &sg,
        a,
        &parse_formula(psi).unwrap(),
        None,
        &Deadline::none(),
    )
    .unwrap();
    sg.decode_states(&mut store, win)
        .unwrap()
        .into_iter()
        .collect()
}

fn explicit(g: &Cgs, a: &Coalition, psi: &str) -> BTreeSet<usize> {
    explicit_game_solving(
        g,
        a,
        &parse_formula(psi).unwrap(),
        &ExplicitLabels::new(),
        None,
        1 << 20,
        &Deadline::none(),
    )
    .unwrap()
}

/// Brute force over histories: from history `h` the coalition survives
/// `depth` more steps iff a final last state satisfies `psi` on `h`, and
/// some coalition choice keeps every successor history surviving.
/// The formula is evaluated directly on the history's labels.
fn history_oracle(g: &Cgs, a: &Coalition, psi: &Formula, start: usize, depth: usize) -> bool {
    let members = g.coalition_indices(a).unwrap();
    let mut moves: Vec<Vec<BTreeSet<usize>>> = Vec::new();
    for q in 0..g.state_count() {
        let mut by: HashMap<Vec<usize>, BTreeSet<usize>> = HashMap::new();
        for j in 0..g.joint_count() {
            let c = g.decode_joint(j);
            by.entry(members.iter().map(|&m| c[m]).collect())
                .or_default()
                .insert(g.successor(q, j));
        }
        moves.push(by.into_values().collect());
    }
    fn rec(
        g: &Cgs,
        moves: &[Vec<BTreeSet<usize>>],
        psi: &Formula,
        h: &mut Vec<usize>,
        depth: usize,
    ) -> bool {
        let last = *h.last().unwrap();
        if g.finals.contains(&last) {
            let trace: Vec<BTreeSet<String>> = h
                .iter()
                .map(|&q| g.labels[q].iter().map(|&i| g.atoms[i].clone()).collect())
                .collect();
            if !eval_finite_trace(psi, &trace, 0).unwrap() {
                return false;
            }
        }
        if depth == 0 {
            return true;
        }
        moves[last].iter().any(|targets| {
            targets.iter().all(|&t| {
                h.push(t);
                let ok = rec(g, moves, psi, h, depth - 1);
                h.pop();
                ok
            })
        })
    }
    rec(g, &moves, psi, &mut vec![start], depth)
}

const LEFT_RIGHT: &str = "\
agents: A, B
atoms: p
states: s0, s1, s2
initial: s0
final: s1, s2
actions A: left, right
actions B: x, y
label s1: p
trans s0 (left, x) -> s1
trans s0 (left, y) -> s1
trans s0 (right, x) -> s1
trans s0 (right, y) -> s2
trans s1 (left, x) -> s1
trans s1 (left, y) -> s1
trans s1 (right, x) -> s1
trans s1 (right, y) -> s1
trans s2 (left, x) -> s2
trans s2 (left, y) -> s2
trans s2 (right, x) -> s2
trans s2 (right, y) -> s2
";

#[test]
fn coalition_must_pick_left() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    assert_eq!(
        symbolic(&g, &coalition(&["A"]), "F p"),
        BTreeSet::from([0, 1])
    );
    assert_eq!(
        symbolic(&g, &coalition(&["B"]), "F p"),
        BTreeSet::from([0, 1])
    );
    assert_eq!(symbolic(&g, &coalition(&[]), "F p"), BTreeSet::from([1]));
    for a in [coalition(&["A"]), coalition(&["B"]), coalition(&[])] {
        assert_eq!(symbolic(&g, &a, "F p"), explicit(&g, &a, "F p"));
    }
}

#[test]
fn safety_fixpoint_matches_attractor_on_hand_product() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let dfa = translate(&parse_formula("F p").unwrap()).unwrap();
    let sd = encode_dfa(&dfa, &sg, &mut store).unwrap();
    let reach = sg.reachable(&mut store).unwrap();
    let p = build_product(
        &mut store,
        &sg,
        &sd,
        &coalition(&["A"]),
        reach,
        &Deadline::none(),
    )
    .unwrap();
    let r = solve_safety(&mut store, &p, &Deadline::none()).unwrap();
    // s2 with F p still pending is the only unsafe node; A avoids it by
    // moving left at s0.
    let fixed = r.fixpoint;
    let mut vars = p.q.clone();
    vars.extend(&p.s);
    assert_eq!(store.sat_count(fixed, &vars).unwrap(), 2);
    let reach_count = store.sat_count(p.reachable, &vars).unwrap();
    assert_eq!(reach_count, 3);
    assert!(r.iterations as u128 <= reach_count + 1);
}

#[test]
fn no_final_states_makes_everything_safe() {
    let g = parse_model(&LEFT_RIGHT.replace("final: s1, s2\n", "")).unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let dfa = translate(&parse_formula("G false").unwrap()).unwrap();
    let sd = encode_dfa(&dfa, &sg, &mut store).unwrap();
    let reach = sg.reachable(&mut store).unwrap();
    let p = build_product(
        &mut store,
        &sg,
        &sd,
        &coalition(&[]),
        reach,
        &Deadline::none(),
    )
    .unwrap();
    assert_eq!(p.safe, p.reachable);
    let r = solve_safety(&mut store, &p, &Deadline::none()).unwrap();
    assert_eq!(r.iterations, 1);
    assert_eq!(r.fixpoint, p.safe);
}

#[test]
fn one_final_state_with_true() {
    let g = parse_model(
        "agents: A\natoms: p\nstates: s\ninitial: s\nfinal: s\nactions A: a\ntrans s (a) -> s\n",
    )
    .unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let dfa = translate(&Formula::True).unwrap();
    let sd = encode_dfa(&dfa, &sg, &mut store).unwrap();
    let reach = sg.reachable(&mut store).unwrap();
    let p = build_product(
        &mut store,
        &sg,
        &sd,
        &coalition(&["A"]),
        reach,
        &Deadline::none(),
    )
    .unwrap();
    assert_eq!(p.safe, p.reachable);
    assert_eq!(
        symbolic(&g, &coalition(&["A"]), "true"),
        BTreeSet::from([0])
    );
    assert_eq!(
        explicit(&g, &coalition(&["A"]), "true"),
        BTreeSet::from([0])
    );
}

#[test]
fn empty_safe_set_gives_empty_fixpoint() {
    let g = parse_model(
        "agents: A\natoms: p\nstates: s\ninitial: s\nfinal: s\nactions A: a\ntrans s (a) -> s\n",
    )
    .unwrap();
    assert!(symbolic(&g, &coalition(&["A"]), "false").is_empty());
    assert!(symbolic(&g, &coalition(&["A"]), "p").is_empty());
}

#[test]
fn adversary_in_control_defeats_the_coalition() {
    // B alone decides whether the run ends in a `p` state or not.
    let model = "\
agents: A, B
atoms: p
states: s0, good, bad
initial: s0
final: good, bad
actions A: a, b
actions B: x, y
label good: p
trans s0 (a, x) -> good
trans s0 (b, x) -> good
trans s0 (a, y) -> bad
trans s0 (b, y) -> bad
trans good (a, x) -> good
trans good (b, x) -> good
trans good (a, y) -> good
trans good (b, y) -> good
trans bad (a, x) -> bad
trans bad (b, x) -> bad
trans bad (a, y) -> bad
trans bad (b, y) -> bad
";
    let g = parse_model(model).unwrap();
    let a = coalition(&["A"]);
    let f = parse_formula("F p").unwrap();
    assert!(!symbolic(&g, &a, "F p").contains(&0));
    assert!(!explicit(&g, &a, "F p").contains(&0));
    assert!(!history_oracle(&g, &a, &f, 0, 9));
    assert!(symbolic(&g, &coalition(&["B"]), "F p").contains(&0));
}

#[test]
fn explicit_limit_is_reported() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    let err = explicit_game_solving(
        &g,
        &coalition(&["A"]),
        &parse_formula("F p").unwrap(),
        &ExplicitLabels::new(),
        None,
        2,
        &Deadline::none(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Limit(_)));
}

#[test]
fn unknown_agent_is_an_error() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let f = parse_formula("F p").unwrap();
    assert!(game_solving(
        &mut store,
        &sg,
        &coalition(&["Z"]),
        &f,
        None,
        &Deadline::none()
    )
    .is_err());
    assert!(explicit_game_solving(
        &g,
        &coalition(&["Z"]),
        &f,
        &ExplicitLabels::new(),
        None,
        100,
        &Deadline::none()
    )
    .is_err());
}

#[test]
fn expired_deadline_times_out() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let d = Deadline::after(std::time::Duration::ZERO);
    let err = game_solving(
        &mut store,
        &sg,
        &coalition(&["A"]),
        &parse_formula("F p").unwrap(),
        None,
        &d,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Timeout(_)));
}

/// Pure LTLf formulas used against the random models.
const FORMULAS: [&str; 10] = [
    "F p",
    "G q",
    "p U q",
    "X p",
    "!X true",
    "G (p -> X q)",
    "F (p & X F q)",
    "G !p | F (q & r)",
    "F p & F q",
    "X (p U (q & !r))",
];

fn random_model(rng: &mut ChaCha8Rng, max_states: usize, max_actions: usize) -> Cgs {
    let states = rng.gen_range(1..=max_states);
    let final_prob = rng.gen_range(0.1..0.9);
    random_cgs(
        rng,
        RandomModelParams {
            states,
            agents: 2,
            max_actions,
            atoms: 3,
            final_prob,
            label_prob: 0.4,
        },
    )
}

#[test]
fn symbolic_matches_explicit_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let coalitions = [
        coalition(&[]),
        coalition(&["A"]),
        coalition(&["B"]),
        coalition(&["A", "B"]),
    ];
    for i in 0..200 {
        let g = random_model(&mut rng, 32, 3);
        let a = &coalitions[i % 4];
        for psi in FORMULAS {
            assert_eq!(
                symbolic(&g, a, psi),
                explicit(&g, a, psi),
                "{psi} for {a:?} on\n{}",
                g.to_cgsl()
            );
        }
    }
}

#[test]
fn symbolic_matches_history_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coalitions = [coalition(&[]), coalition(&["A"]), coalition(&["A", "B"])];
    for i in 0..30 {
        let g = random_model(&mut rng, 3, 2);
        let a = &coalitions[i % 3];
        for psi in FORMULAS {
            let f = parse_formula(psi).unwrap();
            let depth = g.state_count() * translate(&f).unwrap().state_count();
            let got = symbolic(&g, a, psi);
            for q in g.reachable_states() {
                assert_eq!(
                    got.contains(&q),
                    history_oracle(&g, a, &f, q, depth),
                    "{psi} at s{q} for {a:?} on\n{}",
                    g.to_cgsl()
                );
            }
        }
    }
}

#[test]
fn strategic_power_is_monotone_in_the_coalition() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let g = random_model(&mut rng, 12, 3);
        for psi in FORMULAS {
            let none = symbolic(&g, &coalition(&[]), psi);
            let some = symbolic(&g, &coalition(&["A"]), psi);
            let all = symbolic(&g, &coalition(&["A", "B"]), psi);
            assert!(none.is_subset(&some) && some.is_subset(&all), "{psi}");
        }
    }
}

#[test]
fn empty_coalition_quantifies_over_all_paths() {
    // With nobody choosing, a state wins iff every finite path from it
    // that ends in a final state satisfies the formula.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let g = random_cgs(
            &mut rng,
            RandomModelParams {
                states: 8,
                agents: 2,
                max_actions: 2,
                atoms: 3,
                final_prob: 0.4,
                label_prob: 0.5,
            },
        );
        for psi in FORMULAS {
            let f = parse_formula(psi).unwrap();
            let depth = g.state_count() * translate(&f).unwrap().state_count();
            let got = symbolic(&g, &coalition(&[]), psi);
            assert_eq!(got, explicit(&g, &coalition(&[]), psi));
            for q in g.reachable_states() {
                assert_eq!(
                    got.contains(&q),
                    history_oracle(&g, &coalition(&[]), &f, q, depth.min(10)),
                    "{psi} at s{q}"
                );
            }
        }
    }
}

#[test]
fn sources_restrict_the_answer() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let only_s1 = sg.encode_states(&mut store, [1]).unwrap();
    let f = parse_formula("F p").unwrap();
    let (win, stats) = game_solving(
        &mut store,
        &sg,
        &coalition(&["A"]),
        &f,
        Some(only_s1),
        &Deadline::none(),
    )
    .unwrap();
    assert_eq!(sg.decode_states(&mut store, win).unwrap(), vec![1]);
    assert_eq!(stats.automaton_states, 2);
    let e = explicit_game_solving(
        &g,
        &coalition(&["A"]),
        &f,
        &ExplicitLabels::new(),
        Some(&[1]),
        100,
        &Deadline::none(),
    )
    .unwrap();
    assert_eq!(e, BTreeSet::from([1]));
}

#[test]
fn fresh_atoms_are_resolved_in_both_engines() {
    let g = parse_model(LEFT_RIGHT).unwrap();
    let mut store = SymbolicCgs::new_store(&g).unwrap();
    let mut sg = SymbolicCgs::encode(&g, &mut store).unwrap();
    let set = sg.encode_states(&mut store, [2]).unwrap();
    sg.label_fresh("__sub_x", set);
    let f = parse_formula("F __sub_x").unwrap();
    let (win, _) = game_solving(
        &mut store,
        &sg,
        &coalition(&["B"]),
        &f,
        None,
        &Deadline::none(),
    )
    .unwrap();
    let labels = ExplicitLabels::from([("__sub_x".to_string(), BTreeSet::from([2]))]);
    let e = explicit_game_solving(
        &g,
        &coalition(&["B"]),
        &f,
        &labels,
        None,
        100,
        &Deadline::none(),
    )
    .unwrap();
    assert_eq!(
        sg.decode_states(&mut store, win)
            .unwrap()
            .into_iter()
            .collect::<BTreeSet<_>>(),
        e
    );
    assert_eq!(e, BTreeSet::from([2]));
}
