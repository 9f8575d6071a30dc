use std::collections::{BTreeSet, HashMap};

use super::{Dfa, Nfa};

/// Subset construction followed by [`minimize`].
pub fn determinize_minimize(nfa: &Nfa) -> Dfa {
    let letters = 1usize << nfa.atoms.len();
    let mut sets: Vec<BTreeSet<usize>> = vec![nfa.initial.clone()];
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(nfa.initial.clone(), 0)]);
    let mut delta = Vec::new();
    let mut next = 0;
    while next < sets.len() {
        let cur = sets[next].clone();
        for l in 0..letters {
            let target: BTreeSet<usize> = cur
                .iter()
                .flat_map(|&s| nfa.succ[s][l].iter().copied())
                .collect();
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    sets.push(target.clone());
                    index.insert(target, sets.len() - 1);
                    sets.len() - 1
                }
            };
            delta.push(id);
        }
        next += 1;
    }
    let finals = sets
        .iter()
        .map(|s| s.iter().any(|&q| nfa.finals[q]))
        .collect();
    minimize(&Dfa {
        atoms: nfa.atoms.clone(),
        initial: 0,
        finals,
        delta,
    })
}

/// Hopcroft partition refinement on the reachable part; the result is
/// in canonical breadth-first numbering.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let d = dfa.canonical();
    let n = d.state_count();
    let letters = d.letter_count();

    // Predecessor lists per letter.
    let mut pred: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; letters];
    for s in 0..n {
        for (l, row) in pred.iter_mut().enumerate() {
            row[d.step(s, l as u32)].push(s);
        }
    }

    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let (acc, rej): (Vec<usize>, Vec<usize>) = (0..n).partition(|&s| d.finals[s]);
    for part in [acc, rej] {
        if !part.is_empty() {
            for &s in &part {
                block_of[s] = blocks.len();
            }
            blocks.push(part);
        }
    }
    let mut in_work = vec![false; blocks.len()];
    let mut work: Vec<usize> = Vec::new();
    if blocks.len() == 2 {
        let smaller = if blocks[0].len() <= blocks[1].len() {
            0
        } else {
            1
        };
        work.push(smaller);
        in_work[smaller] = true;
    }

    let mut mark = vec![false; n];
    while let Some(a) = work.pop() {
        in_work[a] = false;
        let splitter = blocks[a].clone();
        for row in &pred {
            let mut hit: Vec<usize> = Vec::new();
            for &t in &splitter {
                for &s in &row[t] {
                    if !mark[s] {
                        mark[s] = true;
                        hit.push(s);
                    }
                }
            }
            let touched: BTreeSet<usize> = hit.iter().map(|&s| block_of[s]).collect();
            for y in touched {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[y].iter().partition(|&&s| mark[s]);
                if outside.is_empty() {
                    continue;
                }
                let z = blocks.len();
                for &s in &outside {
                    block_of[s] = z;
                }
                let inside_smaller = inside.len() <= outside.len();
                blocks[y] = inside;
                blocks.push(outside);
                in_work.push(false);
                if in_work[y] {
                    work.push(z);
                    in_work[z] = true;
                } else {
                    let pick = if inside_smaller { y } else { z };
                    work.push(pick);
                    in_work[pick] = true;
                }
            }
            for s in hit {
                mark[s] = false;
            }
        }
    }

    let mut delta = Vec::with_capacity(blocks.len() * letters);
    for b in &blocks {
        let rep = b[0];
        for l in 0..letters {
            delta.push(block_of[d.step(rep, l as u32)]);
        }
    }
    let finals = blocks.iter().map(|b| d.finals[b[0]]).collect();
    Dfa {
        atoms: d.atoms.clone(),
        initial: block_of[d.initial],
        finals,
        delta,
    }
    .canonical()
}
