use std::collections::VecDeque;

use super::explicit::{ExplicitGame, Player};

/// Attractor of `target` for `player` inside the subgame `sub`.
pub fn attractor(
    g: &ExplicitGame,
    pred: &[Vec<usize>],
    sub: &[bool],
    target: &[usize],
    player: Player,
) -> Vec<bool> {
    let mut attr = vec![false; g.len()];
    // Remaining successors inside `sub`, counted lazily for opponent vertices.
    let mut left: Vec<Option<usize>> = vec![None; g.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &t in target {
        if sub[t] && !attr[t] {
            attr[t] = true;
            queue.push_back(t);
        }
    }
    while let Some(w) = queue.pop_front() {
        for &v in &pred[w] {
            if !sub[v] || attr[v] {
                continue;
            }
            let take = if g.owner[v] == player {
                true
            } else {
                let n =
                    left[v].get_or_insert_with(|| g.succ[v].iter().filter(|&&x| sub[x]).count());
                *n -= 1;
                *n == 0
            };
            if take {
                attr[v] = true;
                queue.push_back(v);
            }
        }
    }
    attr
}

/// Winner of every vertex, by Zielonka's recursive algorithm. The second
/// recursive call is unrolled into a loop, so recursion depth is bounded by
/// the number of priorities.
pub fn zielonka(g: &ExplicitGame) -> Vec<Player> {
    let pred = g.predecessors();
    let mut winner = vec![Player::Even; g.len()];
    solve(g, &pred, vec![true; g.len()], &mut winner);
    winner
}

fn solve(g: &ExplicitGame, pred: &[Vec<usize>], mut sub: Vec<bool>, winner: &mut [Player]) {
    loop {
        let Some(p) = (0..g.len())
            .filter(|&v| sub[v])
            .map(|v| g.priority[v])
            .min()
        else {
            return;
        };
        let me = Player::of_priority(p);
        let top: Vec<usize> = (0..g.len())
            .filter(|&v| sub[v] && g.priority[v] == p)
            .collect();
        let a = attractor(g, pred, &sub, &top, me);
        let rest: Vec<bool> = (0..g.len()).map(|v| sub[v] && !a[v]).collect();
        solve(g, pred, rest.clone(), winner);
        let lost: Vec<usize> = (0..g.len())
            .filter(|&v| rest[v] && winner[v] != me)
            .collect();
        if lost.is_empty() {
            for v in 0..g.len() {
                if sub[v] {
                    winner[v] = me;
                }
            }
            return;
        }
        let b = attractor(g, pred, &sub, &lost, me.opponent());
        for v in 0..g.len() {
            if b[v] {
                winner[v] = me.opponent();
                sub[v] = false;
            }
        }
    }
}
