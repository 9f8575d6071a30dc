use std::collections::{BTreeSet, HashMap};

use super::{Nfa, MAX_ATOMS};
use crate::formula::{nnf, Formula, FormulaError};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(u32, u32),
    Or(u32, u32),
    Next(u32),
    WeakNext(u32),
    Until(u32, u32),
    Release(u32, u32),
}

/// A pending obligation on the rest of the trace.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Obligation {
    id: u32,
    strong: bool,
}

type Clause = BTreeSet<Obligation>;
type Dnf = Vec<Clause>;

struct Progression {
    nodes: Vec<Node>,
    ids: HashMap<Node, u32>,
    memo: HashMap<(u32, u32), Dnf>,
}

impl Progression {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.ids.insert(n, id);
        id
    }

    fn build(&mut self, f: &Formula, atoms: &[String]) -> u32 {
        use Formula::*;
        let n = match f {
            True => Node::True,
            False => Node::False,
            Atom(p) => Node::Lit(atoms.iter().position(|a| a == p).unwrap() as u32, true),
            Not(inner) => match inner.as_ref() {
                Atom(p) => Node::Lit(atoms.iter().position(|a| a == p).unwrap() as u32, false),
                _ => unreachable!("negation normal form"),
            },
            And(a, b) => Node::And(self.build(a, atoms), self.build(b, atoms)),
            Or(a, b) => Node::Or(self.build(a, atoms), self.build(b, atoms)),
            Next(a) => Node::Next(self.build(a, atoms)),
            WeakNext(a) => Node::WeakNext(self.build(a, atoms)),
            Until(a, b) => Node::Until(self.build(a, atoms), self.build(b, atoms)),
            Release(a, b) => Node::Release(self.build(a, atoms), self.build(b, atoms)),
            Finally(_) | Globally(_) | Strategic(..) => unreachable!("negation normal form"),
        };
        self.intern(n)
    }

    fn obligation(&self, id: u32, strong: bool) -> Option<Clause> {
        // `X false` can never be met; weak `X true` is no obligation.
        match (self.nodes[id as usize], strong) {
            (Node::False, true) => None,
            (Node::True, false) => Some(Clause::new()),
            _ => Some(Clause::from([Obligation { id, strong }])),
        }
    }

    fn product(a: &Dnf, b: &Dnf) -> Dnf {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                let mut c = x.clone();
                c.extend(y.iter().copied());
                out.push(c);
            }
        }
        simplify(out)
    }

    /// The ways `id` can hold at the current position given `letter`, each
    /// as the obligations it leaves for the next position.
    fn expand(&mut self, id: u32, letter: u32) -> Dnf {
        if let Some(d) = self.memo.get(&(id, letter)) {
            return d.clone();
        }
        let d = match self.nodes[id as usize] {
            Node::True => vec![Clause::new()],
            Node::False => vec![],
            Node::Lit(i, pos) => {
                if (letter >> i & 1 == 1) == pos {
                    vec![Clause::new()]
                } else {
                    vec![]
                }
            }
            Node::And(a, b) => {
                let (x, y) = (self.expand(a, letter), self.expand(b, letter));
                Self::product(&x, &y)
            }
            Node::Or(a, b) => {
                let mut x = self.expand(a, letter);
                x.extend(self.expand(b, letter));
                simplify(x)
            }
            Node::Next(a) => self.obligation(a, true).into_iter().collect(),
            Node::WeakNext(a) => self.obligation(a, false).into_iter().collect(),
            Node::Until(a, b) => {
                let mut out = self.expand(b, letter);
                let x = self.expand(a, letter);
                let stay: Dnf = self.obligation(id, true).into_iter().collect();
                out.extend(Self::product(&x, &stay));
                simplify(out)
            }
            Node::Release(a, b) => {
                let y = self.expand(b, letter);
                let mut x = self.expand(a, letter);
                x.extend(self.obligation(id, false));
                Self::product(&y, &simplify(x))
            }
        };
        self.memo.insert((id, letter), d.clone());
        d
    }

    /// Successor clauses of a clause (conjunction of obligations).
    fn step(&mut self, clause: &Clause, letter: u32) -> Dnf {
        let mut acc = vec![Clause::new()];
        for o in clause {
            let d = self.expand(o.id, letter);
            acc = Self::product(&acc, &d);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

/// Normalizes clauses and removes subsumed ones.
fn simplify(mut dnf: Dnf) -> Dnf {
    for c in dnf.iter_mut() {
        // A strong obligation implies the weak one on the same formula.
        let strong: Vec<u32> = c.iter().filter(|o| o.strong).map(|o| o.id).collect();
        for id in strong {
            c.remove(&Obligation { id, strong: false });
        }
    }
    dnf.sort_by_key(|c| c.len());
    dnf.dedup();
    let mut out: Dnf = Vec::with_capacity(dnf.len());
    for c in dnf {
        if !out.iter().any(|d| d.is_subset(&c)) {
            out.push(c);
        }
    }
    out
}

/// NFA whose states are obligation clauses, reached from `{X ψ}`.
pub fn ltlf_to_nfa(psi: &Formula) -> Result<Nfa, FormulaError> {
    let normal = nnf(psi)?;
    let atoms: Vec<String> = normal.atoms().into_iter().collect();
    if atoms.len() > MAX_ATOMS {
        return Err(FormulaError::TooManyAtoms(atoms.len()));
    }
    let letters = 1u32 << atoms.len();
    let mut prog = Progression {
        nodes: Vec::new(),
        ids: HashMap::new(),
        memo: HashMap::new(),
    };
    let root = prog.build(&normal, &atoms);

    let mut clauses: Vec<Clause> = Vec::new();
    let mut index: HashMap<Clause, usize> = HashMap::new();
    let mut intern = |c: Clause, clauses: &mut Vec<Clause>| -> usize {
        *index.entry(c.clone()).or_insert_with(|| {
            clauses.push(c);
            clauses.len() - 1
        })
    };
    let mut initial = BTreeSet::new();
    if let Some(c) = prog.obligation(root, true) {
        initial.insert(intern(c, &mut clauses));
    }
    let mut succ: Vec<Vec<BTreeSet<usize>>> = Vec::new();
    let mut next = 0;
    while next < clauses.len() {
        let clause = clauses[next].clone();
        let mut row = Vec::with_capacity(letters as usize);
        for l in 0..letters {
            let targets = prog.step(&clause, l);
            row.push(
                targets
                    .into_iter()
                    .map(|c| intern(c, &mut clauses))
                    .collect(),
            );
        }
        succ.push(row);
        next += 1;
    }
    let finals = clauses
        .iter()
        .map(|c| c.iter().all(|o| !o.strong))
        .collect();
    Ok(Nfa {
        atoms,
        initial,
        finals,
        succ,
    })
}
