//! Fixed formula corpora used by the test suites and benchmarks.

/// Pure LTLf formulas over `p, q, r` covering every temporal operator.
pub const LTLF_CORPUS: [&str; 30] = [
    "true",
    "false",
    "p",
    "!p",
    "p & !p",
    "p | q",
    "p -> q",
    "X p",
    "!X p",
    "X X q",
    "F p",
    "G p",
    "F G p",
    "G F p",
    "p U q",
    "!(p U q)",
    "(p U q) U r",
    "G (p -> X q)",
    "G (p -> F q)",
    "F p & F q",
    "F (p & X F q)",
    "G !p | F (q & r)",
    "X (p U (q & !r))",
    "!F !p",
    "F p U G q",
    "X true",
    "!X true",
    "G (p -> X !p)",
    "F (p & !X true)",
    "p & X q | r U X p",
];

/// ATL* state formulas over agents `A, B` and atoms `p, q`, including
/// nested strategic operators.
pub const ATL_CORPUS: [&str; 10] = [
    "<<A>> F p",
    "<<A>> G q",
    "<<A,B>> p U q",
    "<<>> F p",
    "<<B>> X (p | q)",
    "<<A>> G (p -> F q)",
    "!<<B>> F G p",
    "<<A>> F (q & <<B>> X p)",
    "<<A,B>> G p | <<>> X q",
    "<<B>> (p U X q) & !<<A>> G !q",
];
