//! Benchmark families, formula corpora and the suite runner.
//!
//! Every generator renders CGSL text and parses it back, so the model
//! parser is exercised on every benchmark.

pub mod corpus;
pub mod counter;
pub mod cyber;
pub mod scheduler;
pub mod suite;

pub use counter::{gen_counter, CounterMode, CounterParams};
pub use cyber::{gen_cyber, suspicion_update, CyberParams, Heuristic, Scenario, SuspicionConfig};
pub use scheduler::{gen_scheduler, SchedulerParams};
pub use suite::{run_suite, GeneratorSpec, SuiteReport};

/// `<<A>> F counter_max`.
pub fn counter_formula() -> String {
    "<<A>> F counter_max".to_string()
}

/// `<<A,B>> (F p1 & X (F p2 & X (… & X F pn)))`.
pub fn nested_formula(n: usize) -> String {
    let n = n.max(1);
    let mut body = format!("F p{n}");
    for k in (1..n).rev() {
        body = format!("F p{k} & X ({body})");
    }
    format!("<<A,B>> ({body})")
}

/// `<<P1>> G (wt1 -> F !wt1) & … & <<Pn>> G (wtn -> F !wtn)`.
pub fn fairness_formula(n: usize) -> String {
    (1..=n)
        .map(|i| format!("(<<P{i}>> G (wt{i} -> F !wt{i}))"))
        .collect::<Vec<_>>()
        .join(" & ")
}

/// The attacker can end the run with server 1 compromised.
pub fn attack_formula() -> String {
    "<<Attacker>> F G compromised_1".to_string()
}

/// The defenders can end the run with server 1 clean.
pub fn defence_formula() -> String {
    "<<D1,D2>> F G !compromised_1".to_string()
}
