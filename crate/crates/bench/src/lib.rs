//! Benchmark workloads shared by the criterion benches.

use atlmc_core::bench::{
    counter_formula, gen_counter, gen_scheduler, nested_formula, CounterParams, SchedulerParams,
};
use atlmc_core::infinite_mc::{random_game, ExplicitGame};
use atlmc_core::{parse_formula, CheckRequest, Engine, Semantics};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// `<<A>> F counter_max` on the counter with `C = S = c`.
pub fn counter_finite(c: usize, engine: Engine) -> CheckRequest {
    let (_, g) = gen_counter(&CounterParams::finite(c, c)).expect("counter model");
    CheckRequest::new(g, parse_formula(&counter_formula()).expect("formula"))
        .semantics(Semantics::Finite)
        .engine(engine)
}

/// `<<A>> F counter_max` on the saturating counter, infinite traces.
pub fn counter_infinite(c: usize) -> CheckRequest {
    let (_, g) = gen_counter(&CounterParams::infinite(c)).expect("counter model");
    CheckRequest::new(g, parse_formula(&counter_formula()).expect("formula"))
        .semantics(Semantics::Infinite)
}

/// The nested reachability family of depth `n` on a fixed counter.
pub fn nested(n: usize) -> CheckRequest {
    let (_, g) = gen_counter(&CounterParams::finite(8, 8)).expect("counter model");
    CheckRequest::new(g, parse_formula(&nested_formula(n)).expect("formula"))
        .semantics(Semantics::Finite)
}

/// A safety objective for the scheduler, solved on infinite traces.
pub fn scheduler_safety(n: usize) -> CheckRequest {
    let (_, g) = gen_scheduler(&SchedulerParams { n }).expect("scheduler model");
    CheckRequest::new(g, parse_formula("<<S>> G !gr1").expect("formula"))
        .semantics(Semantics::Infinite)
}

/// Seeded random parity games.
pub fn random_games(
    count: usize,
    vertices: usize,
    priorities: u32,
    seed: u64,
) -> Vec<ExplicitGame> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_game(&mut rng, vertices, priorities, 3))
        .collect()
}
