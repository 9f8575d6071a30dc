//! Recursive labelling: state subformulas are evaluated bottom-up, each
//! strategic subformula is replaced by a fresh atom labelled with its set,
//! and the remaining path formula goes to the finite or infinite core.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bdd::{Bdd, BddStore};
use crate::cgs::{Cgs, Coalition, SymbolicCgs};
use crate::dpa::ToolSpec;
use crate::error::{Error, Result};
use crate::finite_mc::{explicit_game_solving, game_solving, ExplicitLabels};
use crate::formula::{classify, extract_state_subformulas, Formula, FormulaClass};
use crate::infinite_mc::{
    explicit_parity_solving, infinite_game_solving, translate_ltl, SolverKind, EXPLICIT_GAME_CAP,
};
use crate::limits::Deadline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    #[default]
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    Symbolic,
    Explicit,
}

impl FromStr for Semantics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(Semantics::Finite),
            "infinite" => Ok(Semantics::Infinite),
            _ => Err(Error::Invalid(format!(
                "unknown semantics `{s}` (finite, infinite)"
            ))),
        }
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(Engine::Symbolic),
            "explicit" => Ok(Engine::Explicit),
            _ => Err(Error::Invalid(format!(
                "unknown engine `{s}` (symbolic, explicit)"
            ))),
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Finite => "finite",
            Semantics::Infinite => "infinite",
        })
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Symbolic => "symbolic",
            Engine::Explicit => "explicit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckRequest {
    pub model: Cgs,
    pub formula: Formula,
    pub semantics: Semantics,
    pub engine: Engine,
    pub solver: SolverKind,
    /// External LTL→DPA translators; empty means built-in only.
    pub tools: Vec<ToolSpec>,
    pub timeout: Option<Duration>,
    /// BDD node store budget in bytes.
    pub memory_budget: Option<usize>,
    /// Node cap of the explicit engine.
    pub explicit_limit: usize,
    /// Maximum number of state names listed per subformula.
    pub report_cap: usize,
}

impl CheckRequest {
    pub fn new(model: Cgs, formula: Formula) -> CheckRequest {
        CheckRequest {
            model,
            formula,
            semantics: Semantics::Finite,
            engine: Engine::Symbolic,
            solver: SolverKind::default(),
            tools: Vec::new(),
            timeout: None,
            memory_budget: None,
            explicit_limit: EXPLICIT_GAME_CAP,
            report_cap: 64,
        }
    }

    pub fn semantics(mut self, s: Semantics) -> Self {
        self.semantics = s;
        self
    }

    pub fn engine(mut self, e: Engine) -> Self {
        self.engine = e;
        self
    }

    pub fn solver(mut self, s: SolverKind) -> Self {
        self.solver = s;
        self
    }

    pub fn tools(mut self, tools: Vec<ToolSpec>) -> Self {
        self.tools = tools;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub translate_ms: f64,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

/// Satisfying states of one evaluated subformula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubformulaReport {
    pub formula: String,
    pub count: usize,
    /// State names, at most `report_cap` of them.
    pub states: Vec<String>,
    pub truncated: bool,
    /// Translator that produced the automaton, for strategic subformulas.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translator: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub formula: String,
    pub semantics: Semantics,
    pub engine: Engine,
    pub solver: SolverKind,
    pub initial_state: String,
    pub holds: bool,
    pub satisfying_states: usize,
    pub reachable_states: usize,
    /// Ids of all satisfying states.
    #[serde(skip)]
    pub satisfying: Vec<usize>,
    pub subformulas: Vec<SubformulaReport>,
    pub timings: PhaseTimings,
    pub warnings: Vec<String>,
}

impl CheckResult {
    /// Pretty JSON with keys in declaration order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Sorted ids of the reachable states in `set` (over `q`).
pub fn decode_states(
    store: &mut BddStore,
    sg: &SymbolicCgs,
    reachable: Bdd,
    set: Bdd,
) -> Result<Vec<usize>> {
    let s = store.and(set, reachable)?;
    Ok(sg.decode_states(store, s)?)
}

/// Set operations and strategic dispatch, per engine.
trait Labeller {
    type Set: Clone;
    fn reachable(&self) -> Self::Set;
    fn empty(&self) -> Self::Set;
    fn atom(&mut self, name: &str) -> Result<Self::Set>;
    fn complement(&mut self, s: &Self::Set) -> Result<Self::Set>;
    fn and(&mut self, a: &Self::Set, b: &Self::Set) -> Result<Self::Set>;
    fn or(&mut self, a: &Self::Set, b: &Self::Set) -> Result<Self::Set>;
    fn label_fresh(&mut self, name: &str, s: &Self::Set);
    /// States satisfying `<<coalition>> psi` for a pure temporal `psi`;
    /// returns the translator used, if any.
    fn strategic(
        &mut self,
        coalition: &Coalition,
        psi: &Formula,
    ) -> Result<(Self::Set, Option<String>)>;
    fn decode(&mut self, s: &Self::Set) -> Result<Vec<usize>>;
}

struct Ctx<'a> {
    req: &'a CheckRequest,
    deadline: Deadline,
    reports: Vec<SubformulaReport>,
}

impl Ctx<'_> {
    fn report(&mut self, f: &Formula, ids: &[usize], translator: Option<String>) {
        let cap = self.req.report_cap;
        self.reports.push(SubformulaReport {
            formula: f.to_string(),
            count: ids.len(),
            states: ids
                .iter()
                .take(cap)
                .map(|&q| self.req.model.states[q].clone())
                .collect(),
            truncated: ids.len() > cap,
            translator,
        });
    }
}

fn eval<L: Labeller>(ctx: &mut Ctx<'_>, lab: &mut L, f: &Formula) -> Result<L::Set> {
    ctx.deadline.check()?;
    match f {
        Formula::True => Ok(lab.reachable()),
        Formula::False => Ok(lab.empty()),
        Formula::Atom(p) => lab.atom(p),
        Formula::Not(a) => {
            let s = eval(ctx, lab, a)?;
            lab.complement(&s)
        }
        Formula::And(a, b) => {
            let x = eval(ctx, lab, a)?;
            let y = eval(ctx, lab, b)?;
            lab.and(&x, &y)
        }
        Formula::Or(a, b) => {
            let x = eval(ctx, lab, a)?;
            let y = eval(ctx, lab, b)?;
            lab.or(&x, &y)
        }
        Formula::Strategic(agents, psi) => {
            let (body, subs) = extract_state_subformulas(psi);
            for (name, sub) in &subs {
                let s = eval(ctx, lab, sub)?;
                lab.label_fresh(name, &s);
            }
            let (set, translator) = lab.strategic(agents, &body)?;
            let ids = lab.decode(&set)?;
            ctx.report(f, &ids, translator);
            Ok(set)
        }
        _ => Err(Error::Invalid(format!(
            "temporal operator outside a strategic quantifier in `{f}`"
        ))),
    }
}

struct Symbolic<'a> {
    store: BddStore,
    sg: SymbolicCgs,
    reachable: Bdd,
    req: &'a CheckRequest,
    deadline: Deadline,
    timings: PhaseTimings,
}

impl Labeller for Symbolic<'_> {
    type Set = Bdd;

    fn reachable(&self) -> Bdd {
        self.reachable
    }

    fn empty(&self) -> Bdd {
        self.store.ff()
    }

    fn atom(&mut self, name: &str) -> Result<Bdd> {
        let l = self
            .sg
            .label(name)
            .ok_or_else(|| Error::Invalid(format!("unknown atom `{name}`")))?;
        Ok(self.store.and(l, self.reachable)?)
    }

    fn complement(&mut self, s: &Bdd) -> Result<Bdd> {
        Ok(self.store.diff(self.reachable, *s)?)
    }

    fn and(&mut self, a: &Bdd, b: &Bdd) -> Result<Bdd> {
        Ok(self.store.and(*a, *b)?)
    }

    fn or(&mut self, a: &Bdd, b: &Bdd) -> Result<Bdd> {
        Ok(self.store.or(*a, *b)?)
    }

    fn label_fresh(&mut self, name: &str, s: &Bdd) {
        self.sg.label_fresh(name, *s);
    }

    fn strategic(&mut self, coalition: &Coalition, psi: &Formula) -> Result<(Bdd, Option<String>)> {
        let sources = Some(self.reachable);
        match self.req.semantics {
            Semantics::Finite => {
                let (set, st) = game_solving(
                    &mut self.store,
                    &self.sg,
                    coalition,
                    psi,
                    sources,
                    &self.deadline,
                )?;
                add_stats(
                    &mut self.timings,
                    Duration::ZERO,
                    st.translate,
                    st.build,
                    st.solve,
                );
                Ok((set, None))
            }
            Semantics::Infinite => {
                let t0 = Instant::now();
                let tr = translate_ltl(psi, &self.req.tools, &self.deadline)?;
                let translate = t0.elapsed();
                let (set, st) = infinite_game_solving(
                    &mut self.store,
                    &self.sg,
                    coalition,
                    &tr.dpa,
                    self.req.solver,
                    sources,
                    &self.deadline,
                )?;
                add_stats(
                    &mut self.timings,
                    translate,
                    st.translate,
                    st.build,
                    st.solve,
                );
                Ok((set, Some(tr.tool)))
            }
        }
    }

    fn decode(&mut self, s: &Bdd) -> Result<Vec<usize>> {
        decode_states(&mut self.store, &self.sg, self.reachable, *s)
    }
}

fn add_stats(
    t: &mut PhaseTimings,
    outer: Duration,
    translate: Duration,
    build: Duration,
    solve: Duration,
) {
    t.translate_ms += ms(outer + translate);
    t.build_ms += ms(build);
    t.solve_ms += ms(solve);
}

struct Explicit<'a> {
    req: &'a CheckRequest,
    reachable: BTreeSet<usize>,
    labels: ExplicitLabels,
    deadline: Deadline,
    timings: PhaseTimings,
}

impl Labeller for Explicit<'_> {
    type Set = BTreeSet<usize>;

    fn reachable(&self) -> Self::Set {
        self.reachable.clone()
    }

    fn empty(&self) -> Self::Set {
        BTreeSet::new()
    }

    fn atom(&mut self, name: &str) -> Result<Self::Set> {
        let g = &self.req.model;
        if g.atom_index(name).is_none() {
            return Err(Error::Invalid(format!("unknown atom `{name}`")));
        }
        Ok(self
            .reachable
            .iter()
            .copied()
            .filter(|&q| g.holds(q, name))
            .collect())
    }

    fn complement(&mut self, s: &Self::Set) -> Result<Self::Set> {
        Ok(self.reachable.difference(s).copied().collect())
    }

    fn and(&mut self, a: &Self::Set, b: &Self::Set) -> Result<Self::Set> {
        Ok(a.intersection(b).copied().collect())
    }

    fn or(&mut self, a: &Self::Set, b: &Self::Set) -> Result<Self::Set> {
        Ok(a.union(b).copied().collect())
    }

    fn label_fresh(&mut self, name: &str, s: &Self::Set) {
        self.labels.insert(name.to_string(), s.clone());
    }

    fn strategic(
        &mut self,
        coalition: &Coalition,
        psi: &Formula,
    ) -> Result<(Self::Set, Option<String>)> {
        let g = &self.req.model;
        let sources: Vec<usize> = self.reachable.iter().copied().collect();
        let limit = self.req.explicit_limit;
        match self.req.semantics {
            Semantics::Finite => {
                let t0 = Instant::now();
                let set = explicit_game_solving(
                    g,
                    coalition,
                    psi,
                    &self.labels,
                    Some(&sources),
                    limit,
                    &self.deadline,
                )?;
                self.timings.solve_ms += ms(t0.elapsed());
                Ok((set, None))
            }
            Semantics::Infinite => {
                let t0 = Instant::now();
                let tr = translate_ltl(psi, &self.req.tools, &self.deadline)?;
                let t1 = Instant::now();
                let set = explicit_parity_solving(
                    g,
                    coalition,
                    &tr.dpa,
                    &self.labels,
                    Some(&sources),
                    limit,
                )?;
                self.timings.translate_ms += ms(t1 - t0);
                self.timings.solve_ms += ms(t1.elapsed());
                Ok((set, Some(tr.tool)))
            }
        }
    }

    fn decode(&mut self, s: &Self::Set) -> Result<Vec<usize>> {
        Ok(s.iter().copied().collect())
    }
}

/// Evaluates the request's state formula on its model.
pub fn check(req: &CheckRequest) -> Result<CheckResult> {
    let start = Instant::now();
    req.model.validate()?;
    if classify(&req.formula) != FormulaClass::State {
        return Err(Error::Invalid(format!(
            "`{}` is not a state formula; temporal operators need a strategic quantifier",
            req.formula
        )));
    }
    let mut warnings = Vec::new();
    match req.semantics {
        Semantics::Infinite if !req.model.finals.is_empty() => {
            warnings.push("model declares final states; infinite-trace semantics ignores them".to_string())
        }
        Semantics::Finite if req.model.finals.is_empty() && req.formula.has_strategic() => {
            warnings.push("model declares no final states; every finite-trace strategic formula holds vacuously".to_string())
        }
        _ => {}
    }
    let deadline = req.timeout.map_or_else(Deadline::none, Deadline::after);
    let mut ctx = Ctx {
        req,
        deadline,
        reports: Vec::new(),
    };

    let (ids, reachable, mut timings) = match req.engine {
        Engine::Symbolic => {
            let t0 = Instant::now();
            let mut store = SymbolicCgs::new_store(&req.model)?;
            if let Some(b) = req.memory_budget {
                store.set_budget(b);
            }
            let sg = SymbolicCgs::encode(&req.model, &mut store)?;
            let reachable = sg.reachable(&mut store)?;
            let mut lab = Symbolic {
                store,
                sg,
                reachable,
                req,
                deadline,
                timings: PhaseTimings::default(),
            };
            lab.timings.build_ms += ms(t0.elapsed());
            let set = eval(&mut ctx, &mut lab, &req.formula)?;
            let ids = lab.decode(&set)?;
            let n = lab.decode(&reachable)?.len();
            (ids, n, lab.timings)
        }
        Engine::Explicit => {
            let reachable: BTreeSet<usize> = req.model.reachable_states().into_iter().collect();
            let mut lab = Explicit {
                req,
                reachable,
                labels: ExplicitLabels::new(),
                deadline,
                timings: PhaseTimings::default(),
            };
            let set = eval(&mut ctx, &mut lab, &req.formula)?;
            (
                set.into_iter().collect::<Vec<_>>(),
                lab.reachable.len(),
                lab.timings,
            )
        }
    };
    timings.total_ms = ms(start.elapsed());
    let initial = req.model.initial;
    Ok(CheckResult {
        formula: req.formula.to_string(),
        semantics: req.semantics,
        engine: req.engine,
        solver: req.solver,
        initial_state: req.model.states[initial].clone(),
        holds: ids.binary_search(&initial).is_ok(),
        satisfying_states: ids.len(),
        reachable_states: reachable,
        satisfying: ids,
        subformulas: ctx.reports,
        timings,
        warnings,
    })
}
