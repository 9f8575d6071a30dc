//! Suite files and timing reports.
//!
//! One row per line, as `key=value` fields separated by commas or blanks;
//! values may be double-quoted. Keys: `generator` (counter, scheduler,
//! cyber), `params` (`k=v;k=v`), `formula` (text or a family: `@counter`,
//! `@nested:N`, `@fairness`, `@attack`, `@defence`), `engine`,
//! `semantics`, `solver`, `repeats`, `timeout` (seconds).
//!
//! ```text
//! generator=counter, params=C=4;S=6, formula="<<A>> F counter_max", engine=symbolic, repeats=3
//! ```

use std::time::Duration;

use serde::Serialize;

use super::counter::{gen_counter, CounterMode, CounterParams};
use super::cyber::{gen_cyber, CyberParams, Heuristic, Scenario, FLAGS};
use super::scheduler::{gen_scheduler, SchedulerParams};
use super::{attack_formula, counter_formula, defence_formula, fairness_formula, nested_formula};
use crate::cgs::Cgs;
use crate::dpa::ToolSpec;
use crate::driver::{check, CheckRequest, Engine, Semantics};
use crate::error::{Error, Result};
use crate::formula::parse_formula;
use crate::infinite_mc::SolverKind;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Counter(CounterParams),
    Scheduler(SchedulerParams),
    Cyber(CyberParams),
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Counter(_) => "counter",
            GeneratorSpec::Scheduler(_) => "scheduler",
            GeneratorSpec::Cyber(_) => "cyber",
        }
    }

    /// Builds the generator from its name and `k=v;k=v` parameters.
    pub fn parse(name: &str, params: &str) -> Result<GeneratorSpec> {
        let kv = parse_kv(params)?;
        let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        let num = |k: &str| -> Result<Option<usize>> {
            get(k)
                .map(|v| {
                    v.parse().map_err(|_| {
                        Error::Invalid(format!("parameter {k}: `{v}` is not a number"))
                    })
                })
                .transpose()
        };
        let known: &[&str] = match name {
            "counter" => &["C", "S", "mode"],
            "scheduler" => &["n"],
            "cyber" => &[
                "scenario",
                "T",
                "B",
                "heuristic",
                "targets",
                "start",
                "w",
                "T1",
                "T2",
                "P1",
                "P2",
                "D1",
                "D2",
                "critical",
            ],
            _ => {
                return Err(Error::Invalid(format!(
                    "unknown generator `{name}` (counter, scheduler, cyber)"
                )))
            }
        };
        if let Some((k, _)) = kv.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(Error::Invalid(format!(
                "unknown parameter `{k}` for generator {name}"
            )));
        }
        let spec = match name {
            "counter" => {
                let c = num("C")?.ok_or_else(|| Error::Invalid("counter needs C".into()))?;
                let mode = match get("mode") {
                    Some("finite") => CounterMode::Finite,
                    Some("infinite") => CounterMode::Infinite,
                    Some(m) => return Err(Error::Invalid(format!("unknown counter mode `{m}`"))),
                    None if get("S").is_some() => CounterMode::Finite,
                    None => CounterMode::Infinite,
                };
                let s = num("S")?.unwrap_or(0);
                GeneratorSpec::Counter(CounterParams {
                    c,
                    s: if mode == CounterMode::Finite { s } else { 0 },
                    mode,
                })
            }
            "scheduler" => GeneratorSpec::Scheduler(SchedulerParams {
                n: num("n")?.ok_or_else(|| Error::Invalid("scheduler needs n".into()))?,
            }),
            _ => {
                let scenario: Scenario = get("scenario").unwrap_or("confidentiality").parse()?;
                let heuristic: Heuristic = get("heuristic").unwrap_or("conservative").parse()?;
                let t = num("T")?.ok_or_else(|| Error::Invalid("cyber needs T".into()))?;
                let b = num("B")?.unwrap_or(0);
                let mut p = CyberParams::new(scenario, t, to_u32(b)?, heuristic);
                if let Some(v) = get("targets") {
                    p.targets = parse_list(v)?;
                }
                if let Some(v) = num("start")? {
                    p.start = v;
                }
                if let Some(v) = get("w") {
                    let w: Vec<u32> = parse_list(v)?;
                    p.suspicion.weights = w
                        .try_into()
                        .map_err(|_| Error::Invalid(format!("weights need {FLAGS} entries")))?;
                }
                if let Some(v) = get("critical") {
                    let flags: Vec<usize> = parse_list(v)?;
                    p.suspicion.critical = [false; FLAGS];
                    for f in flags {
                        if !(1..=FLAGS).contains(&f) {
                            return Err(Error::Invalid(format!(
                                "critical flag {f} out of 1..={FLAGS}"
                            )));
                        }
                        p.suspicion.critical[f - 1] = true;
                    }
                }
                for (k, slot) in [
                    ("T1", &mut p.suspicion.t1),
                    ("T2", &mut p.suspicion.t2),
                    ("D1", &mut p.suspicion.d1),
                    ("D2", &mut p.suspicion.d2),
                ] {
                    if let Some(v) = num(k)? {
                        *slot = to_u32(v)?;
                    }
                }
                for (k, slot) in [("P1", &mut p.suspicion.p1), ("P2", &mut p.suspicion.p2)] {
                    if let Some(v) = get(k) {
                        *slot = v.parse().map_err(|_| {
                            Error::Invalid(format!("parameter {k}: `{v}` is not a number"))
                        })?;
                    }
                }
                GeneratorSpec::Cyber(p)
            }
        };
        Ok(spec)
    }

    pub fn generate(&self) -> Result<(String, Cgs)> {
        match self {
            GeneratorSpec::Counter(p) => gen_counter(p),
            GeneratorSpec::Scheduler(p) => gen_scheduler(p),
            GeneratorSpec::Cyber(p) => gen_cyber(p),
        }
    }

    pub fn default_semantics(&self) -> Semantics {
        match self {
            GeneratorSpec::Counter(p) if p.mode == CounterMode::Finite => Semantics::Finite,
            GeneratorSpec::Counter(_) | GeneratorSpec::Scheduler(_) => Semantics::Infinite,
            GeneratorSpec::Cyber(_) => Semantics::Finite,
        }
    }

    /// Expands `@family` formulas for this model; other text is returned as is.
    pub fn formula(&self, text: &str) -> Result<String> {
        let Some(family) = text.strip_prefix('@') else {
            return Ok(text.to_string());
        };
        let (fam, arg) = match family.split_once(':') {
            Some((f, a)) => (f, Some(a)),
            None => (family, None),
        };
        Ok(match (fam, self) {
            ("counter", GeneratorSpec::Counter(_)) => counter_formula(),
            ("nested", GeneratorSpec::Counter(_)) => {
                let n: usize = arg.and_then(|a| a.parse().ok()).ok_or_else(|| {
                    Error::Invalid(format!("`@nested:N` needs a number, got `{text}`"))
                })?;
                nested_formula(n)
            }
            ("fairness", GeneratorSpec::Scheduler(p)) => fairness_formula(p.n),
            ("attack", GeneratorSpec::Cyber(_)) => attack_formula(),
            ("defence", GeneratorSpec::Cyber(_)) => defence_formula(),
            _ => {
                return Err(Error::Invalid(format!(
                    "formula family `{text}` does not apply to generator {}",
                    self.name()
                )))
            }
        })
    }
}

fn to_u32(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Invalid(format!("{v} is too large")))
}

/// Lists separated by `/` or `+`.
fn parse_list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>> {
    v.split(['/', '+'])
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad list item `{s}` in `{v}`")))
        })
        .collect()
}

/// `k=v;k=v` pairs, in order.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            item.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Invalid(format!("expected key=value, got `{item}`")))
        })
        .collect()
}

/// Splits a suite line into `key=value` fields.
fn fields(line: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.next_if(|c| c.is_whitespace() || *c == ',').is_some() {}
        if chars.peek().is_none() {
            return Ok(out);
        }
        let mut key = String::new();
        while let Some(c) = chars.next_if(|c| *c != '=' && !c.is_whitespace() && *c != ',') {
            key.push(c);
        }
        if chars.next() != Some('=') {
            return Err(Error::Invalid(format!("expected `=` after `{key}`")));
        }
        let mut value = String::new();
        if chars.next_if_eq(&'"').is_some() {
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => value.extend(chars.next()),
                    Some(c) => value.push(c),
                    None => {
                        return Err(Error::Invalid(format!(
                            "unterminated quote in field `{key}`"
                        )))
                    }
                }
            }
        } else {
            while let Some(c) = chars.next_if(|c| !c.is_whitespace() && *c != ',') {
                value.push(c);
            }
        }
        out.push((key, value));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub generator: GeneratorSpec,
    pub params: String,
    pub formula: String,
    pub engine: Engine,
    pub semantics: Semantics,
    pub solver: SolverKind,
    pub repeats: usize,
    pub timeout: Option<Duration>,
}

/// Parses one suite line.
pub fn parse_row(line: &str) -> Result<SuiteRow> {
    let fs = fields(line)?;
    let get = |k: &str| fs.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    for (k, _) in &fs {
        if ![
            "generator",
            "params",
            "formula",
            "engine",
            "semantics",
            "solver",
            "repeats",
            "timeout",
        ]
        .contains(&k.as_str())
        {
            return Err(Error::Invalid(format!("unknown field `{k}`")));
        }
    }
    let name = get("generator").ok_or_else(|| Error::Invalid("row needs a generator".into()))?;
    let params = get("params").unwrap_or("").to_string();
    let generator = GeneratorSpec::parse(name, &params)?;
    let formula = get("formula")
        .ok_or_else(|| Error::Invalid("row needs a formula".into()))?
        .to_string();
    let engine = get("engine").map_or(Ok(Engine::Symbolic), str::parse)?;
    let semantics = get("semantics").map_or(Ok(generator.default_semantics()), str::parse)?;
    let solver = get("solver").map_or(Ok(SolverKind::default()), |s| {
        s.parse().map_err(Error::Invalid)
    })?;
    let number = |k: &str, v: &str| -> Result<u64> {
        v.parse()
            .map_err(|_| Error::Invalid(format!("{k}: `{v}` is not a number")))
    };
    let repeats = get("repeats")
        .map_or(Ok(1), |v| number("repeats", v))?
        .max(1) as usize;
    let timeout = get("timeout")
        .map(|v| number("timeout", v))
        .transpose()?
        .map(Duration::from_secs);
    Ok(SuiteRow {
        generator,
        params,
        formula,
        engine,
        semantics,
        solver,
        repeats,
        timeout,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub row: usize,
    pub generator: String,
    pub params: String,
    pub formula: String,
    pub engine: String,
    pub states: Option<usize>,
    /// `true`, `false`, or `error: …`.
    pub verdict: String,
    pub ms_translate: f64,
    pub ms_build: f64,
    pub ms_solve: f64,
    pub ms_total: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub rows: Vec<ReportRow>,
}

impl SuiteReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "row",
            "generator",
            "params",
            "formula",
            "engine",
            "states",
            "verdict",
            "ms_translate",
            "ms_build",
            "ms_solve",
            "ms_total",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.row.to_string(),
                r.generator.clone(),
                r.params.clone(),
                r.formula.clone(),
                r.engine.clone(),
                r.states.map_or(String::new(), |s| s.to_string()),
                r.verdict.clone(),
                format!("{:.3}", r.ms_translate),
                format!("{:.3}", r.ms_build),
                format!("{:.3}", r.ms_solve),
                format!("{:.3}", r.ms_total),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("report serializes")
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    match xs.len() {
        0 => 0.0,
        n if n % 2 == 1 => xs[n / 2],
        n => (xs[n / 2 - 1] + xs[n / 2]) / 2.0,
    }
}

fn error_row(row: usize, line: &str, e: &Error) -> ReportRow {
    ReportRow {
        row,
        generator: String::new(),
        params: String::new(),
        formula: line.to_string(),
        engine: String::new(),
        states: None,
        verdict: format!("error: {e}"),
        ms_translate: 0.0,
        ms_build: 0.0,
        ms_solve: 0.0,
        ms_total: 0.0,
    }
}

fn run_row(index: usize, row: &SuiteRow, tools: &[ToolSpec]) -> ReportRow {
    let mut out = ReportRow {
        row: index,
        generator: row.generator.name().to_string(),
        params: row.params.clone(),
        formula: row.formula.clone(),
        engine: format!("{}-{}", row.engine, row.semantics),
        states: None,
        verdict: String::new(),
        ms_translate: 0.0,
        ms_build: 0.0,
        ms_solve: 0.0,
        ms_total: 0.0,
    };
    let prepared = row.generator.formula(&row.formula).and_then(|text| {
        out.formula = text.clone();
        let f = parse_formula(&text)?;
        let (_, g) = row.generator.generate()?;
        Ok((f, g))
    });
    let (f, g) = match prepared {
        Ok(x) => x,
        Err(e) => {
            out.verdict = format!("error: {e}");
            return out;
        }
    };
    out.states = Some(g.state_count());
    let mut req = CheckRequest::new(g, f)
        .semantics(row.semantics)
        .engine(row.engine)
        .solver(row.solver)
        .tools(tools.to_vec());
    req.timeout = row.timeout;
    let mut times: [Vec<f64>; 4] = Default::default();
    for _ in 0..row.repeats {
        match check(&req) {
            Ok(r) => {
                out.verdict = r.holds.to_string();
                let t = &r.timings;
                for (v, x) in
                    times
                        .iter_mut()
                        .zip([t.translate_ms, t.build_ms, t.solve_ms, t.total_ms])
                {
                    v.push(x);
                }
            }
            Err(e) => {
                out.verdict = format!("error: {e}");
                return out;
            }
        }
    }
    let [a, b, c, d] = times.map(median);
    (out.ms_translate, out.ms_build, out.ms_solve, out.ms_total) = (a, b, c, d);
    out
}

/// Runs every row of a suite file in order. Rows that fail to parse or
/// to check are reported with an `error:` verdict and the suite goes on.
pub fn run_suite(text: &str, tools: &[ToolSpec]) -> SuiteReport {
    let mut rows = Vec::new();
    let lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        match parse_row(line) {
            Ok(r) => rows.push(run_row(row, &r, tools)),
            Err(e) => rows.push(error_row(row, line, &e)),
        }
        log::info!(
            "suite row {row}: {}",
            rows.last().map_or("", |r| r.verdict.as_str())
        );
    }
    SuiteReport { rows }
}
