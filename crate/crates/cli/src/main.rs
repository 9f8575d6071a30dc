//! `atlmc`: check ATL* formulas on concurrent game structures, generate
//! benchmark models, run suites and solve PGSolver games.
//!
//! Exit codes: 0 the formula holds (or the command succeeded), 1 it does
//! not hold, 2 usage or input error, 3 resource limit or timeout.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use atlmc_core::bench::{run_suite, GeneratorSpec};
use atlmc_core::cgs::parse_model;
use atlmc_core::infinite_mc::{parse_pgsolver_ids, solve_explicit, Player};
use atlmc_core::limits::Deadline;
use atlmc_core::{check, parse_formula, CheckRequest, Engine, Semantics, SolverKind};
use clap::{Args, Parser, Subcommand};

use config::FileConfig;

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "atlmc",
    version,
    about = "Symbolic ATL* model checker for finite and infinite traces"
)]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a formula at the initial state of a model.
    Check(CheckArgs),
    /// Write a benchmark model in CGSL.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a benchmark suite and write a CSV/JSON timing report.
    Suite(SuiteArgs),
    /// Solve a PGSolver parity game and print both winning regions.
    SolveGame(SolveGameArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Model file (CGSL).
    #[arg(short, long)]
    model: PathBuf,
    /// Formula text.
    #[arg(
        short,
        long,
        required_unless_present = "formula_file",
        conflicts_with = "formula_file"
    )]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// finite or infinite; defaults to finite when the model has final states.
    #[arg(long)]
    semantics: Option<Semantics>,
    /// symbolic or explicit.
    #[arg(long)]
    engine: Option<Engine>,
    /// zielonka or progress-measure.
    #[arg(long)]
    solver: Option<SolverKind>,
    #[command(flatten)]
    common: CommonArgs,
    /// Write the JSON report here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// key = value configuration file (translator tools, limits).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// BDD store budget in bytes.
    #[arg(long)]
    memory: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Counter game: agents A and B add 0 or 1 to a counter each step.
    Counter {
        #[arg(long = "C")]
        c: usize,
        /// Step horizon (finite mode).
        #[arg(long = "S", required_unless_present = "infinite")]
        s: Option<usize>,
        /// Saturating counter without a horizon or final states.
        #[arg(long, conflicts_with = "s")]
        infinite: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fair scheduler with n processes.
    Scheduler {
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Attacker against two defenders on five servers.
    Cyber {
        /// confidentiality, integrity or availability.
        #[arg(long, default_value = "confidentiality")]
        scenario: String,
        /// Horizon.
        #[arg(long = "T")]
        t: usize,
        /// Defender budget.
        #[arg(long = "B", default_value_t = 0)]
        b: usize,
        /// conservative, aggressive, proportional or diversity.
        #[arg(long, default_value = "conservative")]
        heuristic: String,
        /// Servers the attacker may move to, e.g. `1/2`.
        #[arg(long)]
        targets: Option<String>,
        /// Server holding the attacker's initial foothold.
        #[arg(long)]
        start: Option<usize>,
        /// Further generator parameters as k=v (T1, T2, P1, P2, D1, D2, w, critical).
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Suite file, one run per line.
    file: PathBuf,
    /// CSV report path (default: standard output).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// key = value configuration file (translator tools).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveGameArgs {
    /// Game in PGSolver format (max-parity, player 0 wins even).
    file: PathBuf,
    #[arg(long, default_value = "zielonka")]
    solver: SolverKind,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_HOLDS
            });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();

    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.chain().any(|c| {
                c.downcast_ref::<atlmc_core::Error>()
                    .is_some_and(|e| e.is_resource())
            });
            ExitCode::from(if resource { EXIT_RESOURCE } else { EXIT_USAGE })
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Check(args) => run_check(args),
        Command::Gen(g) => run_gen(g),
        Command::Suite(args) => run_suite_cmd(args),
        Command::SolveGame(args) => run_solve_game(args),
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    path.map(FileConfig::load)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn run_check(args: CheckArgs) -> Result<u8> {
    let cfg = load_config(args.common.config.as_deref())?;
    let model_text = read(&args.model, "model")?;
    let model = parse_model(&model_text)
        .map_err(atlmc_core::Error::from)
        .with_context(|| format!("in model {}", args.model.display()))?;
    let formula_text = match (&args.formula, &args.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => read(p, "formula")?.trim().to_string(),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let formula = parse_formula(&formula_text).map_err(atlmc_core::Error::from)?;

    let default_semantics = if model.finals.is_empty() {
        Semantics::Infinite
    } else {
        Semantics::Finite
    };
    let mut req = CheckRequest::new(model, formula)
        .semantics(
            args.semantics
                .or(cfg.semantics)
                .unwrap_or(default_semantics),
        )
        .engine(args.engine.or(cfg.engine).unwrap_or_default())
        .solver(args.solver.or(cfg.solver).unwrap_or_default())
        .tools(cfg.tools);
    req.timeout = args.common.timeout.or(cfg.timeout).map(Duration::from_secs);
    req.memory_budget = args.common.memory.or(cfg.memory);

    let result = check(&req)?;
    for w in &result.warnings {
        log::warn!("{w}");
    }
    println!(
        "{} at {}: {} ({} of {} reachable states; {} / {}; {:.1} ms)",
        result.formula,
        result.initial_state,
        if result.holds {
            "holds"
        } else {
            "does not hold"
        },
        result.satisfying_states,
        result.reachable_states,
        result.semantics,
        result.engine,
        result.timings.total_ms,
    );
    if let Some(out) = &args.output {
        write_or_print(Some(out), &result.to_json())?;
    }
    Ok(if result.holds { EXIT_HOLDS } else { EXIT_FAILS })
}

fn run_gen(g: GenCommand) -> Result<u8> {
    let (name, params, output) = match g {
        GenCommand::Counter {
            c,
            s,
            infinite,
            output,
        } => {
            let params = match s {
                Some(s) if !infinite => format!("C={c};S={s};mode=finite"),
                _ => format!("C={c};mode=infinite"),
            };
            ("counter", params, output)
        }
        GenCommand::Scheduler { n, output } => ("scheduler", format!("n={n}"), output),
        GenCommand::Cyber {
            scenario,
            t,
            b,
            heuristic,
            targets,
            start,
            params,
            output,
        } => {
            let mut kv = vec![
                format!("scenario={scenario}"),
                format!("T={t}"),
                format!("B={b}"),
                format!("heuristic={heuristic}"),
            ];
            kv.extend(targets.map(|v| format!("targets={v}")));
            kv.extend(start.map(|v| format!("start={v}")));
            kv.extend(params);
            ("cyber", kv.join(";"), output)
        }
    };
    let spec = GeneratorSpec::parse(name, &params)?;
    let (text, model) = spec.generate()?;
    log::info!("{name} model with {} states", model.state_count());
    write_or_print(output.as_deref(), &text)?;
    Ok(EXIT_HOLDS)
}

fn run_suite_cmd(args: SuiteArgs) -> Result<u8> {
    let cfg = load_config(args.config.as_deref())?;
    let text = read(&args.file, "suite")?;
    let report = run_suite(&text, &cfg.tools);
    let failed = report
        .rows
        .iter()
        .filter(|r| r.verdict.starts_with("error"))
        .count();
    if failed > 0 {
        log::warn!("{failed} of {} runs failed", report.rows.len());
    }
    write_or_print(args.csv.as_deref(), &report.to_csv())?;
    if let Some(p) = &args.json {
        write_or_print(Some(p), &report.to_json())?;
    }
    Ok(EXIT_HOLDS)
}

fn run_solve_game(args: SolveGameArgs) -> Result<u8> {
    let text = read(&args.file, "game")?;
    let (game, ids) = parse_pgsolver_ids(&text)?;
    let deadline = args
        .timeout
        .map_or_else(Deadline::none, |s| Deadline::after(Duration::from_secs(s)));
    let winners = solve_explicit(&game, args.solver, &deadline)?;
    let region = |p: Player| {
        let mut vs: Vec<usize> = ids
            .iter()
            .zip(&winners)
            .filter(|(_, &w)| w == p)
            .map(|(&id, _)| id)
            .collect();
        vs.sort_unstable();
        vs.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("W0: {}", region(Player::Even));
    println!("W1: {}", region(Player::Odd));
    Ok(EXIT_HOLDS)
}
