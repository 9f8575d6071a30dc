use std::fs::{self, File};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{
    normalize_acceptance, parse_hoa, state_based_priorities, AutomatonError, Dpa, HoaAutomaton,
    Polarity,
};
use crate::formula::{map_children, nnf, substitute_atoms, AtomMap, Formula};
use crate::ltlf2dfa::{determinize_minimize, ltlf_to_nfa};

/// An external LTL→DPA translator. `command` is run by `sh -c` after
/// substituting `{formula}` (shell-quoted) and `{outfile}`; without
/// `{outfile}` the automaton is read from standard output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub command: String,
}

/// A translated automaton, min-even normalized, over the formula's atoms.
#[derive(Debug, Clone)]
pub struct Translation {
    pub dpa: Dpa,
    /// Tool name, or `builtin`.
    pub tool: String,
    pub hoa: Option<HoaAutomaton>,
}

static RUN_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Runs every tool concurrently on `psi`; the first whose output parses
/// to a deterministic parity-reducible automaton wins and the rest are
/// killed. Without tools the built-in translator is used.
pub fn race_translate(
    psi: &Formula,
    tools: &[ToolSpec],
    timeout: Duration,
) -> Result<Translation, AutomatonError> {
    if psi.has_strategic() {
        return Err(AutomatonError::Unsupported(format!(
            "not a pure LTL formula: {psi}"
        )));
    }
    if tools.is_empty() {
        return builtin_translate(psi);
    }
    // Tools see neutral atom names; they are mapped back afterwards.
    let atoms: Vec<String> = psi.atoms().into_iter().collect();
    let rename: AtomMap = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), Formula::atom(&format!("a{i}"))))
        .collect();
    let text = substitute_atoms(psi, &rename).to_string();

    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    let run = RUN_COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut handles = Vec::new();
    for (i, tool) in tools.iter().enumerate() {
        let out = std::env::temp_dir().join(format!("atlmc-{}-{run}-{i}.hoa", std::process::id()));
        let cancel = Arc::clone(&cancel);
        let tx = tx.clone();
        let tool = tool.clone();
        let text = text.clone();
        handles.push(thread::spawn(move || {
            let res = run_tool(&tool, &text, out, &cancel, timeout);
            let _ = tx.send((i, res));
        }));
    }
    drop(tx);

    let mut failures = Vec::new();
    let mut winner = None;
    for (i, res) in rx {
        match res {
            Ok(hoa) => match validate(&hoa, &atoms) {
                Ok(dpa) => {
                    winner = Some((i, hoa, dpa));
                    cancel.store(true, Ordering::Relaxed);
                    break;
                }
                Err(e) => failures.push(format!("{}: {e}", tools[i].name)),
            },
            Err(e) => failures.push(format!("{}: {e}", tools[i].name)),
        }
    }
    cancel.store(true, Ordering::Relaxed);
    for h in handles {
        let _ = h.join();
    }
    match winner {
        Some((i, hoa, dpa)) => {
            log::info!("translator `{}` won for {psi}", tools[i].name);
            Ok(Translation {
                dpa,
                tool: tools[i].name.clone(),
                hoa: Some(hoa),
            })
        }
        None => Err(AutomatonError::Translation(failures.join("; "))),
    }
}

fn validate(hoa: &HoaAutomaton, atoms: &[String]) -> Result<Dpa, AutomatonError> {
    let mut dpa = state_based_priorities(hoa)?;
    for ap in &mut dpa.atoms {
        let idx = ap
            .strip_prefix('a')
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n < atoms.len())
            .ok_or_else(|| {
                AutomatonError::Unsupported(format!("unexpected atomic proposition `{ap}`"))
            })?;
        *ap = atoms[idx].clone();
    }
    Ok(normalize_acceptance(&dpa))
}

fn run_tool(
    tool: &ToolSpec,
    formula: &str,
    out: PathBuf,
    cancel: &AtomicBool,
    timeout: Duration,
) -> Result<HoaAutomaton, String> {
    let uses_file = tool.command.contains("{outfile}");
    let stdout_path = out.with_extension("stdout");
    let cmd = tool
        .command
        .replace("{formula}", &shell_quote(formula))
        .replace("{outfile}", &shell_quote(&out.to_string_lossy()));
    let stdout = File::create(&stdout_path).map_err(|e| e.to_string())?;
    let mut command = Command::new("sh");
    command
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(Stdio::null());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        command.process_group(0);
    }
    let mut child = command.spawn().map_err(|e| format!("cannot start: {e}"))?;
    let deadline = Instant::now() + timeout;
    let cleanup = || {
        let _ = fs::remove_file(&out);
        let _ = fs::remove_file(&stdout_path);
    };
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {}
            Err(e) => {
                cleanup();
                return Err(e.to_string());
            }
        }
        let timed_out = Instant::now() >= deadline;
        if timed_out || cancel.load(Ordering::Relaxed) {
            kill_group(&mut child);
            cleanup();
            return Err(if timed_out {
                format!("timed out after {:?}", timeout)
            } else {
                "cancelled".into()
            });
        }
        thread::sleep(Duration::from_millis(5));
    };
    let text = fs::read_to_string(if uses_file { &out } else { &stdout_path });
    cleanup();
    if !status.success() {
        return Err(format!("exited with {status}"));
    }
    let text = text.map_err(|e| format!("no output: {e}"))?;
    parse_hoa(&text).map_err(|e| e.to_string())
}

fn kill_group(child: &mut std::process::Child) {
    #[cfg(unix)]
    {
        let _ = Command::new("kill")
            .args(["-KILL", "--", &format!("-{}", child.id())])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status();
    }
    let _ = child.kill();
    let _ = child.wait();
}

/// Infinite-word negation normal form: weak and strong next coincide.
fn omega_nnf(psi: &Formula) -> Formula {
    fn strong(f: &Formula) -> Formula {
        match f {
            Formula::WeakNext(a) => Formula::next(strong(a)),
            _ => map_children(f, strong),
        }
    }
    strong(&nnf(psi).expect("checked pure"))
}

fn is_co_safety(f: &Formula) -> bool {
    !matches!(f, Formula::Release(..) | Formula::WeakNext(_))
        && f.children().into_iter().all(is_co_safety)
}

/// DPA of a co-safety formula in infinite-word NNF: the minimal DFA of
/// its good prefixes, whose accepting states are closed under successors,
/// with priority 0 on accepting and 1 on other states.
fn co_safety_dpa(f: &Formula) -> Result<Dpa, AutomatonError> {
    let nfa = ltlf_to_nfa(f).map_err(|e| AutomatonError::Unsupported(e.to_string()))?;
    let d = determinize_minimize(&nfa);
    let priority = d.finals.iter().map(|&acc| u32::from(!acc)).collect();
    Ok(Dpa {
        atoms: d.atoms,
        initial: d.initial,
        delta: d.delta,
        priority,
        polarity: Polarity::MinEven,
    })
}

/// Built-in translation for syntactic co-safety formulas and, through
/// complementation, syntactic safety formulas.
pub fn builtin_translate(psi: &Formula) -> Result<Translation, AutomatonError> {
    if psi.has_strategic() {
        return Err(AutomatonError::Unsupported(format!(
            "not a pure LTL formula: {psi}"
        )));
    }
    let pos = omega_nnf(psi);
    let dpa = if is_co_safety(&pos) {
        co_safety_dpa(&pos)?
    } else {
        let neg = omega_nnf(&Formula::not(psi.clone()));
        if !is_co_safety(&neg) {
            return Err(AutomatonError::Translation(format!(
                "no translator configured and `{psi}` is neither a safety nor a co-safety formula"
            )));
        }
        let mut d = co_safety_dpa(&neg)?;
        for p in &mut d.priority {
            *p += 1;
        }
        d
    };
    Ok(Translation {
        dpa: normalize_acceptance(&dpa),
        tool: "builtin".into(),
        hoa: None,
    })
}
