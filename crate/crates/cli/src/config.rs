//! Plain `key = value` configuration file.
//!
//! ```text
//! # translators race on every infinite-trace check
//! tool.owl = owl ltl2dpa -f {formula} -o {outfile}
//! tool.spot = ltl2tgba -D -P -H {formula}
//! timeout = 60
//! memory = 4000000
//! semantics = infinite
//! engine = symbolic
//! solver = zielonka
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use atlmc_core::dpa::ToolSpec;
use atlmc_core::{Engine, Semantics, SolverKind};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub tools: Vec<ToolSpec>,
    pub timeout: Option<u64>,
    pub memory: Option<usize>,
    pub semantics: Option<Semantics>,
    pub engine: Option<Engine>,
    pub solver: Option<SolverKind>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        FileConfig::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<FileConfig> {
        let mut cfg = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value", i + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| anyhow::anyhow!("line {}: bad {what} `{value}`", i + 1);
            match key {
                "timeout" => cfg.timeout = Some(value.parse().map_err(|_| bad("timeout"))?),
                "memory" => cfg.memory = Some(value.parse().map_err(|_| bad("memory budget"))?),
                "semantics" => cfg.semantics = Some(value.parse().map_err(|_| bad("semantics"))?),
                "engine" => cfg.engine = Some(value.parse().map_err(|_| bad("engine"))?),
                "solver" => cfg.solver = Some(value.parse().map_err(|_| bad("solver"))?),
                _ => match key.strip_prefix("tool.") {
                    Some(name) if !name.is_empty() && !value.is_empty() => {
                        cfg.tools.push(ToolSpec {
                            name: name.to_string(),
                            command: value.to_string(),
                        });
                    }
                    _ => bail!("line {}: unknown key `{key}`", i + 1),
                },
            }
        }
        Ok(cfg)
    }
}
