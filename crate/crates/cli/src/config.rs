//! Flag/config-file merging. Every command resolves its settings from a
//! JSON config file (optional) overlaid with the flags actually given on
//! the command line; the resolved settings are written next to the outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{usage, CliResult};
use crate::Shared;

pub fn resolve<A: Serialize, R: DeserializeOwned>(shared: &Shared, args: &A) -> CliResult<R> {
    let mut merged: Map<String, Value> = match &shared.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            match serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))? {
                Value::Object(m) => m,
                _ => return Err(usage("config file must hold a JSON object")),
            }
        }
        None => Map::new(),
    };
    let flags = serde_json::to_value(args)?;
    if let Value::Object(m) = flags {
        for (k, v) in m {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    if let Some(seed) = shared.seed {
        merged.insert("seed".into(), seed.into());
    }
    if let Some(out) = &shared.out {
        merged.insert("out".into(), Value::String(out.display().to_string()));
    }
    if let Some(t) = shared.threads {
        merged.insert("threads".into(), t.into());
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("configuration: {e}")))
}

/// Writes the resolved configuration as `<command>.config.json` in `dir`.
pub fn echo<R: Serialize>(dir: &Path, command: &str, resolved: &R) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{command}.config.json")), serde_json::to_string_pretty(resolved)? + "\n")?;
    Ok(())
}

pub fn require_out(out: &Option<PathBuf>) -> CliResult<PathBuf> {
    out.clone().ok_or_else(|| usage("missing output directory (--out)"))
}
