//! `--config file.json`: each key of the JSON object becomes a flag placed
//! right after the subcommand, so flags given on the command line come later
//! and win.

use std::path::PathBuf;

use serde_json::Value;

use crate::UsageError;

pub const SUBCOMMANDS: [&str; 10] = ["kernel", "corr", "density", "drift", "sample", "dpp", "simulate", "girsanov", "gap", "verify"];

pub struct Expanded {
    pub args: Vec<String>,
    pub config: Option<PathBuf>,
}

fn config_path(argv: &[String]) -> Result<Option<PathBuf>, UsageError> {
    let mut found = None;
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        let path = if a == "--config" {
            it.next().ok_or_else(|| UsageError("--config needs a file".into()))?.clone()
        } else if let Some(p) = a.strip_prefix("--config=") {
            p.to_string()
        } else {
            continue;
        };
        if found.is_some() {
            return Err(UsageError("--config given more than once".into()));
        }
        found = Some(PathBuf::from(path));
    }
    Ok(found)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Flags for one config entry.
fn flags(key: &str, value: &Value) -> Result<Vec<String>, UsageError> {
    let flag = format!("--{}", key.replace('_', "-"));
    if flag == "--config" {
        return Err(UsageError("a config file cannot name another config file".into()));
    }
    Ok(match value {
        Value::Null | Value::Bool(false) => vec![],
        Value::Bool(true) => vec![flag],
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(|v| scalar(v).ok_or_else(|| UsageError(format!("config key {key}: list entries must be scalars"))))
                .collect::<Result<Vec<_>, _>>()?;
            vec![flag, parts.join(",")]
        }
        Value::Object(_) => vec![flag, value.to_string()],
        v => vec![flag, scalar(v).expect("scalar")],
    })
}

/// argv with the config file's flags spliced in after the subcommand.
pub fn expand(argv: Vec<String>) -> Result<Expanded, UsageError> {
    let Some(path) = config_path(&argv)? else {
        return Ok(Expanded { args: argv, config: None });
    };
    let text = std::fs::read_to_string(&path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| UsageError(format!("config {} is not JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(UsageError(format!("config {} must hold a JSON object", path.display())));
    };
    let mut inserted = Vec::new();
    for (key, value) in &map {
        inserted.extend(flags(key, value)?);
    }
    let mut args = argv;
    if let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        args.splice(pos + 1..pos + 1, inserted);
    }
    Ok(Expanded { args, config: Some(path) })
}
