//! `--config` files. Each subcommand reads the table of the same name; its
//! keys are long options and are placed before the command-line options so
//! that the latter win.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use toml::{Table, Value};

const SUBCOMMANDS: [&str; 7] = ["encode", "decode", "score", "errors", "prompt", "symbolize", "stats"];

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_str()?;
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn to_args(table: &Table) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Boolean(true) => out.push(flag.into()),
            Value::Boolean(false) | Value::Table(_) => {}
            Value::String(s) => out.extend([flag.into(), s.into()]),
            Value::Integer(i) => out.extend([flag.into(), i.to_string().into()]),
            other => return Err(format!("config key {key:?}: unsupported value {other}")),
        }
    }
    Ok(out)
}

/// Inserts options from the config file named by `--config`, if any.
pub(crate) fn expand(mut argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let table: Table = text.parse().map_err(|e| format!("{}: {e}", path.display()))?;
    let Some(pos) = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|a| SUBCOMMANDS.contains(&a)))
    else {
        return Ok(argv);
    };
    let name = argv[pos].to_str().unwrap_or_default().to_string();
    let mut inserted = Vec::new();
    if let Some(Value::Integer(j)) = table.get("jobs") {
        inserted.extend([OsString::from("--jobs"), j.to_string().into()]);
    }
    match table.get(&name) {
        Some(Value::Table(t)) => inserted.extend(to_args(t)?),
        Some(_) => return Err(format!("{}: {name:?} must be a table", path.display())),
        None => {}
    }
    argv.splice(pos + 1..pos + 1, inserted);
    Ok(argv)
}
