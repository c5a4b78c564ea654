//! `--config path.json` support: the file's values become flags, spliced in
//! right after the subcommand, unless the same flag is already on the command line.

use std::ffi::OsString;
use std::fs;

use serde_json::Value;

fn flag_present(argv: &[OsString], name: &str) -> bool {
    let long = format!("--{name}");
    let with_eq = format!("--{name}=");
    argv.iter().any(|a| {
        let a = a.to_string_lossy();
        a == long || a.starts_with(&with_eq)
    })
}

fn value_args(name: &str, value: &Value, out: &mut Vec<OsString>) -> Result<(), String> {
    match value {
        Value::Null | Value::Bool(false) => {}
        Value::Bool(true) => out.push(format!("--{name}").into()),
        Value::Number(n) => {
            out.push(format!("--{name}").into());
            out.push(n.to_string().into());
        }
        Value::String(s) => {
            out.push(format!("--{name}").into());
            out.push(s.into());
        }
        Value::Array(items) => {
            for item in items {
                value_args(name, item, out)?;
            }
        }
        Value::Object(_) => return Err(format!("config key '{name}' must not be an object")),
    }
    Ok(())
}

/// Removes `--config PATH` from `argv` and splices the file's flags in.
pub fn merge_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            if i + 1 >= argv.len() {
                return Err("--config needs a path".into());
            }
            path = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(OsString::from(p));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let json: Value =
        serde_json::from_str(&text).map_err(|e| format!("invalid config JSON: {e}"))?;
    let object = match json.get("config") {
        Some(Value::Object(inner)) => inner.clone(),
        _ => match json {
            Value::Object(o) => o,
            _ => return Err("config must be a JSON object".into()),
        },
    };
    let mut extra = Vec::new();
    for (name, value) in &object {
        if name == "out" || name == "config" || flag_present(&argv, name) {
            continue;
        }
        value_args(name, value, &mut extra)?;
    }
    let at = argv.len().min(2);
    argv.splice(at..at, extra);
    Ok(argv)
}
