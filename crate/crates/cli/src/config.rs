//! `--config FILE`: a JSON object whose keys are flag names of the chosen
//! command. Its values are turned into flags placed before the command-line
//! arguments, so anything given on the command line wins.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{ArgAction, Command};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// The `--config` path among the arguments after the subcommand, if any.
fn config_path(args: &[OsString]) -> CliResult<Option<PathBuf>> {
    let mut found = None;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(s) = arg.to_str() else { continue };
        if s == "--" {
            break;
        }
        if s == "--config" {
            let path = it.next().ok_or_else(|| CliError::usage("--config needs a file"))?;
            found = Some(PathBuf::from(path));
        } else if let Some(path) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(path));
        }
    }
    Ok(found)
}

fn scalar(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Array(_) | Value::Object(_) => Err(CliError::format(format!("config key `{key}`: nested value"))),
                other => scalar(key, other),
            })
            .collect::<CliResult<Vec<_>>>()
            .map(|parts| parts.join(",")),
        _ => Err(CliError::format(format!(
            "config key `{key}` needs a string, number or array, got {v}"
        ))),
    }
}

/// Flags for `command` taken from the JSON object `text`.
pub fn config_flags(command: &Command, text: &str) -> CliResult<Vec<OsString>> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::format(format!("config: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::format("config must be a JSON object"));
    };
    let mut flags = Vec::new();
    for (raw_key, v) in &map {
        let key = raw_key.replace('_', "-");
        let arg = command
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .ok_or_else(|| {
                CliError::usage(format!("unknown config key `{raw_key}` for `{}`", command.get_name()))
            })?;
        match arg.get_action() {
            ArgAction::SetTrue => match v {
                Value::Bool(true) => flags.push(format!("--{key}").into()),
                Value::Bool(false) => {
                    if let Some(opposite) = key.strip_prefix("no-").map(str::to_string).or_else(|| {
                        command
                            .get_arguments()
                            .any(|a| a.get_long() == Some(format!("no-{key}").as_str()))
                            .then(|| format!("no-{key}"))
                    }) {
                        flags.push(format!("--{opposite}").into());
                    }
                }
                _ => return Err(CliError::format(format!("config key `{raw_key}` must be true or false"))),
            },
            _ => {
                flags.push(format!("--{key}").into());
                flags.push(scalar(raw_key, v)?.into());
            }
        }
    }
    Ok(flags)
}

/// `argv` with the flags from its `--config` file (if any) inserted right
/// after the subcommand name.
pub fn expand(root: &Command, argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    if argv.len() < 2 {
        return Ok(argv);
    }
    let Some(sub) = argv[1].to_str().and_then(|name| root.find_subcommand(name)) else {
        return Ok(argv);
    };
    let Some(path) = config_path(&argv[2..])? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut out = argv[..2].to_vec();
    out.extend(config_flags(sub, &text)?);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}
