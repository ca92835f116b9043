//! `key=value` configuration files merged into the argument list.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;
use crate::error::{validation, CliError};

/// Parses `key=value` lines; blank lines and `#` comments are skipped, `_` in keys reads as `-`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| validation(format!("config line {}: expected key=value", k + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(validation(format!("config line {}: empty key", k + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Pulls `--config FILE` out of `args` (any position) and returns the remaining arguments and the path.
fn take_config(args: Vec<OsString>) -> Result<(Vec<OsString>, Option<OsString>), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| validation("--config needs a file"))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    Ok((rest, path))
}

/// Appends config entries that no explicit flag overrides. `args[0]` is the program name.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let (mut args, path) = take_config(args)?;
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| validation(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let entries = parse_config(&text)?;
    let sub_name = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .find(|a| !a.starts_with('-'))
        .ok_or_else(|| validation("a config file needs a subcommand"))?;
    let root = Cli::command();
    let sub = root
        .find_subcommand(&sub_name)
        .ok_or_else(|| validation(format!("unknown subcommand '{sub_name}'")))?;
    let given: Vec<String> = args
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    for (key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| validation(format!("config key '{key}' is not an option of '{sub_name}'")))?;
        if given.contains(&key) {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" | "1" | "yes" => args.push(format!("--{key}").into()),
                "false" | "0" | "no" => {}
                _ => return Err(validation(format!("config key '{key}' expects true or false"))),
            }
        } else {
            args.push(format!("--{key}={value}").into());
        }
    }
    Ok(args)
}
