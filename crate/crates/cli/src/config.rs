//! `--config FILE` support: option values from a TOML file are spliced into
//! the argument list right after the subcommand, so explicit flags given
//! later on the command line win, and both beat environment variables.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;

use crate::args::Cli;

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = text.strip_prefix("--config=") {
            return Some(path.into());
        }
    }
    None
}

fn render(key: &str, value: &toml::Value) -> Result<Vec<OsString>> {
    let flag = format!("--{}", key.replace('_', "-"));
    Ok(match value {
        toml::Value::Boolean(true) => vec![flag.into()],
        toml::Value::Boolean(false) => Vec::new(),
        toml::Value::String(s) => vec![flag.into(), s.into()],
        toml::Value::Integer(i) => vec![flag.into(), i.to_string().into()],
        toml::Value::Float(f) => vec![flag.into(), f.to_string().into()],
        other => bail!("config key `{key}`: unsupported value {other}"),
    })
}

pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(sub) = args.get(1).map(|a| a.to_string_lossy().into_owned()) else {
        return Ok(args);
    };
    let command = Cli::command();
    let Some(subcommand) = command.find_subcommand(&sub) else {
        return Ok(args);
    };
    let Some(path) = config_path(&args[2..]) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let table: toml::Table =
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))?;
    let known: Vec<String> = subcommand
        .get_arguments()
        .filter_map(|a| a.get_long().map(str::to_owned))
        .filter(|name| name != "config")
        .collect();
    let is_known = |key: &str| known.iter().any(|k| *k == key.replace('_', "-"));

    let mut injected = Vec::new();
    // Top-level keys may be shared by several subcommands; keys this one
    // does not take are ignored.
    for (key, value) in &table {
        if !value.is_table() && is_known(key) {
            injected.extend(render(key, value)?);
        }
    }
    if let Some(section) = table.get(&sub) {
        let section = section
            .as_table()
            .with_context(|| format!("config entry `{sub}` must be a table"))?;
        for (key, value) in section {
            if !is_known(key) {
                bail!("config file {}: `ohmnet {sub}` has no option `{key}`", path.display());
            }
            injected.extend(render(key, value)?);
        }
    }
    let mut out = args[..2].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}
